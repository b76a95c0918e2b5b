"""Fragment covers and n-best rescoring.

When an utterance has no single complete parse, it is scored by the
cheapest way to tile it with parsed phrases. Every live non-empty edge
is an arc costing `fragment_cost`; every word is also coverable by a
fallback arc costing `fallback_cost` (dearer by default, so real
phrases are preferred). The cover is found by dynamic programming over
suffix costs; reconstruction prefers longer arcs, then arcs of the
start category, then phrase arcs over fallbacks, then earlier edges.

The parse score is

    -(fragment_cost * fragments) + sentence_bonus?  - dispreference

where the bonus applies only to a cover that is one single phrase of
the start category, and dispreference sums, over the cover's phrases,
the cheapest total weight of dispreferred rules any derivation needs.
Rescoring combines this with a recognizer score: rec + scale * score.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .engine import ParseResult, parse
from .grammar import Grammar

_EPS = 1e-9


@dataclass(frozen=True)
class ScoreWeights:
    scale: float = 1.0
    fragment_cost: float = 1.0
    sentence_bonus: float = 0.5
    fallback_cost: float = 2.0

    @staticmethod
    def from_dict(data: dict) -> "ScoreWeights":
        known = {"scale", "fragment_cost", "sentence_bonus", "fallback_cost"}
        bad = set(data) - known
        if bad:
            raise ValueError(f"unknown weight keys: {sorted(bad)}")
        return ScoreWeights(**{k: float(v) for k, v in data.items()})

    @staticmethod
    def from_json(path: str) -> "ScoreWeights":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("weights file must hold a JSON object")
        return ScoreWeights.from_dict(data)


@dataclass(frozen=True)
class Arc:
    start: int
    end: int
    edge: object  # Edge, or None for a fallback word
    cost: float


@dataclass(frozen=True)
class FragmentCover:
    arcs: tuple[Arc, ...]
    words: tuple[str, ...]
    is_single_sentence: bool
    dispreference: float

    @property
    def count(self) -> int:
        return len(self.arcs)

    def bracketing(self) -> str:
        parts = []
        for arc in self.arcs:
            span = " ".join(self.words[arc.start : arc.end])
            if arc.edge is None:
                parts.append(f"?{span}")
            else:
                parts.append(f"[{span}]")
        return " ".join(parts)


def edge_dispreference(grammar: Grammar, edge) -> float:
    """Cheapest total dispreferred-rule weight any derivation of the
    edge incurs; inf only for edges with no acyclic derivation."""
    weights = grammar.dispreferred
    memo: dict[int, float] = {}

    def rec(e, visiting: set[int]) -> tuple[float, bool]:
        got = memo.get(e.id)
        if got is not None:
            return got, True
        if e.id in visiting:
            return math.inf, False
        visiting.add(e.id)
        best = math.inf
        clean = True
        for d in e.derivations:
            if d.kind == "lex":
                cost = 0.0
            else:
                cost = weights.get(d.rule.name, 0.0)
                for child in d.daughters:
                    sub, ok = rec(child, visiting)
                    clean = clean and ok
                    cost += sub
            best = min(best, cost)
        visiting.remove(e.id)
        if clean:
            memo[e.id] = best
        return best, clean

    return rec(edge, set())[0]


def min_fragment_cover(result: ParseResult,
                       weights: ScoreWeights | None = None) -> FragmentCover:
    """The cheapest tiling of the utterance by parsed phrases."""
    if weights is None:
        weights = ScoreWeights()
    n = len(result.words)
    start_backbone = result.grammar.start.backbone
    arcs_at: dict[int, list[Arc]] = {i: [] for i in range(n + 1)}
    for edge in result.chart.live_edges():
        if edge.start < edge.end:
            arcs_at[edge.start].append(
                Arc(edge.start, edge.end, edge, weights.fragment_cost)
            )
    for i in range(n):
        arcs_at[i].append(Arc(i, i + 1, None, weights.fallback_cost))

    suffix = [math.inf] * (n + 1)
    suffix[n] = 0.0
    for i in range(n - 1, -1, -1):
        for arc in arcs_at[i]:
            total = arc.cost + suffix[arc.end]
            if total < suffix[i]:
                suffix[i] = total

    chosen: list[Arc] = []
    i = 0
    while i < n:
        candidates = [
            arc for arc in arcs_at[i]
            if abs(arc.cost + suffix[arc.end] - suffix[i]) < _EPS
        ]
        candidates.sort(
            key=lambda arc: (
                -(arc.end - arc.start),
                0 if arc.edge is not None and arc.edge.backbone == start_backbone
                else 1,
                0 if arc.edge is not None else 1,
                arc.edge.id if arc.edge is not None else 0,
            )
        )
        best = candidates[0]
        chosen.append(best)
        i = best.end

    single = (
        len(chosen) == 1
        and chosen[0].edge is not None
        and chosen[0].edge.backbone == start_backbone
    )
    dispref = sum(
        edge_dispreference(result.grammar, arc.edge)
        for arc in chosen
        if arc.edge is not None
    )
    return FragmentCover(tuple(chosen), tuple(result.words), single, dispref)


def nl_score(cover: FragmentCover, weights: ScoreWeights | None = None) -> float:
    """The robust parse score of a cover."""
    if weights is None:
        weights = ScoreWeights()
    score = -(weights.fragment_cost * cover.count)
    if cover.is_single_sentence:
        score += weights.sentence_bonus
    score -= cover.dispreference
    return score


# -- n-best rescoring ----------------------------------------------------


@dataclass(frozen=True)
class Hypothesis:
    utt: str
    rank: int
    rec: float
    words: tuple[str, ...]


@dataclass(frozen=True)
class RescoredHypothesis:
    utt: str
    new_rank: int
    combined: float
    rec: float
    nl: float
    fragments: int
    is_sentence: bool
    words: tuple[str, ...]

    def row(self) -> str:
        return "\t".join(
            [
                self.utt,
                str(self.new_rank),
                f"{self.combined:.4f}",
                f"{self.rec:.4f}",
                f"{self.nl:.4f}",
                str(self.fragments),
                "1" if self.is_sentence else "0",
                " ".join(self.words),
            ]
        )


def read_nbest(path: str) -> dict[str, list[Hypothesis]]:
    """Read `utt TAB rank TAB rec TAB words` rows, grouped by utterance."""
    groups: dict[str, list[Hypothesis]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 4:
                raise ValueError(
                    f"line {lineno}: expected 4 tab-separated fields, got {len(fields)}"
                )
            utt, rank_s, rec_s, words_s = fields
            try:
                rank = int(rank_s)
                rec = float(rec_s)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            groups.setdefault(utt, []).append(
                Hypothesis(utt, rank, rec, tuple(words_s.split()))
            )
    for hyps in groups.values():
        hyps.sort(key=lambda h: h.rank)
    return groups


def rescore(grammar: Grammar, groups: dict[str, list[Hypothesis]],
            weights: ScoreWeights | None = None, *, strategy: str = "llc",
            depth: str = "deferred",
            lookahead: bool = True) -> list[RescoredHypothesis]:
    """Parse every hypothesis robustly, score it, and reorder each
    utterance's list by rec + scale * score (stable on ties)."""
    if weights is None:
        weights = ScoreWeights()
    out: list[RescoredHypothesis] = []
    for utt in groups:
        scored: list[tuple[float, Hypothesis, FragmentCover, float]] = []
        for hyp in groups[utt]:
            result = parse(
                grammar, list(hyp.words), strategy=strategy, depth=depth,
                lookahead=lookahead, robust=True,
            )
            cover = min_fragment_cover(result, weights)
            nl = nl_score(cover, weights)
            combined = hyp.rec + weights.scale * nl
            scored.append((combined, hyp, cover, nl))
        scored.sort(key=lambda item: (-item[0], item[1].rank))
        for new_rank, (combined, hyp, cover, nl) in enumerate(scored, 1):
            out.append(
                RescoredHypothesis(
                    utt=utt,
                    new_rank=new_rank,
                    combined=combined,
                    rec=hyp.rec,
                    nl=nl,
                    fragments=cover.count,
                    is_sentence=cover.is_single_sentence,
                    words=hyp.words,
                )
            )
    return out

"""The chart: packed edges and prediction sequences.

Edges pack derivations: a new derivation of an equivalent category over
the same span joins the existing edge instead of growing the chart. A
strictly more general category logically deletes the edges it subsumes;
dead edges keep their derivations so earlier parents still unpack.
Edges carrying semantic readings only interact when their semantic keys
agree, so semantically distinct analyses stay distinct edges.

Predictions are sequences of restricted categories anticipated at a
string position. Adding one applies the restrictor, the one-word
lookahead filter, and a subsumption check against existing sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

from .grammar import Rule
from .tables import CompiledTables
from .terms import (
    FeatureTerm,
    Restrictor,
    canonical,
    canonical_seq,
    seq_subsumes,
    subsumes,
    unify_values,
    variants,
)


@dataclass(frozen=True)
class Derivation:
    """One way an edge was built: a word, an empty rule, or a reduction."""

    kind: str  # "lex" | "empty" | "rule"
    rule: Rule | None = None
    word: str | None = None
    daughters: tuple["Edge", ...] = ()

    @property
    def key(self) -> tuple:
        return (
            self.kind,
            self.rule.name if self.rule else None,
            self.word,
            tuple(d.id for d in self.daughters),
        )


class Edge:
    """A span with a category, packed derivations, and optional readings."""

    __slots__ = ("id", "start", "end", "cat", "derivations", "readings",
                 "sem_key", "alive", "_deriv_keys", "_reading_renders")

    def __init__(self, eid: int, start: int, end: int, cat: FeatureTerm,
                 sem_key: str | None):
        self.id = eid
        self.start = start
        self.end = end
        self.cat = cat
        self.derivations: list[Derivation] = []
        self.readings: list | None = None
        self.sem_key = sem_key
        self.alive = True
        self._deriv_keys: set[tuple] = set()
        self._reading_renders: set[str] = set()

    @property
    def backbone(self) -> str:
        return self.cat.backbone

    @property
    def is_empty(self) -> bool:
        return self.start == self.end

    def add_derivation(self, d: Derivation) -> bool:
        if d.key in self._deriv_keys:
            return False
        self._deriv_keys.add(d.key)
        self.derivations.append(d)
        return True

    def add_readings(self, readings: list | None) -> None:
        if readings is None:
            return
        if self.readings is None:
            self.readings = []
        for r in readings:
            if r.render not in self._reading_renders:
                self._reading_renders.add(r.render)
                self.readings.append(r)

    def __repr__(self) -> str:
        return f"<edge {self.id} {self.start}-{self.end} {canonical(self.cat)}>"


class Chart:
    """Edges, predictions, and the bookkeeping the engine drives."""

    def __init__(self, words: list[str], tables: CompiledTables,
                 restrictor: Restrictor, lookahead: bool = True):
        n_words = len(words)
        self.n_words = n_words
        self.words = words
        self.tables = tables
        self.lookahead = lookahead
        self.restrictor = restrictor
        self.edges: list[Edge] = []
        self.predictions: dict[int, list[tuple[FeatureTerm, ...]]] = {
            i: [] for i in range(n_words + 1)
        }
        self._by_end: dict[int, list[Edge]] = {i: [] for i in range(n_words + 1)}
        self._by_group: dict[tuple, list[Edge]] = {}
        self.edges_created = 0
        self.preds_created = 0
        self._next_id = 1

    # -- edges ---------------------------------------------------------

    def add_edge(self, start: int, end: int, cat: FeatureTerm,
                 derivation: Derivation, readings: list | None = None,
                 sem_key: str | None = None) -> tuple[Edge, str]:
        """Insert a derivation; returns (edge, outcome) where outcome is
        "new", "replaced", "packed", or "duplicate"."""
        group = (start, end, cat.backbone, sem_key)
        peers = self._by_group.setdefault(group, [])
        replaced: list[Edge] = []
        for other in peers:
            if not other.alive:
                continue
            if variants(other.cat, cat) or subsumes(other.cat, cat):
                # an equivalent or more general edge hosts this analysis;
                # readings merge even when the derivation is already known
                added = other.add_derivation(derivation)
                other.add_readings(readings)
                return other, ("packed" if added else "duplicate")
            if subsumes(cat, other.cat):
                replaced.append(other)
        edge = Edge(self._next_id, start, end, cat, sem_key)
        self._next_id += 1
        edge.add_derivation(derivation)
        if readings is not None:
            edge.add_readings(readings)
        for other in replaced:
            other.alive = False
        self.edges.append(edge)
        self._by_end[end].append(edge)
        peers.append(edge)
        self.edges_created += 1
        return edge, ("replaced" if replaced else "new")

    def edges_ending_at(self, end: int) -> list[Edge]:
        # the live list: callers iterating during growth see new edges
        return self._by_end[end]

    def empty_edges_at(self, pos: int) -> list[Edge]:
        return [e for e in self._by_end[pos] if e.start == pos and e.alive]

    def live_edges(self) -> list[Edge]:
        return [e for e in self.edges if e.alive]

    # -- predictions ---------------------------------------------------

    def add_prediction(self, pos: int, seq: tuple[FeatureTerm, ...]) -> str:
        """Gate, restrict, and store a sequence; returns "ok",
        "lookahead", or "duplicate"."""
        seq = tuple(self.restrictor.restrict(t) for t in seq)
        if self.lookahead and not self._lookahead_ok(pos, seq):
            return "lookahead"
        for existing in self.predictions[pos]:
            if seq_subsumes(existing, seq):
                return "duplicate"
        self.predictions[pos].append(seq)
        self.preds_created += 1
        return "ok"

    def _lookahead_ok(self, pos: int, seq: tuple[FeatureTerm, ...]) -> bool:
        word = self.words[pos] if pos < len(self.words) else None
        for term in seq:
            if word is not None and word in self.tables.first_word.get(
                term.backbone, frozenset()
            ):
                return True
            if term.backbone not in self.tables.nullable:
                return False
        # every element can be empty, so the sequence needs no input
        return True

    def predicted(self, cat: FeatureTerm, pos: int) -> bool:
        """Strict check: does a sequence here start with this category?"""
        restricted = self.restrictor.restrict(cat)
        for seq in self.predictions[pos]:
            if seq and unify_values(seq[0], restricted, {}) is not None:
                return True
        return False

    def first_backbones(self, pos: int) -> set[str]:
        return {seq[0].backbone for seq in self.predictions[pos] if seq}

    # -- reporting -----------------------------------------------------

    def dump(self) -> str:
        lines: list[str] = []
        for edge in self.edges:
            flag = "" if edge.alive else " (dead)"
            lines.append(
                f"{edge.id}\t{edge.start}\t{edge.end}\t"
                f"{canonical(edge.cat)}\t{len(edge.derivations)}{flag}"
            )
        for pos in sorted(self.predictions):
            for seq in self.predictions[pos]:
                lines.append(f"P\t{pos}\t{canonical_seq(seq)}")
        return "\n".join(lines)

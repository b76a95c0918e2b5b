"""Independent oracles the test suite checks the library against.

Everything here recomputes expected values by a different route than the
library: a substitution-composition unifier, closure by boolean matrix
powers, derivation search for nullability, an exhaustive span-table
parser, and brute-force tiling enumeration. Nothing imports from the
chart engine itself; only the basic term/grammar data types are shared.
"""

from __future__ import annotations

import itertools
import math

from gapchart.grammar import Grammar
from gapchart.terms import FeatureTerm, Var, refresh

# -- substitution-composition unifier -------------------------------------
#
# The library unifier threads an immutable binding map and walks chains
# lazily. This one eagerly applies a substitution dict at every step and
# extends it by composition, so the two can only agree by both being right.


def apply_subst(subst: dict, value: object) -> object:
    while isinstance(value, Var) and value in subst:
        value = subst[value]
    if isinstance(value, FeatureTerm):
        return FeatureTerm(
            value.backbone,
            tuple((n, apply_subst(subst, v)) for n, v in value.feats),
        )
    return value


def _occurs_in(var: Var, value: object) -> bool:
    if isinstance(value, Var):
        return value is var
    if isinstance(value, FeatureTerm):
        return any(_occurs_in(var, v) for _, v in value.feats)
    return False


def robinson_unify(a: object, b: object, subst: dict | None = None) -> dict | None:
    """Unify two values; return a substitution dict or None."""
    if subst is None:
        subst = {}
    a = apply_subst(subst, a)
    b = apply_subst(subst, b)
    if isinstance(a, Var) and isinstance(b, Var) and a is b:
        return subst
    if isinstance(a, Var):
        if _occurs_in(a, b):
            return None
        return {**subst, a: b}
    if isinstance(b, Var):
        if _occurs_in(b, a):
            return None
        return {**subst, b: a}
    if isinstance(a, str) and isinstance(b, str):
        return subst if a == b else None
    if isinstance(a, FeatureTerm) and isinstance(b, FeatureTerm):
        if a.backbone != b.backbone:
            return None
        bmap = dict(b.feats)
        for name, aval in a.feats:
            if name in bmap:
                subst = robinson_unify(aval, bmap[name], subst)
                if subst is None:
                    return None
        return subst
    return None


def ground_instance(value: object, subst: dict) -> object:
    """Replace every free variable by a distinct atom, for comparisons."""
    value = apply_subst(subst, value)
    out: dict[Var, str] = {}

    def grounded(v: object) -> object:
        if isinstance(v, Var):
            if v not in out:
                out[v] = f"@g{len(out)}"
            return out[v]
        if isinstance(v, FeatureTerm):
            return FeatureTerm(v.backbone, tuple((n, grounded(x)) for n, x in v.feats))
        return v

    return grounded(value)


# -- grammar-analysis oracles ----------------------------------------------


def derivation_nullable(grammar: Grammar) -> set[str]:
    """Backbones that derive the empty string, by derivation search."""
    rules_by_head: dict[str, list] = {}
    for rule in grammar.rules:
        rules_by_head.setdefault(rule.head.backbone, []).append(rule)

    def derives_empty(backbone: str, visiting: frozenset[str]) -> bool:
        if backbone in visiting:
            return False
        for rule in rules_by_head.get(backbone, []):
            if all(
                derives_empty(elem.backbone, visiting | {backbone})
                for elem in rule.rhs
            ):
                return True
        return False

    return {b for b in _backbones(grammar) if derives_empty(b, frozenset())}


def _backbones(grammar: Grammar) -> set[str]:
    out = set()
    for rule in grammar.rules:
        out.add(rule.head.backbone)
        out.update(elem.backbone for elem in rule.rhs)
    for entries in grammar.lexicon.values():
        out.update(e.cat.backbone for e in entries)
    out.add(grammar.start.backbone)
    return out


def matrix_left_corner(grammar: Grammar) -> dict[str, set[str]]:
    """Reflexive-transitive possible-left-corner-of, by boolean closure.

    x is one step from y when some rule y -> g1 .. gk has x = g_i with
    g_1 .. g_{i-1} all nullable. The closure is computed by squaring the
    relation matrix until it stops changing.
    """
    nullable = derivation_nullable(grammar)
    symbols = sorted(_backbones(grammar))
    index = {s: i for i, s in enumerate(symbols)}
    n = len(symbols)
    reach = [[False] * n for _ in range(n)]
    for i in range(n):
        reach[i][i] = True
    for rule in grammar.rules:
        y = index[rule.head.backbone]
        for elem in rule.rhs:
            reach[index[elem.backbone]][y] = True
            if elem.backbone not in nullable:
                break
    changed = True
    while changed:
        changed = False
        for i in range(n):
            for j in range(n):
                if not reach[i][j] and any(
                    reach[i][k] and reach[k][j] for k in range(n)
                ):
                    reach[i][j] = True
                    changed = True
    return {
        x: {y for y in symbols if reach[index[x]][index[y]]} for x in symbols
    }


def recursive_first_words(grammar: Grammar) -> dict[str, set[str]]:
    """First words per backbone, textbook-style with a cycle cut.

    A word w is in first(b) when b derives a string beginning with w.
    """
    rules_by_head: dict[str, list] = {}
    for rule in grammar.rules:
        rules_by_head.setdefault(rule.head.backbone, []).append(rule)
    lexical: dict[str, set[str]] = {}
    for word, entries in grammar.lexicon.items():
        for entry in entries:
            lexical.setdefault(entry.cat.backbone, set()).add(word)
    nullable = derivation_nullable(grammar)

    def first(backbone: str, visiting: frozenset[str]) -> set[str]:
        if backbone in visiting:
            return set()
        out = set(lexical.get(backbone, ()))
        for rule in rules_by_head.get(backbone, []):
            for elem in rule.rhs:
                out |= first(elem.backbone, visiting | {backbone})
                if elem.backbone not in nullable:
                    break
        return out

    # iterate to a fixpoint over the cycle cut: a cut branch may become
    # available once the cut symbol's own set has grown
    sets = {b: first(b, frozenset()) for b in _backbones(grammar)}
    changed = True
    while changed:
        changed = False
        for b in sets:
            for rule in rules_by_head.get(b, []):
                for elem in rule.rhs:
                    add = sets.get(elem.backbone, set()) - sets[b]
                    if add:
                        sets[b] |= add
                        changed = True
                    if elem.backbone not in nullable:
                        break
    return sets


# -- exhaustive span-table parser ------------------------------------------
#
# Builds, per span, every (category, tree) analysis by fixpoint: apply
# every rule to every split of the span into daughter sub-spans (empty
# sub-spans allowed) until no new tree appears. Trees are s-expressions;
# a tree string fully determines a derivation, so the table entries are
# deduplicated by tree alone. Works for any grammar whose unary/empty
# structure admits finitely many trees per span, which holds for all
# bundled fixtures.


def exhaustive_parse(grammar: Grammar, words: list[str],
                     max_passes: int = 50) -> list[str]:
    from gapchart.terms import unify_values, resolve, EMPTY_BINDS

    n = len(words)
    table: dict[tuple[int, int], list[tuple[FeatureTerm, str]]] = {
        (i, k): [] for i in range(n + 1) for k in range(i, n + 1)
    }
    for i, word in enumerate(words):
        for entry in grammar.lexicon.get(word, []):
            cat = refresh(entry.cat, {})
            table[(i, i + 1)].append((cat, word))

    def splits(i: int, k: int, parts: int):
        if parts == 0:
            if i == k:
                yield ()
            return
        for mid in range(i, k + 1):
            for rest in splits(mid, k, parts - 1):
                yield ((i, mid),) + rest

    changed = True
    passes = 0
    while changed:
        passes += 1
        if passes > max_passes:
            raise RuntimeError("oracle parse did not converge")
        changed = False
        for (i, k) in list(table):
            for rule in grammar.rules:
                for spans in splits(i, k, len(rule.rhs)):
                    daughter_lists = [table[s] for s in spans]
                    for combo in itertools.product(*daughter_lists):
                        mapping: dict = {}
                        head = refresh(rule.head, mapping)
                        rhs = [refresh(e, mapping) for e in rule.rhs]
                        binds = EMPTY_BINDS
                        ok = True
                        for elem, (cat, _tree) in zip(rhs, combo):
                            binds = unify_values(elem, cat, binds)
                            if binds is None:
                                ok = False
                                break
                        if not ok:
                            continue
                        children = " ".join(t for _c, t in combo)
                        tree = f"({rule.name} {children})" if children else f"({rule.name})"
                        if any(t == tree for _c, t in table[(i, k)]):
                            continue
                        table[(i, k)].append((resolve(head, binds), tree))
                        changed = True

    out = []
    for cat, tree in table[(0, n)]:
        fresh_start = refresh(grammar.start, {})
        if unify_values(fresh_start, cat, EMPTY_BINDS) is not None:
            out.append(tree)
    return out


# -- exhaustive fragment tiling --------------------------------------------


def exhaustive_min_cover_cost(result, weights) -> float:
    """Cheapest tiling cost over all tilings, by depth-first enumeration."""
    n = len(result.words)
    arcs_at: dict[int, list[tuple[int, float]]] = {i: [] for i in range(n + 1)}
    for edge in result.chart.live_edges():
        if edge.start < edge.end:
            arcs_at[edge.start].append((edge.end, weights.fragment_cost))
    for i in range(n):
        arcs_at[i].append((i + 1, weights.fallback_cost))

    best = [math.inf]

    def go(i: int, cost: float):
        if cost >= best[0]:
            return
        if i == n:
            best[0] = cost
            return
        for end, c in arcs_at[i]:
            go(end, cost + c)

    go(0, 0.0)
    return best[0]


def all_min_cost_tilings(result, weights) -> list[tuple[tuple[int, ...], int]]:
    """All tilings achieving the minimum cost, as (cut positions, arcs)."""
    n = len(result.words)
    arcs_at: dict[int, list[tuple[int, float]]] = {i: [] for i in range(n + 1)}
    for edge in result.chart.live_edges():
        if edge.start < edge.end:
            arcs_at[edge.start].append((edge.end, weights.fragment_cost))
    for i in range(n):
        arcs_at[i].append((i + 1, weights.fallback_cost))
    for lst in arcs_at.values():
        lst[:] = sorted(set(lst))

    tilings: list[tuple[tuple[int, ...], float]] = []

    def go(i: int, cost: float, cuts: tuple[int, ...]):
        if i == n:
            tilings.append((cuts, cost))
            return
        for end, c in arcs_at[i]:
            go(end, cost + c, cuts + (end,))

    go(0, 0.0, ())
    if not tilings:
        return []
    best = min(cost for _cuts, cost in tilings)
    return sorted(
        {(cuts, len(cuts)) for cuts, cost in tilings if abs(cost - best) < 1e-9}
    )

"""Feature terms and non-destructive unification.

A category is a feature term: a backbone symbol plus named feature values.
Values are atoms (plain strings), variables, or nested feature terms.
All operations are non-destructive; bindings live in immutable dicts that
are extended, never mutated, so failed branches cannot corrupt shared
structure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

_var_ids = itertools.count(1)


class Var:
    """A logic variable. Identity is the variable; `hint` is only a name."""

    __slots__ = ("id", "hint")

    def __init__(self, hint: str = "_"):
        self.id = next(_var_ids)
        self.hint = hint

    def __repr__(self) -> str:
        return f"{self.hint}#{self.id}"


Binds = Mapping[Var, object]

EMPTY_BINDS: Binds = {}


@dataclass(frozen=True)
class FeatureTerm:
    """A backbone symbol with a sorted tuple of (feature, value) pairs."""

    backbone: str
    feats: tuple[tuple[str, object], ...] = ()

    def __init__(self, backbone: str, feats: Iterable[tuple[str, object]] = ()):
        object.__setattr__(self, "backbone", backbone)
        object.__setattr__(self, "feats", tuple(sorted(feats, key=lambda fv: fv[0])))

    def get(self, name: str) -> object | None:
        for fname, fval in self.feats:
            if fname == name:
                return fval
        return None

    def feature_names(self) -> tuple[str, ...]:
        return tuple(fname for fname, _ in self.feats)

    def __repr__(self) -> str:
        if not self.feats:
            return f"{self.backbone}()"
        inner = ",".join(f"{n}={v!r}" for n, v in self.feats)
        return f"{self.backbone}({inner})"


def walk(value: object, binds: Binds) -> object:
    """Chase variable bindings until a non-variable or a free variable."""
    while isinstance(value, Var):
        nxt = binds.get(value)
        if nxt is None:
            return value
        value = nxt
    return value


def occurs(var: Var, value: object, binds: Binds) -> bool:
    value = walk(value, binds)
    if isinstance(value, Var):
        return value is var
    if isinstance(value, FeatureTerm):
        return any(occurs(var, fval, binds) for _, fval in value.feats)
    return False


def unify_values(a: object, b: object, binds: Binds) -> Binds | None:
    """Unify two values under `binds`; return extended binds or None."""
    a = walk(a, binds)
    b = walk(b, binds)
    if a is b:
        return binds
    if isinstance(a, Var):
        if occurs(a, b, binds):
            return None
        return {**binds, a: b}
    if isinstance(b, Var):
        if occurs(b, a, binds):
            return None
        return {**binds, b: a}
    if isinstance(a, str) and isinstance(b, str):
        return binds if a == b else None
    if isinstance(a, FeatureTerm) and isinstance(b, FeatureTerm):
        if a.backbone != b.backbone:
            return None
        bmap = dict(b.feats)
        for name, aval in a.feats:
            if name in bmap:
                binds = unify_values(aval, bmap[name], binds)
                if binds is None:
                    return None
        return binds
    return None


def resolve(value: object, binds: Binds) -> object:
    """Substitute bindings throughout, leaving free variables in place."""
    value = walk(value, binds)
    if isinstance(value, FeatureTerm):
        return FeatureTerm(
            value.backbone,
            tuple((n, resolve(v, binds)) for n, v in value.feats),
        )
    return value


def _merge_feats(a: FeatureTerm, b: FeatureTerm) -> FeatureTerm:
    # union of feature sets; on shared names either side works post-unify,
    # a's value is kept
    merged = dict(b.feats)
    merged.update(dict(a.feats))
    return FeatureTerm(a.backbone, tuple(merged.items()))


def unify(a: FeatureTerm, b: FeatureTerm, binds: Binds = EMPTY_BINDS) -> tuple[FeatureTerm, Binds] | None:
    """Unify two categories; return (result term, extended binds) or None.

    The result carries the union of both terms' features with bindings
    applied, so information from either side is preserved.
    """
    new_binds = unify_values(a, b, binds)
    if new_binds is None:
        return None
    merged = _merge_feats(a, b)
    return resolve(merged, new_binds), new_binds


def _match(general: object, specific: object, sigma: dict[Var, object]) -> bool:
    # one-way matcher: variables in `general` may map to pieces of
    # `specific`, consistently; `specific` is treated as ground structure
    if isinstance(general, Var):
        if general in sigma:
            return _equal(sigma[general], specific)
        sigma[general] = specific
        return True
    if isinstance(general, str):
        return isinstance(specific, str) and general == specific
    if isinstance(general, FeatureTerm):
        if not isinstance(specific, FeatureTerm) or general.backbone != specific.backbone:
            return False
        smap = dict(specific.feats)
        for name, gval in general.feats:
            if name not in smap:
                return False
            if not _match(gval, smap[name], sigma):
                return False
        return True
    return False


def _equal(a: object, b: object) -> bool:
    # structural equality with variable identity
    if isinstance(a, Var) or isinstance(b, Var):
        return a is b
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, FeatureTerm) and isinstance(b, FeatureTerm):
        if a.backbone != b.backbone or len(a.feats) != len(b.feats):
            return False
        return all(
            na == nb and _equal(va, vb)
            for (na, va), (nb, vb) in zip(a.feats, b.feats)
        )
    return False


def subsumes(general: FeatureTerm, specific: FeatureTerm) -> bool:
    """True if `general` is at least as general as `specific`.

    There must be a consistent substitution of general's variables that
    turns it into a part of specific (specific may carry extra features).
    """
    return _match(general, specific, {})


def variants(a: FeatureTerm, b: FeatureTerm) -> bool:
    """True if the terms are equal up to renaming of variables."""
    return subsumes(a, b) and subsumes(b, a)


def refresh(value: object, mapping: dict[Var, Var]) -> object:
    """Copy a value with fresh variables; `mapping` is shared across calls
    so variables shared between values stay shared between copies."""
    if isinstance(value, Var):
        got = mapping.get(value)
        if got is None:
            got = Var(value.hint)
            mapping[value] = got
        return got
    if isinstance(value, FeatureTerm):
        return FeatureTerm(
            value.backbone,
            tuple((n, refresh(v, mapping)) for n, v in value.feats),
        )
    return value


class Restrictor:
    """Keeps, per backbone, only the declared feature paths of a term.

    `trees` maps a backbone symbol to a nested path tree; an empty dict
    leaf means "keep this value whole". Backbones without an entry are
    restricted to the bare backbone.
    """

    def __init__(self, trees: Mapping[str, dict] | None = None):
        self.trees = dict(trees or {})

    @staticmethod
    def from_paths(paths: Iterable[tuple[str, tuple[str, ...]]]) -> "Restrictor":
        trees: dict[str, dict] = {}
        for backbone, path in paths:
            node = trees.setdefault(backbone, {})
            for step in path:
                node = node.setdefault(step, {})
        return Restrictor(trees)

    def restrict(self, term: FeatureTerm) -> FeatureTerm:
        tree = self.trees.get(term.backbone)
        if not tree:
            return FeatureTerm(term.backbone)
        return self._apply(term, tree)

    def _apply(self, term: FeatureTerm, tree: dict) -> FeatureTerm:
        kept: list[tuple[str, object]] = []
        for name, val in term.feats:
            sub = tree.get(name)
            if sub is None:
                continue
            if sub and isinstance(val, FeatureTerm):
                val = self._apply(val, sub)
            kept.append((name, val))
        return FeatureTerm(term.backbone, tuple(kept))


def canonical(value: object, names: dict[Var, str] | None = None) -> str:
    """Render a value with variables numbered in first-occurrence order.

    Two terms are alphabetic variants exactly when their canonical
    renders are equal, so this string doubles as a variant-class key.
    """
    if names is None:
        names = {}
    return _canon(value, names)


def _canon(value: object, names: dict[Var, str]) -> str:
    if isinstance(value, Var):
        got = names.get(value)
        if got is None:
            got = f"_{len(names) + 1}"
            names[value] = got
        return got
    if isinstance(value, str):
        return value
    if isinstance(value, FeatureTerm):
        if not value.feats:
            return f"{value.backbone}()"
        inner = ",".join(f"{n}={_canon(v, names)}" for n, v in value.feats)
        return f"{value.backbone}({inner})"
    return repr(value)


def canonical_seq(values: Iterable[object]) -> str:
    """Canonical render of a sequence under one shared variable numbering."""
    names: dict[Var, str] = {}
    return " ".join(_canon(v, names) for v in values)


def seq_subsumes(general: Iterable[FeatureTerm], specific: Iterable[FeatureTerm]) -> bool:
    """One-way subsumption over equal-length sequences with one shared
    substitution (variables shared across elements must map consistently)."""
    gen = list(general)
    spc = list(specific)
    if len(gen) != len(spc):
        return False
    sigma: dict[Var, object] = {}
    return all(_match(g, s, sigma) for g, s in zip(gen, spc))


def iter_vars(value: object) -> Iterator[Var]:
    """Yield each variable occurrence in preorder (with repeats)."""
    if isinstance(value, Var):
        yield value
    elif isinstance(value, FeatureTerm):
        for _, v in value.feats:
            yield from iter_vars(v)

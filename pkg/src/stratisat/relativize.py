"""Relativized interpretations and the small-universe construction.

Given a model ``M`` of a normalized conjunction, ``build_universe`` picks
a subset ``D*`` of its domain and ``relativize`` squeezes ``M`` onto it.
The squeezed interpretation still satisfies the conjunction and its size
never exceeds ``domain_bound``; that bound is what makes the solver's
search over domain sizes finite.

Relativization with respect to ``D*``, an anchor ``d*`` in ``D*``, a set
``V0'`` of individual variables, a set ``V1'`` of set variables and a
positive ``l``:

* individuals: ``x -> Mx`` if ``Mx`` is in ``D*``, else ``d*``;
* sets:        ``X -> MX & D*``;
* collections: inside ``pow(D*)``, a subset that is the image of some
  ``X`` in ``V1'`` belongs to ``A`` iff ``MX`` belongs to ``MA``; a subset
  of size at most ``l`` built from images of ``V0'`` belongs to ``A`` iff
  it already belongs to ``MA``; any other subset of ``D*`` keeps its
  ``MA`` membership.

The result is re-labelled onto ``0..|D*|-1`` in increasing order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .normalize import NormalizedConjunction
from .semantics import Interpretation, all_subsets, evaluate, update
from .syntax import Forall0, Sort, propositional_components, substitute1


@dataclass(frozen=True)
class RelativizationParams:
    dstar: frozenset
    anchor: int | None = None  # defaults to min(dstar)
    v0prime: frozenset = frozenset()
    v1prime: frozenset = frozenset()
    l: int = 1

    def __post_init__(self):
        object.__setattr__(self, "dstar", frozenset(self.dstar))
        object.__setattr__(self, "v0prime", frozenset(self.v0prime))
        object.__setattr__(self, "v1prime", frozenset(self.v1prime))
        if not self.dstar:
            raise ValueError("D* must be nonempty")
        if self.anchor is None:
            object.__setattr__(self, "anchor", min(self.dstar))
        if self.anchor not in self.dstar:
            raise ValueError("the anchor must lie in D*")
        if self.l < 1:
            raise ValueError("l must be positive")
        if any(v.sort != Sort.INDIVIDUAL for v in self.v0prime):
            raise ValueError("V0' must contain individual variables only")
        if any(v.sort != Sort.SET for v in self.v1prime):
            raise ValueError("V1' must contain set variables only")


def element_map(dstar) -> dict:
    """Original element -> position in ``sorted(dstar)``."""
    return {d: i for i, d in enumerate(sorted(dstar))}


def small_subsets(elements, l: int) -> set:
    """All subsets of ``elements`` with at most ``l`` members, the empty set included."""
    elements = sorted(set(elements))
    out = set()
    for k in range(0, min(l, len(elements)) + 1):
        out.update(frozenset(c) for c in itertools.combinations(elements, k))
    return out


def relativize_labels(M: Interpretation, p: RelativizationParams):
    """The relativized assignment, still labelled by elements of ``M``'s domain."""
    if any(not 0 <= d < M.m for d in p.dstar):
        raise ValueError("D* must be a subset of the domain")
    missing = [v.name for v in p.v0prime if v not in M.assign0] + [v.name for v in p.v1prime if v not in M.assign1]
    if missing:
        raise ValueError(f"V0'/V1' variables not assigned by M: {', '.join(sorted(missing))}")
    D = p.dstar
    a0 = {x: (u if u in D else p.anchor) for x, u in M.assign0.items()}
    a1 = {X: frozenset(s & D) for X, s in M.assign1.items()}
    images = {a1[X] for X in p.v1prime}
    small = small_subsets((a0[x] for x in p.v0prime), p.l)
    a2 = {}
    for A, coll in M.assign2.items():
        kept = {s for s in coll if s <= D} - (images | small)
        via_sets = {a1[X] for X in p.v1prime if M.assign1[X] in coll}
        a2[A] = frozenset(kept | via_sets | (small & coll))
    return a0, a1, a2


def relativize(M: Interpretation, p: RelativizationParams) -> Interpretation:
    a0, a1, a2 = relativize_labels(M, p)
    e = element_map(p.dstar)
    return Interpretation(
        len(p.dstar),
        {x: e[u] for x, u in a0.items()},
        {X: frozenset(e[u] for u in s) for X, s in a1.items()},
        {A: frozenset(frozenset(e[u] for u in s) for s in c) for A, c in a2.items()},
    )


def distinguish(sets) -> frozenset:
    """A set of points separating every pair of unequal input sets.

    Greedy class splitting: group the distinct sets by their trace on the
    points chosen so far; while a group holds two different sets, add the
    smallest element of their symmetric difference.  Each point splits a
    group, so at most (number of distinct sets - 1) points are chosen.
    """
    distinct = sorted({frozenset(s) for s in sets}, key=lambda s: (len(s), sorted(s)))
    chosen: set = set()
    while True:
        groups: dict = {}
        for s in distinct:
            groups.setdefault(frozenset(s & chosen), []).append(s)
        clash = next((g for g in groups.values() if len(g) > 1), None)
        if clash is None:
            return frozenset(chosen)
        chosen.add(min(clash[0] ^ clash[1]))


def cardinality_points(sets, l: int) -> frozenset:
    """The ``min(l+1, |S|)`` smallest elements of every input set."""
    out = set()
    for s in {frozenset(s) for s in sets}:
        out.update(sorted(s)[: l + 1])
    return frozenset(out)


@dataclass
class Witness:
    component: object
    arguments: tuple
    elements: tuple

    def to_json(self) -> dict:
        return {
            "component": str(self.component),
            "arguments": [X.name for X in self.arguments],
            "elements": list(self.elements),
        }


@dataclass
class UniverseReport:
    dstar: frozenset
    base: frozenset
    d0: frozenset
    d1: frozenset
    witnesses: list = field(default_factory=list)
    bound: int = 0
    padded: bool = False  # D* would have been empty; element 0 was added

    def params(self, nc: NormalizedConjunction) -> RelativizationParams:
        fv = nc.free_variables()
        return RelativizationParams(self.dstar, None, fv.sort0, fv.sort1, nc.enum_bound())

    def to_json(self) -> dict:
        return {
            "dstar": sorted(self.dstar),
            "parts": {
                "base": sorted(self.base),
                "d0": sorted(self.d0),
                "d1": sorted(self.d1),
                "witnesses": [w.to_json() for w in self.witnesses],
            },
            "bound": self.bound,
            "padded": self.padded,
        }


def _first_falsifier(M: Interpretation, universal: Forall0) -> tuple:
    for us in itertools.product(range(M.m), repeat=len(universal.vars)):
        if not evaluate(update(M, zip(universal.vars, us)), universal.body):
            return us
    raise AssertionError("no falsifying tuple for a false universal")


def build_universe(M: Interpretation, nc: NormalizedConjunction) -> UniverseReport:
    """Choose ``D*`` for a model ``M`` of ``nc``.

    Starts from the values of the free individual variables, a
    distinguishing set for the free set variables and enough points of each
    set to tell its size up to ``l+1``.  Then, for every level-0 universal
    inside a level-1 universal and every way of plugging free set variables
    in for the bound ones that makes the universal false in ``M``, the
    lexicographically first falsifying tuple is added.
    """
    fv = nc.free_variables()
    v0 = sorted(fv.sort0)
    v1 = sorted(fv.sort1)
    l = nc.enum_bound()
    base = frozenset(M.value(x) for x in v0)
    set_values = [M.value(X) for X in v1]
    d0 = distinguish(set_values)
    d1 = cardinality_points(set_values, l)
    dstar = set(base | d0 | d1)
    witnesses = []
    for lit in nc.literals3:
        for comp in propositional_components(lit.body):
            if not isinstance(comp, Forall0):
                continue
            for args in itertools.product(v1, repeat=len(lit.vars)):
                inst = substitute1(comp, zip(lit.vars, args))
                if evaluate(M, inst):
                    continue
                us = _first_falsifier(M, inst)
                witnesses.append(Witness(comp, args, us))
                dstar.update(us)
    padded = not dstar
    if padded:
        dstar.add(0)
    return UniverseReport(frozenset(dstar), base, d0, d1, witnesses, domain_bound(nc), padded)


def domain_bound(nc: NormalizedConjunction) -> int:
    """Size bound for the relativized model of ``nc``.

    ``|V0| + (|V1|-1) + (l+1)|V1| + N * |V1|**M * |Phi|`` over the free
    variables, where ``Phi`` is the set of distinct propositional components
    of the level-1 matrices, ``M`` the largest level-1 quantifier block and
    ``N`` the largest level-0 block inside one.  Negative parts are clamped
    to 0, the total to 1; without level-0 blocks inside level-1 ones the
    last term is 0.
    """
    fv = nc.free_variables()
    n0, n1 = len(fv.sort0), len(fv.sort1)
    l = nc.enum_bound()
    phi = nc.components()
    big_m = max((len(lit.vars) for lit in nc.literals3), default=0)
    big_n = max((len(c.vars) for c in phi if isinstance(c, Forall0)), default=0)
    tail = big_n * n1 ** big_m * len(phi) if phi and big_n else 0
    return max(1, n0 + max(0, n1 - 1) + (l + 1) * n1 + tail)


def extend_to_conjunction(M: Interpretation, nc: NormalizedConjunction) -> Interpretation | None:
    """Extend ``M`` to the free variables ``nc`` adds (witnesses of negated
    universals) so that it satisfies ``nc``; None if no extension does."""
    need = [v for v in sorted(nc.free_variables().all(), key=lambda v: (v.sort, v.name)) if v not in M.variables()]
    if any(v.sort == Sort.COLLECTION for v in need):
        raise ValueError("cannot extend a model with collection variables")
    ranges = [range(M.m) if v.sort == Sort.INDIVIDUAL else all_subsets(M.m) for v in need]
    f = nc.formula()
    for values in itertools.product(*ranges):
        N = update(M, zip(need, values))
        if evaluate(N, f):
            return N
    return None


def relativized_model(M: Interpretation, nc: NormalizedConjunction):
    """(report, M*) for a model ``M`` of ``nc``."""
    rep = build_universe(M, nc)
    return rep, relativize(M, rep.params(nc))


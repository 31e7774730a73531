"""Abstract syntax of three-sorted quantified formulae.

Variables come in three sorts: individuals (sort 0), sets of individuals
(sort 1) and collections of sets (sort 2).  Formulae are immutable trees
built from six atom shapes, the five binary/unary connectives, and two
kinds of universal quantifier blocks:

* ``Forall0`` binds individual variables over a quantifier-free matrix of
  level-0 atoms;
* ``Forall1`` binds set variables over a matrix that may contain level-0
  universals but no further set quantifiers.

Existential quantification is sugar: ``exists0(vs, f)`` builds
``Not(Forall0(vs, Not(f)))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Iterator, NamedTuple


class Sort(IntEnum):
    INDIVIDUAL = 0
    SET = 1
    COLLECTION = 2


@dataclass(frozen=True, order=True)
class Var:
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name


def var0(name: str) -> Var:
    return Var(name, Sort.INDIVIDUAL)


def var1(name: str) -> Var:
    return Var(name, Sort.SET)


def var2(name: str) -> Var:
    return Var(name, Sort.COLLECTION)


def vars0(names: str) -> tuple[Var, ...]:
    return tuple(var0(n) for n in names.split())


def vars1(names: str) -> tuple[Var, ...]:
    return tuple(var1(n) for n in names.split())


def vars2(names: str) -> tuple[Var, ...]:
    return tuple(var2(n) for n in names.split())


def _need(v: Var, sort: Sort, where: str) -> None:
    if not isinstance(v, Var):
        raise TypeError(f"{where}: expected a variable, got {v!r}")
    if v.sort != sort:
        raise ValueError(f"{where}: {v.name} has sort {int(v.sort)}, expected {int(sort)}")


class Formula:
    """Base class; supports ``&``, ``|`` and ``~`` as construction sugar."""

    __slots__ = ()

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __str__(self) -> str:
        from .parser import render_formula

        return render_formula(self)


class Atom(Formula):
    __slots__ = ()
    level = 0


# ----------------------------------------------------------------------------
# atoms


@dataclass(frozen=True)
class Eq0(Atom):
    left: Var
    right: Var

    def __post_init__(self):
        _need(self.left, Sort.INDIVIDUAL, "x = y")
        _need(self.right, Sort.INDIVIDUAL, "x = y")


@dataclass(frozen=True)
class Mem01(Atom):
    member: Var
    container: Var

    def __post_init__(self):
        _need(self.member, Sort.INDIVIDUAL, "x in X")
        _need(self.container, Sort.SET, "x in X")


@dataclass(frozen=True)
class EnumEq(Atom):
    members: tuple[Var, ...]
    target: Var

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("finite enumeration must list at least one variable")
        for v in self.members:
            _need(v, Sort.INDIVIDUAL, "{...} = X")
        _need(self.target, Sort.SET, "{...} = X")

    @property
    def k(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class EnumMem(Atom):
    members: tuple[Var, ...]
    container: Var

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("finite enumeration must list at least one variable")
        for v in self.members:
            _need(v, Sort.INDIVIDUAL, "{...} in A")
        _need(self.container, Sort.COLLECTION, "{...} in A")

    @property
    def k(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class Eq1(Atom):
    left: Var
    right: Var
    level = 1

    def __post_init__(self):
        _need(self.left, Sort.SET, "X = Y")
        _need(self.right, Sort.SET, "X = Y")


@dataclass(frozen=True)
class Mem12(Atom):
    member: Var
    container: Var
    level = 1

    def __post_init__(self):
        _need(self.member, Sort.SET, "X in A")
        _need(self.container, Sort.COLLECTION, "X in A")


ATOM_TYPES = (Eq0, Mem01, EnumEq, EnumMem, Eq1, Mem12)
LEVEL0_ATOMS = (Eq0, Mem01, EnumEq, EnumMem)


# ----------------------------------------------------------------------------
# connectives and quantifiers


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


BINARY = (And, Or, Implies, Iff)


def _level0_matrix(f: Formula) -> bool:
    if isinstance(f, LEVEL0_ATOMS):
        return True
    if isinstance(f, Not):
        return _level0_matrix(f.body)
    if isinstance(f, BINARY):
        return _level0_matrix(f.left) and _level0_matrix(f.right)
    return False


def _contains_forall1(f: Formula) -> bool:
    return any(isinstance(g, Forall1) for g in subformulas(f))


@dataclass(frozen=True)
class Forall0(Formula):
    vars: tuple[Var, ...]
    body: Formula

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("empty quantifier list")
        for v in self.vars:
            _need(v, Sort.INDIVIDUAL, "forall (level 0)")
        if not _level0_matrix(self.body):
            raise ValueError("level-0 universal must range over a quantifier-free matrix of level-0 atoms")


@dataclass(frozen=True)
class Forall1(Formula):
    vars: tuple[Var, ...]
    body: Formula

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        if not self.vars:
            raise ValueError("empty quantifier list")
        for v in self.vars:
            _need(v, Sort.SET, "forall (level 1)")
        if _contains_forall1(self.body):
            raise ValueError("level-1 universal may not contain another level-1 universal")


QUANTIFIERS = (Forall0, Forall1)


# ----------------------------------------------------------------------------
# builders


def conj(*fs: Formula) -> Formula:
    """Left-nested conjunction of one or more formulae."""
    if not fs:
        raise ValueError("empty conjunction")
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        raise ValueError("empty disjunction")
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def exists0(vs: Iterable[Var], body: Formula) -> Formula:
    return Not(Forall0(tuple(vs), Not(body)))


def exists1(vs: Iterable[Var], body: Formula) -> Formula:
    return Not(Forall1(tuple(vs), Not(body)))


def neq0(x: Var, y: Var) -> Formula:
    return Not(Eq0(x, y))


def conjuncts(f: Formula) -> list[Formula]:
    """Flatten a (possibly nested) conjunction into its conjuncts."""
    if isinstance(f, And):
        return conjuncts(f.left) + conjuncts(f.right)
    return [f]


# ----------------------------------------------------------------------------
# traversal


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.body,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal including ``f`` itself."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def atom_vars(a: Atom) -> tuple[Var, ...]:
    if isinstance(a, (Eq0, Eq1)):
        return (a.left, a.right)
    if isinstance(a, (Mem01, Mem12)):
        return (a.member, a.container)
    if isinstance(a, EnumEq):
        return a.members + (a.target,)
    if isinstance(a, EnumMem):
        return a.members + (a.container,)
    raise TypeError(a)


def all_variables(f: Formula) -> set[Var]:
    """Every variable occurring in ``f``, bound or free."""
    out: set[Var] = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.update(atom_vars(g))
        elif isinstance(g, QUANTIFIERS):
            out.update(g.vars)
    return out


def bound_variables(f: Formula) -> set[Var]:
    out: set[Var] = set()
    for g in subformulas(f):
        if isinstance(g, QUANTIFIERS):
            out.update(g.vars)
    return out


class FreeVariables(NamedTuple):
    sort0: frozenset
    sort1: frozenset
    sort2: frozenset

    def all(self) -> frozenset:
        return self.sort0 | self.sort1 | self.sort2

    def by_sort(self, sort: int) -> frozenset:
        return self[int(sort)]


def _free(f: Formula, bound: frozenset, out: set) -> None:
    if isinstance(f, Atom):
        out.update(v for v in atom_vars(f) if v not in bound)
    elif isinstance(f, QUANTIFIERS):
        _free(f.body, bound | frozenset(f.vars), out)
    else:
        for c in children(f):
            _free(c, bound, out)


def free_variables(f: Formula) -> FreeVariables:
    """Variables with at least one free occurrence, split by sort."""
    out: set[Var] = set()
    _free(f, frozenset(), out)
    return FreeVariables(
        frozenset(v for v in out if v.sort == Sort.INDIVIDUAL),
        frozenset(v for v in out if v.sort == Sort.SET),
        frozenset(v for v in out if v.sort == Sort.COLLECTION),
    )


def free_var_list(f: Formula) -> list[Var]:
    """Free variables in canonical order: by sort, then by name."""
    return sorted(free_variables(f).all(), key=lambda v: (v.sort, v.name))


# ----------------------------------------------------------------------------
# renaming and substitution


def _rename_atom(a: Atom, mapping) -> Atom:
    g = lambda v: mapping.get(v, v)  # noqa: E731
    if isinstance(a, Eq0):
        return Eq0(g(a.left), g(a.right))
    if isinstance(a, Mem01):
        return Mem01(g(a.member), g(a.container))
    if isinstance(a, EnumEq):
        return EnumEq(tuple(g(v) for v in a.members), g(a.target))
    if isinstance(a, EnumMem):
        return EnumMem(tuple(g(v) for v in a.members), g(a.container))
    if isinstance(a, Eq1):
        return Eq1(g(a.left), g(a.right))
    if isinstance(a, Mem12):
        return Mem12(g(a.member), g(a.container))
    raise TypeError(a)


def rebuild(f: Formula, kids: tuple) -> Formula:
    if isinstance(f, Not):
        return Not(kids[0])
    if isinstance(f, BINARY):
        return type(f)(kids[0], kids[1])
    if isinstance(f, QUANTIFIERS):
        return type(f)(f.vars, kids[0])
    raise TypeError(f)


def rename_free(f: Formula, mapping: dict[Var, Var]) -> Formula:
    """Replace free occurrences according to ``mapping`` (sort-preserving).

    Raises ValueError if a replacement would be captured by a binder.
    """
    for k, v in mapping.items():
        if k.sort != v.sort:
            raise ValueError(f"cannot rename {k.name} to a variable of another sort")
    return _subst(f, dict(mapping))


def _subst(f: Formula, mapping: dict) -> Formula:
    if not mapping:
        return f
    if isinstance(f, Atom):
        return _rename_atom(f, mapping)
    if isinstance(f, QUANTIFIERS):
        inner = {k: v for k, v in mapping.items() if k not in f.vars}
        if inner and any(v in f.vars for v in inner.values()):
            if any(k in free_variables(f.body).all() for k, v in inner.items() if v in f.vars):
                raise ValueError("substitution would capture a bound variable; rename apart first")
        return type(f)(f.vars, _subst(f.body, inner))
    return rebuild(f, tuple(_subst(c, mapping) for c in children(f)))


def substitute1(f: Formula, pairs) -> Formula:
    """Simultaneously replace free occurrences of set variables.

    ``pairs`` is an iterable of ``(Z, X)`` with pairwise distinct ``Z``.
    Bound occurrences are left alone.
    """
    pairs = list(pairs)
    mapping: dict[Var, Var] = {}
    for z, x in pairs:
        _need(z, Sort.SET, "substitute1")
        _need(x, Sort.SET, "substitute1")
        if z in mapping:
            raise ValueError(f"{z.name} substituted twice")
        mapping[z] = x
    return _subst(f, mapping)


def fresh_name(base: str, used: set[str]) -> str:
    stem = base.rstrip("0123456789_") or base
    for i in itertools.count(1):
        cand = f"{stem}_{i}"
        if cand not in used:
            used.add(cand)
            return cand
    raise AssertionError  # pragma: no cover


def rename_apart(f: Formula, avoid: Iterable[str] = ()) -> Formula:
    """Alpha-rename so each bound variable is bound by exactly one quantifier
    and no variable occurs both bound and free.

    Formulae that already satisfy this come back unchanged.
    """
    used = {v.name for v in all_variables(f)} | set(avoid)
    free_names = {v.name for v in free_variables(f).all()} | set(avoid)
    seen: set[str] = set()

    def go(g: Formula) -> Formula:
        if isinstance(g, Atom):
            return g
        if isinstance(g, QUANTIFIERS):
            mapping = {}
            new_vars = []
            for v in g.vars:
                if v.name in free_names or v.name in seen:
                    nv = Var(fresh_name(v.name, used), v.sort)
                    mapping[v] = nv
                    v = nv
                seen.add(v.name)
                new_vars.append(v)
            body = _subst(g.body, mapping) if mapping else g.body
            return type(g)(tuple(new_vars), go(body))
        return rebuild(g, tuple(go(c) for c in children(g)))

    return go(f)


# ----------------------------------------------------------------------------
# measurements


def enum_bound(f: Formula) -> int:
    """Largest enumeration length in ``f``; 1 if there are none."""
    best = 1
    for g in subformulas(f):
        if isinstance(g, (EnumEq, EnumMem)):
            best = max(best, g.k)
    return best


def formula_length(f: Formula) -> int:
    """Node count: 1 per atom and connective, 1 per quantified variable."""
    n = 0
    for g in subformulas(f):
        if isinstance(g, QUANTIFIERS):
            n += len(g.vars)
        else:
            n += 1
    return n


def is_quantifier_free(f: Formula) -> bool:
    return not any(isinstance(g, QUANTIFIERS) for g in subformulas(f))


def propositional_components(f: Formula) -> list[Formula]:
    """Maximal subformulae that are atoms or quantified formulae, in order."""
    if isinstance(f, (Atom,) + QUANTIFIERS):
        return [f]
    out = []
    for c in children(f):
        out.extend(propositional_components(c))
    return out

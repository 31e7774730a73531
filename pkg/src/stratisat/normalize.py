"""Reduction of arbitrary formulae to normalized conjunctions.

The pipeline: rename bound variables apart, take a DNF in which quantified
subformulae count as atoms, replace each negated universal by its negated
matrix (its bound variables become free), repeat until no negated
universal is left, and sort the literals of each conjunction into

* type I   -- atoms and negated atoms,
* type II  -- level-0 universals,
* type III -- level-1 universals.

The input is satisfiable iff at least one output conjunction is.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ResourceLimit
from .syntax import (
    And,
    Atom,
    Forall0,
    Forall1,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    conj,
    enum_bound,
    free_variables,
    free_var_list,
    propositional_components,
    rename_apart,
)

DEFAULT_DNF_BUDGET = 10_000

Literal = Formula
Conjunction = tuple  # tuple of literals


def negate(lit: Formula) -> Formula:
    return lit.body if isinstance(lit, Not) else Not(lit)


def is_literal(f: Formula) -> bool:
    g = f.body if isinstance(f, Not) else f
    return isinstance(g, (Atom, Forall0, Forall1))


def _add(conj_: Conjunction, lit) -> Conjunction | None:
    """Append ``lit`` unless present; None if it contradicts the conjunction."""
    if lit in conj_:
        return conj_
    if negate(lit) in conj_:
        return None
    return conj_ + (lit,)


def _product(a: list, b: list, budget: int) -> list:
    out = []
    seen = set()
    size = 0
    for c in a:
        for d in b:
            r = c
            for lit in d:
                r = _add(r, lit)
                if r is None:
                    break
            if r is None:
                continue
            key = frozenset(r)
            if key in seen:
                continue
            seen.add(key)
            out.append(r)
            size += len(r)
            if size > budget:
                raise ResourceLimit("dnf", budget, "literal count")
    return out


def _union(a: list, b: list, budget: int) -> list:
    out = list(a)
    seen = {frozenset(c) for c in a}
    size = sum(len(c) for c in a)
    for c in b:
        key = frozenset(c)
        if key not in seen:
            seen.add(key)
            out.append(c)
            size += len(c)
    if size > budget:
        raise ResourceLimit("dnf", budget, "literal count")
    return out


def _dnf(f: Formula, positive: bool, budget: int) -> list:
    if isinstance(f, (Atom, Forall0, Forall1)):
        return [(f if positive else Not(f),)]
    if isinstance(f, Not):
        return _dnf(f.body, not positive, budget)
    if isinstance(f, And):
        if positive:
            return _product(_dnf(f.left, True, budget), _dnf(f.right, True, budget), budget)
        return _union(_dnf(f.left, False, budget), _dnf(f.right, False, budget), budget)
    if isinstance(f, Or):
        if positive:
            return _union(_dnf(f.left, True, budget), _dnf(f.right, True, budget), budget)
        return _product(_dnf(f.left, False, budget), _dnf(f.right, False, budget), budget)
    if isinstance(f, Implies):
        if positive:
            return _union(_dnf(f.left, False, budget), _dnf(f.right, True, budget), budget)
        return _product(_dnf(f.left, True, budget), _dnf(f.right, False, budget), budget)
    if isinstance(f, Iff):
        if positive:
            both = _product(_dnf(f.left, True, budget), _dnf(f.right, True, budget), budget)
            neither = _product(_dnf(f.left, False, budget), _dnf(f.right, False, budget), budget)
        else:
            both = _product(_dnf(f.left, True, budget), _dnf(f.right, False, budget), budget)
            neither = _product(_dnf(f.left, False, budget), _dnf(f.right, True, budget), budget)
        return _union(both, neither, budget)
    raise TypeError(f"not a formula: {f!r}")


def dnf_literals(f: Formula, budget: int = DEFAULT_DNF_BUDGET) -> list[Conjunction]:
    """DNF of ``f`` as a list of literal tuples.

    Quantified subformulae are treated as atoms.  Literals are deduplicated
    within a conjunction and conjunctions containing a complementary pair
    are dropped, so a propositionally unsatisfiable input yields ``[]``.
    """
    return _dnf(f, True, budget)


def to_dnf(f: Formula, budget: int = DEFAULT_DNF_BUDGET) -> list[Formula]:
    return [conj(*c) for c in dnf_literals(f, budget)]


def eliminate_negated_universals(c: Conjunction, budget: int = DEFAULT_DNF_BUDGET) -> list[Conjunction]:
    """Replace every literal ``~forall v . phi`` by the DNF of ``~phi``.

    ``c`` must be renamed apart, so the freed variables are fresh.  Runs to
    a fixpoint: stripping a level-1 universal can expose level-0 ones.
    """
    if isinstance(c, Formula):
        c = tuple(_conjunct_literals(c))
    todo = [tuple(c)]
    done = []
    while todo:
        cur = todo.pop()
        idx = next(
            (i for i, lit in enumerate(cur) if isinstance(lit, Not) and isinstance(lit.body, (Forall0, Forall1))),
            None,
        )
        if idx is None:
            done.append(cur)
            continue
        rest = cur[:idx] + cur[idx + 1:]
        expanded = _product([rest], dnf_literals(Not(cur[idx].body.body), budget), budget)
        # depth-first, keeping the original left-to-right order of results
        todo.extend(reversed(expanded))
    return done


def _conjunct_literals(f: Formula) -> list:
    if isinstance(f, And):
        return _conjunct_literals(f.left) + _conjunct_literals(f.right)
    if not is_literal(f):
        raise ValueError(f"not a conjunction of literals: {f}")
    return [f]


@dataclass(frozen=True)
class NormalizedConjunction:
    literals1: tuple  # quantifier-free literals
    literals2: tuple  # level-0 universals
    literals3: tuple  # level-1 universals

    @property
    def literals(self) -> tuple:
        return self.literals1 + self.literals2 + self.literals3

    def formula(self) -> Formula:
        return conj(*self.literals)

    def free_variables(self):
        return free_variables(self.formula())

    def variables(self) -> list[Var]:
        return free_var_list(self.formula())

    def enum_bound(self) -> int:
        return enum_bound(self.formula())

    def components(self) -> list:
        """Distinct propositional components of the level-1 matrices, in order."""
        seen = []
        for lit in self.literals3:
            for comp in propositional_components(lit.body):
                if comp not in seen:
                    seen.append(comp)
        return seen

    def __str__(self) -> str:
        return str(self.formula())


def classify(c: Conjunction) -> NormalizedConjunction:
    one, two, three = [], [], []
    for lit in c:
        if isinstance(lit, Forall0):
            two.append(lit)
        elif isinstance(lit, Forall1):
            three.append(lit)
        elif isinstance(lit, Atom) or (isinstance(lit, Not) and isinstance(lit.body, Atom)):
            one.append(lit)
        else:
            raise AssertionError(f"literal fits no normalized type: {lit}")
    return NormalizedConjunction(tuple(one), tuple(two), tuple(three))


def normalize(psi: Formula, budget: int = DEFAULT_DNF_BUDGET) -> list[NormalizedConjunction]:
    """Normalized conjunctions whose disjunction is equisatisfiable with ``psi``."""
    psi = rename_apart(psi)
    out = []
    seen = set()
    for c in dnf_literals(psi, budget):
        for d in eliminate_negated_universals(c, budget):
            d = tuple(_conjunct_literals(rename_apart(conj(*d))))
            key = frozenset(d)
            if key in seen:
                continue
            seen.add(key)
            out.append(classify(d))
    return out


def is_normalized(f: Formula) -> bool:
    """True if ``f`` is a conjunction of literals with no negated universal."""
    try:
        lits = _conjunct_literals(f)
    except ValueError:
        return False
    return all(not (isinstance(l, Not) and isinstance(l.body, (Forall0, Forall1))) for l in lits)

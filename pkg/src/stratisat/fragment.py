"""Membership in the restricted fragment.

Every level-0 universal ``forall z1..zn . phi0`` nested inside a level-1
universal ``forall Z1..Zm . phi1`` must be *linked*: the obligation

    ~phi0 -> (z1 in Z1 & ... & zn in Zm)

has to be valid.  Most obligations are discharged by inspection, because
every required membership is already a positive conjunct of ``~phi0``.
The rest are decided by a bounded countermodel search: the obligation is
quantifier-free, so a countermodel exists iff one exists within the
small-model bound for quantifier-free formulae, and adding unused
elements preserves a quantifier-free countermodel, so a single search at
that bound is enough.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ResourceLimit
from .dpll import solve as dpll_solve
from .grounding import ground, reconstruct_model
from .semantics import Interpretation, candidate_count, evaluate, find_model
from .syntax import (
    And,
    Atom,
    Forall0,
    Forall1,
    Formula,
    Implies,
    Mem01,
    Not,
    Or,
    Var,
    atom_vars,
    conj,
    enum_bound,
    free_variables,
    rename_free,
    subformulas,
)

BRUTE_FORCE_LIMIT = 1 << 16


def linkedness_obligation(universal: Forall0, zs) -> Formula:
    """``~phi0 -> AND_i AND_j z_i in Z_j`` for ``universal = forall z.. phi0``."""
    zs = tuple(zs)
    if not zs:
        raise ValueError("linkedness needs at least one set variable")
    memberships = [Mem01(z, Z) for z in universal.vars for Z in zs]
    return Implies(Not(universal.body), conj(*memberships))


def positive_conjuncts(f: Formula) -> set:
    """Atoms that every model of ``f`` must satisfy, read off its shape."""
    if isinstance(f, Atom):
        return {f}
    if isinstance(f, And):
        return positive_conjuncts(f.left) | positive_conjuncts(f.right)
    if isinstance(f, Not):
        g = f.body
        if isinstance(g, Not):
            return positive_conjuncts(g.body)
        if isinstance(g, Implies):
            return positive_conjuncts(g.left) | positive_conjuncts(Not(g.right))
        if isinstance(g, Or):
            return positive_conjuncts(Not(g.left)) | positive_conjuncts(Not(g.right))
    return set()


def obligation_bound(ob: Formula) -> int:
    fv = free_variables(ob)
    return max(1, len(fv.sort0) + (enum_bound(ob) + 2) * len(fv.sort1))


@dataclass
class Obligation:
    universal: Forall0
    zs: tuple
    formula: Formula
    method: str = ""  # "syntactic" | "semantic"
    verdict: str = ""  # "valid" | "invalid" | "resource-limit"
    bound: int = 0
    counterexample: Interpretation | None = None
    detail: str = ""

    def to_json(self) -> dict:
        out = {
            "universal": str(self.universal),
            "set_variables": [z.name for z in self.zs],
            "obligation": str(self.formula),
            "method": self.method,
            "verdict": self.verdict,
        }
        if self.method == "semantic":
            out["bound"] = self.bound
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.to_json()
        if self.detail:
            out["detail"] = self.detail
        return out


@dataclass
class FragmentReport:
    obligations: list = field(default_factory=list)

    @property
    def in_fragment(self) -> bool:
        return all(o.verdict == "valid" for o in self.obligations)

    @property
    def verdict(self) -> str:
        if self.in_fragment:
            return "in-fragment"
        if any(o.verdict == "invalid" for o in self.obligations):
            return "not-in-fragment"
        return "resource-limit"

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "obligations": [o.to_json() for o in self.obligations]}


def _syntactic(universal: Forall0, zs) -> bool:
    needed = {Mem01(z, Z) for z in universal.vars for Z in zs}
    return needed <= positive_conjuncts(Not(universal.body))


def _canonical(f: Formula) -> Formula:
    """Rename variables to positional names so equal obligations share a cache slot."""
    order: list[Var] = []
    for g in subformulas(f):
        if isinstance(g, Atom):
            for v in atom_vars(g):
                if v not in order:
                    order.append(v)
    return rename_free(f, {v: Var(f"v{i}_{int(v.sort)}", v.sort) for i, v in enumerate(order)})


def find_countermodel_upto(ob: Formula, bound: int, *, conflict_budget=None) -> Interpretation | None:
    """A model of ``~ob`` of size at most ``bound`` (smallest found first), or None.

    Small sizes are tried by brute force while that is cheap; the bound
    itself is then settled by grounding.  ``ob`` must be quantifier-free.
    """
    neg = Not(ob)
    fv = sorted(free_variables(ob).all(), key=lambda v: (v.sort, v.name))
    for m in range(1, bound + 1):
        if candidate_count(fv, m) > BRUTE_FORCE_LIMIT:
            break
        M = find_model(neg, m, order=fv, limit=BRUTE_FORCE_LIMIT)
        if M is not None:
            return M
        if m == bound:
            return None
    cnf = ground(neg, bound, variables=fv, symmetry=True, eager_collections=False)
    a = dpll_solve(cnf.clauses, cnf.num_vars, conflict_budget=conflict_budget)
    if a is None:
        return None
    M = reconstruct_model(a, cnf)
    assert evaluate(M, neg), "grounded countermodel failed verification"
    return M


def check_obligation(universal: Forall0, zs, *, cache=None, conflict_budget=None) -> Obligation:
    ob = Obligation(universal, tuple(zs), linkedness_obligation(universal, zs))
    if _syntactic(universal, zs):
        ob.method, ob.verdict = "syntactic", "valid"
        return ob
    ob.method = "semantic"
    ob.bound = obligation_bound(ob.formula)
    # only positive verdicts are cached: a countermodel is named after one
    # particular obligation and would not fit a renamed copy
    key = _canonical(ob.formula) if cache is not None else None
    if key is not None and key in cache:
        ob.verdict = "valid"
        return ob
    try:
        cm = find_countermodel_upto(ob.formula, ob.bound, conflict_budget=conflict_budget)
    except ResourceLimit as e:
        ob.verdict, ob.detail = "resource-limit", str(e)
        return ob
    ob.verdict = "valid" if cm is None else "invalid"
    ob.counterexample = cm
    if key is not None and cm is None:
        cache[key] = True
    return ob


def nested_universals(f: Formula):
    """Yield (level-1 universal, level-0 universal inside it) pairs."""
    for g in subformulas(f):
        if isinstance(g, Forall1):
            for h in subformulas(g.body):
                if isinstance(h, Forall0):
                    yield g, h


def check_fragment(psi: Formula, *, conflict_budget=None, cache=None) -> FragmentReport:
    """Decide every linkedness obligation of ``psi``."""
    if cache is None:
        cache = {}
    report = FragmentReport()
    for outer, inner in nested_universals(psi):
        report.obligations.append(check_obligation(inner, outer.vars, cache=cache, conflict_budget=conflict_budget))
    return report

"""The decision procedure.

``decide`` normalizes the input, and for each normalized conjunction tries
domain sizes ``1..domain_bound`` in increasing order: ground, run DPLL,
and on success read the model back and re-check it against the input
formula with the evaluator.  Every conjunction exhausting its bound means
unsatisfiable.  An exhausted budget is reported as such, never as unsat.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .dpll import solve as dpll_solve
from .errors import NotInFragment, ResourceLimit
from .fragment import FragmentReport, check_fragment
from .grounding import DEFAULT_CLAUSE_BUDGET, export_dimacs, ground, reconstruct_model
from .normalize import DEFAULT_DNF_BUDGET, NormalizedConjunction, normalize
from .relativize import domain_bound
from .semantics import Interpretation, evaluate
from .syntax import Formula, Sort, free_var_list

BUDGET_ENV = "STRATISAT_BUDGET"


@dataclass(frozen=True)
class Budget:
    """Resource limits.  ``conflicts`` bounds each DPLL call."""

    conflicts: int | None = 1_000_000
    clauses: int = DEFAULT_CLAUSE_BUDGET
    dnf_literals: int = DEFAULT_DNF_BUDGET

    @classmethod
    def from_env(cls, default: int | None = None) -> Budget:
        raw = os.environ.get(BUDGET_ENV)
        if raw:
            return cls(conflicts=int(raw))
        if default is not None:
            return cls(conflicts=default)
        return cls()


@dataclass
class SatResult:
    status: str  # "sat" | "unsat" | "resource-limit"
    model: Interpretation | None = None
    m: int | None = None
    conjunction: int | None = None
    stage: str = ""
    budget: object = None
    detail: str = ""
    bounds: list = field(default_factory=list)

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"

    def to_json(self) -> dict:
        out: dict = {"result": self.status}
        if self.status == "sat":
            out["m"] = self.m
            out["model"] = self.model.to_json()
        elif self.status == "resource-limit":
            out["stage"] = self.stage
            out["budget"] = self.budget
            if self.detail:
                out["detail"] = self.detail
        return out


def _complete(M: Interpretation, variables) -> Interpretation:
    """Restrict ``M`` to ``variables``, filling unmentioned ones with 0 / empty."""
    a0, a1, a2 = {}, {}, {}
    for v in variables:
        if v.sort == Sort.INDIVIDUAL:
            a0[v] = M.assign0.get(v, 0)
        elif v.sort == Sort.SET:
            a1[v] = M.assign1.get(v, frozenset())
        else:
            a2[v] = M.assign2.get(v, frozenset())
    return Interpretation(M.m, a0, a1, a2)


def solve_conjunction(nc: NormalizedConjunction, *, max_m=None, budget: Budget = Budget(), symmetry=True,
                      emit_dimacs=None, tag: str = "c0") -> SatResult:
    """Search models of one normalized conjunction up to its domain bound."""
    bound = domain_bound(nc)
    top = bound if max_m is None else min(bound, max_m)
    f = nc.formula()
    variables = free_var_list(f)
    try:
        for m in range(1, top + 1):
            cnf = ground(f, m, variables=variables, symmetry=symmetry, eager_collections=False,
                         clause_budget=budget.clauses)
            if emit_dimacs is not None:
                Path(emit_dimacs).mkdir(parents=True, exist_ok=True)
                (Path(emit_dimacs) / f"{tag}_m{m}.cnf").write_text(export_dimacs(cnf))
            a = dpll_solve(cnf.clauses, cnf.num_vars, conflict_budget=budget.conflicts)
            if a is not None:
                M = reconstruct_model(a, cnf)
                if not evaluate(M, f):
                    raise AssertionError(f"grounded model fails the conjunction at m={m}")
                return SatResult("sat", M, m, bounds=[bound])
    except ResourceLimit as e:
        return SatResult("resource-limit", stage=e.stage, budget=e.budget, detail=str(e), bounds=[bound])
    if top < bound:
        return SatResult("resource-limit", stage="domain-size", budget=top,
                         detail=f"stopped at m={top}, bound is {bound}", bounds=[bound])
    return SatResult("unsat", bounds=[bound])


def _solve_task(args):
    nc, kw = args
    return solve_conjunction(nc, **kw)


def decide(psi: Formula, *, max_m: int | None = None, budget: Budget | None = None, symmetry: bool = True,
           jobs: int = 1, emit_dimacs=None, require_fragment: bool = True,
           fragment_report: FragmentReport | None = None) -> SatResult:
    """Decide satisfiability of ``psi``.

    Raises NotInFragment (carrying the report) when ``psi`` or one of its
    normalized conjunctions has an unlinked level-0 universal, unless
    ``require_fragment`` is False.
    """
    if budget is None:
        budget = Budget()
    cache: dict = {}
    if require_fragment:
        report = fragment_report or check_fragment(psi, conflict_budget=budget.conflicts, cache=cache)
        if not report.in_fragment:
            raise NotInFragment(report)
    try:
        conjs = normalize(psi, budget.dnf_literals)
    except ResourceLimit as e:
        return SatResult("resource-limit", stage=e.stage, budget=e.budget, detail=str(e))
    if require_fragment:
        for nc in conjs:
            report = check_fragment(nc.formula(), conflict_budget=budget.conflicts, cache=cache)
            if not report.in_fragment:
                raise NotInFragment(report)

    kw = dict(max_m=max_m, budget=budget, symmetry=symmetry, emit_dimacs=emit_dimacs)
    tasks = [(nc, dict(kw, tag=f"c{i}")) for i, nc in enumerate(conjs)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_solve_task, tasks))
    else:
        results = []
        for t in tasks:
            results.append(_solve_task(t))
            if results[-1].is_sat:
                break

    bounds = [b for r in results for b in r.bounds]
    variables = free_var_list(psi)
    for i, r in enumerate(results):
        if r.is_sat:
            M = _complete(r.model, variables)
            if not evaluate(M, psi):
                raise AssertionError("model of a normalized conjunction does not satisfy the input")
            return SatResult("sat", M, r.m, conjunction=i, bounds=bounds)
    limited = [r for r in results if r.status == "resource-limit"]
    if limited:
        r = limited[0]
        return SatResult("resource-limit", stage=r.stage, budget=r.budget, detail=r.detail, bounds=bounds)
    return SatResult("unsat", bounds=bounds)


"""Acceptance suite.

One test per criterion; each records a single PASS/FAIL line that is
printed in the terminal summary (and to stdout when run directly with
``python tests/test_acceptance.py``).
"""

import itertools
import math
import random
import time
from pathlib import Path

import pytest

from stratisat import encoders as E
from stratisat.corpus import generate
from stratisat.dpll import check_assignment, solve
from stratisat.fragment import check_fragment
from stratisat.grounding import export_dimacs, import_dimacs
from stratisat.normalize import normalize
from stratisat.parser import parse
from stratisat.relativize import domain_bound, relativized_model
from stratisat.semantics import candidate_count, evaluate, find_model
from stratisat.solver import decide
from stratisat.syntax import Forall1, Implies, Mem12, enum_bound, free_var_list, free_variables, var1, var2

import encoder_checks as K
import relativization_checks
from conftest import ACCEPTANCE_LINES
from oracles import bell_triangle, partition_member, powerset, truth_table_sat

GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parent / "data"

CORPUS_SIZE = 520
CORPUS_SEED = 1
CORPUS_BOUND_CAP = 12
TIME_LIMIT = 300.0


def record(ok: bool, text: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {text}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def brute_force_sat(f, m_max=3) -> bool:
    return any(find_model(f, m) is not None for m in range(1, m_max + 1))


def corpus_filter(f) -> bool:
    """In the fragment, brute-forceable at size 3, and every conjunction bound at most the cap."""
    if candidate_count(free_var_list(f), 3) > 1 << 20:
        return False
    if not check_fragment(f).in_fragment:
        return False
    return max((domain_bound(nc) for nc in normalize(f)), default=1) <= CORPUS_BOUND_CAP


def test_decide_agrees_with_brute_force_on_corpus():
    start = time.perf_counter()
    corpus = generate(CORPUS_SIZE, seed=CORPUS_SEED, accept=corpus_filter)
    disagreements, sat = [], 0
    for f in corpus:
        r = decide(f)
        expected = brute_force_sat(f)
        if r.status not in ("sat", "unsat") or r.is_sat != expected or (r.is_sat and not evaluate(r.model, f)):
            disagreements.append((f, r.status, expected))
        sat += r.is_sat
    elapsed = time.perf_counter() - start
    ok = len(corpus) >= 500 and not disagreements and elapsed <= TIME_LIMIT
    record(ok, f"decide agrees with brute force (m<=3) on {len(corpus)} generated formulas "
               f"({sat} sat, {len(corpus) - sat} unsat, {len(disagreements)} disagreements, {elapsed:.1f}s)")
    assert len(corpus) >= 500
    assert disagreements == []
    assert elapsed <= TIME_LIMIT


def test_relativized_models_satisfy_their_conjunctions():
    checked, bad_model, bad_size = 0, 0, 0
    for f in generate(400, seed=7, accept=lambda f: check_fragment(f).in_fragment):
        for nc in normalize(f):
            g = nc.formula()
            M = next((M for m in (1, 2, 3) if (M := find_model(g, m)) is not None), None)
            if M is None:
                continue
            rep, R = relativized_model(M, nc)
            checked += 1
            bad_model += not evaluate(R, g)
            bad_size += len(rep.dstar) > domain_bound(nc)
    ok = checked >= 200 and bad_model == 0 and bad_size == 0
    record(ok, f"relativized model satisfies the conjunction and fits the size bound "
               f"({checked} satisfiable conjunctions, {bad_model} unsatisfied, {bad_size} oversized)")
    assert checked >= 200 and bad_model == 0 and bad_size == 0


@pytest.mark.parametrize("name", list(relativization_checks.ALL_CHECKS))
def test_relativization_properties(name):
    count, failures = relativization_checks.ALL_CHECKS[name](n=1000)
    ok = count >= 1000 and not failures
    record(ok, f"relativization property: {name} ({count} instances, {len(failures)} failures)")
    assert count >= 1000 and failures == []


def _qf_small_models(seed=3, n=600):
    rows = []
    for f in generate(n, seed=seed, quantifier_free=True):
        fv = free_variables(f)
        v0, v1, l = len(fv.sort0), len(fv.sort1), enum_bound(f)
        bound = v0 + (l + 2) * v1
        if not decide(f).is_sat:
            continue
        strict = bound > 1 and decide(f, max_m=bound - 1).is_sat
        rows.append((f, v0, v1, bound, strict))
    return rows


@pytest.fixture(scope="module")
def qf_rows():
    return _qf_small_models()


@pytest.mark.xfail(strict=True, reason="the strict bound fails for formulas without set variables")
def test_quantifier_free_small_models_strict_bound(qf_rows):
    violations = [r for r in qf_rows if not r[4]]
    no_sets = sum(r[2] == 0 for r in violations)
    record(not violations, f"every satisfiable quantifier-free formula has a model smaller than "
                           f"|V0| + (l+2)|V1| ({len(qf_rows)} formulas, {len(violations)} violations, "
                           f"{no_sets} of them without set variables)")
    assert violations == []


def test_quantifier_free_small_models_corrected_bound(qf_rows):
    bad = []
    for f, v0, v1, bound, strict in qf_rows:
        if v1 >= 1:
            ok = strict
        else:
            ok = decide(f, max_m=max(bound, 1)).is_sat
        if not ok:
            bad.append(f)
    with_sets = sum(r[2] >= 1 for r in qf_rows)
    record(not bad, f"small models for quantifier-free formulas: strictly below |V0| + (l+2)|V1| when a set "
                    f"variable occurs ({with_sets} formulas), at most max(1, |V0|) otherwise "
                    f"({len(qf_rows) - with_sets} formulas); {len(bad)} violations")
    assert bad == []


def test_linkedness():
    Z, A = var1("Z"), var2("A")
    syntactic = []
    for h in (1, 2, 3):
        rep = check_fragment(Forall1((Z,), Implies(Mem12(Z, A), E.build_cardinality("<=", Z, h))))
        syntactic.append(rep.in_fragment and [o.method for o in rep.obligations] == ["syntactic"])
    unlinked = parse((DATA / "unlinked.3lqst").read_text())
    rep = check_fragment(unlinked)
    (ob,) = rep.obligations
    refuted = ob.counterexample is not None and not evaluate(ob.counterexample, ob.formula)
    ok = all(syntactic) and not rep.in_fragment and refuted
    record(ok, f"cardinality bound |Z|<=h linked syntactically for h=1,2,3 ({sum(syntactic)}/3); unlinked "
               f"formula rejected with a refuting model of size {ob.counterexample.m if ob.counterexample else '-'}")
    assert ok


def test_encoders_match_set_oracles():
    bad, cases = 0, 0
    for m in (1, 2, 3):
        for _, f, args, target, oracle in list(K.level0_cases(m)) + list(K.level1_cases(m)):
            bad += K.mismatches(f, args, target, oracle, m)
            cases += 1
        for _, f, Z, pred in K.cardinality_cases():
            bad += K.predicate_mismatches(f, Z, pred, m)
            cases += 1
        for _, f, args, target, oracle, admissible in K.ucp_cases(3):
            bad += K.mismatches(f, args, target, oracle, m, admissible)
            cases += 1
    subsets = [frozenset(s) for s in powerset(range(4))]
    partition_bad, partition_checked = 0, 0
    for n in (1, 2, 3):
        for sets in itertools.product(subsets, repeat=n):
            prod = E.ucp_oracle(sets)
            for S in subsets:
                if len(S) <= 3:
                    partition_checked += 1
                    partition_bad += partition_member(S, sets) != (S in prod)
    ok = bad == 0 and partition_bad == 0
    record(ok, f"set formers, cardinality literals, pow* and the three product encodings match their oracles "
               f"({cases} construct/size pairs, {bad} mismatches); partition characterization of the product "
               f"({partition_checked} checks, {partition_bad} mismatches)")
    assert ok


def test_bell_growth_of_partition_encoding():
    rows = E.length_report(6)
    bells = [b for _, b, _, _ in rows]
    disjuncts = [E.partition_disjuncts(E.build_ucp_partition(*_ucp(n))) for n in range(1, 7)]
    enum_lens = [le for _, _, le, _ in rows]
    affine = len({b - a for a, b in zip(enum_lens, enum_lens[1:])}) == 1
    ratios = [lp / (n * n * b) for n, b, _, lp in rows]
    C = math.ceil(max(ratios))
    lower = all(n * b <= lp for n, b, _, lp in rows)
    upper = all(lp <= C * n * n * b for n, b, _, lp in rows)
    ok = disjuncts == bells == bell_triangle(6) == [1, 2, 5, 15, 52, 203] and affine and lower and upper
    record(ok, f"partition encoding has B_n disjuncts {disjuncts}; enumeration length affine {enum_lens}; "
               f"n*B_n <= length <= C*n^2*B_n with C={C} (ratios "
               f"{', '.join(f'{r:.2f}' for r in ratios)})")
    assert ok


def _ucp(n):
    A, xs = E.ucp_variables(n)
    return (A, *xs)


def test_sat_core():
    rng = random.Random(2024)
    bad = 0
    for _ in range(10_000):
        n = rng.randint(1, 20)
        clauses = [[rng.choice((-1, 1)) * rng.randint(1, n) for _ in range(rng.randint(1, 3))]
                   for _ in range(rng.randint(0, int(4.3 * n) + 1))]
        a = solve(clauses, n)
        if (a is not None) != truth_table_sat(clauses, n) or (a is not None and not check_assignment(clauses, a)):
            bad += 1
    goldens = sorted(GOLDEN.glob("*.cnf"))
    unstable = [p.name for p in goldens if export_dimacs(import_dimacs(p.read_text())) != p.read_text()]
    ok = bad == 0 and not unstable and bool(goldens)
    record(ok, f"DPLL agrees with truth tables on 10000 random CNFs up to 20 variables ({bad} disagreements); "
               f"DIMACS round trip byte-stable on {len(goldens)} golden files ({len(unstable)} unstable)")
    assert bad == 0 and unstable == [] and goldens


if __name__ == "__main__":
    import sys

    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)

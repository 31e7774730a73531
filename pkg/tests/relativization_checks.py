"""Randomized checks of the relativization properties.

Each ``check_*`` draws random instances over domains of size 1..3, tests
the property's hypotheses programmatically, and on instances where they
hold compares the two sides.  It returns ``(instances, failures)`` where
``instances`` counts hypothesis-satisfying draws only; failures are kept
as printable tuples.
"""

from __future__ import annotations

import itertools
import random

from stratisat.relativize import (
    RelativizationParams,
    cardinality_points,
    distinguish,
    element_map,
    relativize,
    relativize_labels,
)
from stratisat.semantics import Interpretation, evaluate, update
from stratisat.syntax import (
    EnumEq,
    EnumMem,
    Eq0,
    Eq1,
    Forall0,
    Forall1,
    Implies,
    Mem01,
    Mem12,
    Not,
    Or,
    Sort,
    Var,
    free_variables,
    subformulas,
    substitute1,
)

XS = (Var("x", Sort.INDIVIDUAL), Var("y", Sort.INDIVIDUAL))
SETS = (Var("X", Sort.SET), Var("Y", Sort.SET))
COLLS = (Var("A", Sort.COLLECTION), Var("B", Sort.COLLECTION))
ZS = (Var("z1", Sort.INDIVIDUAL), Var("z2", Sort.INDIVIDUAL))
BZ = Var("Z", Sort.SET)


def _subset(rng, universe, p=0.5):
    return frozenset(u for u in universe if rng.random() < p)


def random_model(rng, m=None, extra0=(), extra1=()):
    m = m or rng.randint(1, 3)
    dom = range(m)
    subsets = [frozenset(c) for k in range(m + 1) for c in itertools.combinations(dom, k)]
    a0 = {v: rng.randrange(m) for v in XS + tuple(extra0)}
    a1 = {v: _subset(rng, dom) for v in SETS + tuple(extra1)}
    a2 = {A: frozenset(s for s in subsets if rng.random() < 0.4) for A in COLLS}
    return Interpretation(m, a0, a1, a2)


def random_params(rng, M, *, v0_pool=XS, v1_pool=SETS, helpful=0.7, extra_points=()):
    v0p = frozenset(v for v in v0_pool if rng.random() < 0.6)
    v1p = frozenset(v for v in v1_pool if rng.random() < 0.7)
    l = rng.choice((1, 1, 2))
    dstar = set(_subset(rng, range(M.m), 0.4))
    if rng.random() < helpful:
        vals = [M.value(X) for X in v1p]
        dstar |= {M.value(x) for x in XS} | distinguish(vals) | cardinality_points(vals, l) | set(extra_points)
    if not dstar:
        dstar.add(rng.randrange(M.m))
    return RelativizationParams(frozenset(dstar), rng.choice(sorted(dstar)), v0p, v1p, l)


# ----------------------------------------------------------------------------
# hypotheses


def card_ok(M, labels, p) -> bool:
    """M*X = MX when |MX| <= l, else |M*X| > l, for X in V1'."""
    a1 = labels[1]
    for X in p.v1prime:
        mx, sx = M.value(X), a1[X]
        if (sx != mx) if len(mx) <= p.l else (len(sx) <= p.l):
            return False
    return True


def delta_ok(M, p) -> bool:
    """Unequal V1' sets still differ somewhere inside D*."""
    for X, Y in itertools.combinations(sorted(p.v1prime), 2):
        mx, my = M.value(X), M.value(Y)
        if mx != my and not ((mx ^ my) & p.dstar):
            return False
    return True


def individuals_in(M, f, p) -> bool:
    return all(M.value(x) in p.dstar for x in free_variables(f).sort0)


def enums_short(f, l) -> bool:
    return all(g.k <= l for g in subformulas(f) if isinstance(g, (EnumEq, EnumMem)))


def sets_kept(M, labels, f, p) -> bool:
    """M*X = MX for the free set variables of ``f`` outside V1'."""
    a1 = labels[1]
    return all(a1[X] == M.value(X) for X in free_variables(f).sort1 if X not in p.v1prime)


# ----------------------------------------------------------------------------
# random formulas


def level0_atom(rng, s0, s1, l=2):
    k = rng.random()
    enum = tuple(rng.choice(s0) for _ in range(rng.randint(1, l)))
    if k < 0.25:
        return Eq0(rng.choice(s0), rng.choice(s0))
    if k < 0.6:
        return Mem01(rng.choice(s0), rng.choice(s1))
    if k < 0.8:
        return EnumEq(enum, rng.choice(s1))
    return EnumMem(enum, rng.choice(COLLS))


def level1_atom(rng, s1):
    if rng.random() < 0.4:
        return Eq1(rng.choice(s1), rng.choice(s1))
    return Mem12(rng.choice(s1), rng.choice(COLLS))


def boolean(rng, leaf, size):
    if size <= 1:
        f = leaf()
        return Not(f) if rng.random() < 0.3 else f
    left = rng.randint(1, size - 1)
    a, b = boolean(rng, leaf, left), boolean(rng, leaf, size - left)
    op = rng.random()
    if op < 0.4:
        return a & b
    if op < 0.8:
        return Or(a, b)
    return Implies(a, b)


def quantifier_free(rng, l=2):
    def leaf():
        return level0_atom(rng, XS, SETS, l) if rng.random() < 0.6 else level1_atom(rng, SETS)

    return boolean(rng, leaf, rng.randint(1, 4))


def level0_universal(rng, s1, guard=None, l=2):
    zs = ZS[: rng.choice((1, 1, 2))]
    s0 = zs + tuple(v for v in XS if rng.random() < 0.5)
    body = boolean(rng, lambda: level0_atom(rng, s0, s1, l), rng.randint(1, 3))
    if guard is not None:
        body = Implies(conj_mem(zs, guard), body)
    elif rng.random() < 0.6:
        body = Implies(conj_mem(zs, rng.choice(s1)), body)
    return Forall0(zs, body)


def conj_mem(zs, S):
    f = Mem01(zs[0], S)
    for z in zs[1:]:
        f = f & Mem01(z, S)
    return f


def level1_universal(rng, l=2):
    s1 = (BZ,) + SETS

    def leaf():
        r = rng.random()
        if r < 0.4:
            return level0_universal(rng, s1, guard=BZ, l=l)
        if r < 0.7:
            return level1_atom(rng, s1)
        return level0_atom(rng, XS, s1, l)

    return Forall1((BZ,), boolean(rng, leaf, rng.randint(1, 3)))


# ----------------------------------------------------------------------------
# checks


def _run(n, seed, draw, max_draws=None):
    rng = random.Random(seed)
    count, failures, draws = 0, [], 0
    limit = max_draws or 200 * n
    while count < n and draws < limit:
        draws += 1
        out = draw(rng)
        if out is None:
            continue
        count += 1
        if out is not True:
            failures.append(out)
    return count, failures


def check_atoms_level0(n=1000, seed=0):
    """x = y and x in X keep their truth value when their individuals lie in D*."""

    def draw(rng):
        M = random_model(rng)
        p = random_params(rng, M)
        a = Eq0(*rng.sample(XS, 2)) if rng.random() < 0.4 else Mem01(rng.choice(XS), rng.choice(SETS))
        if not individuals_in(M, a, p):
            return None
        Ms = relativize(M, p)
        return True if evaluate(M, a) == evaluate(Ms, a) else (a, M, p)

    return _run(n, seed, draw)


def check_enumerations(n=1000, seed=1):
    """{x..} = X and {x..} in A keep their truth value under the size and D* conditions."""

    def draw(rng):
        M = random_model(rng)
        p = random_params(rng, M)
        enum = tuple(rng.choice(XS) for _ in range(rng.randint(1, p.l)))
        a = EnumEq(enum, rng.choice(SETS)) if rng.random() < 0.5 else EnumMem(enum, rng.choice(COLLS))
        labels = relativize_labels(M, p)
        if not (individuals_in(M, a, p) and card_ok(M, labels, p) and sets_kept(M, labels, a, p)):
            return None
        Ms = relativize(M, p)
        return True if evaluate(M, a) == evaluate(Ms, a) else (a, M, p)

    return _run(n, seed, draw)


def check_atoms_level1(n=1000, seed=2):
    """X = Y and X in A over V1' keep their truth value under the size and separation conditions."""

    def draw(rng):
        M = random_model(rng)
        p = random_params(rng, M)
        if not p.v1prime:
            return None
        pool = sorted(p.v1prime)
        a = Eq1(rng.choice(pool), rng.choice(pool)) if rng.random() < 0.4 else Mem12(rng.choice(pool), rng.choice(COLLS))
        if not (card_ok(M, relativize_labels(M, p), p) and delta_ok(M, p)):
            return None
        Ms = relativize(M, p)
        return True if evaluate(M, a) == evaluate(Ms, a) else (a, M, p)

    return _run(n, seed, draw)


def check_quantifier_free(n=1000, seed=3):
    """Propositional combinations are preserved both ways under all six conditions."""

    def draw(rng):
        M = random_model(rng)
        p = random_params(rng, M)
        f = quantifier_free(rng, l=p.l)
        labels = relativize_labels(M, p)
        level1_sets = {v for g in subformulas(f) if isinstance(g, (Eq1, Mem12)) for v in free_variables(g).sort1}
        if not (individuals_in(M, f, p) and enums_short(f, p.l) and level1_sets <= p.v1prime
                and card_ok(M, labels, p) and delta_ok(M, p) and sets_kept(M, labels, f, p)):
            return None
        Ms = relativize(M, p)
        return True if evaluate(M, f) == evaluate(Ms, f) else (f, M, p)

    return _run(n, seed, draw)


def check_update_individual(n=1000, seed=4):
    """Updating an individual outside V0' with a point of D* commutes with relativization."""
    z = ZS[0]

    def draw(rng):
        M = random_model(rng, extra0=(z,))
        p = random_params(rng, M)
        u = rng.choice(sorted(p.dstar))
        left = relativize(update(M, {z: u}), p)
        right = update(relativize(M, p), {z: element_map(p.dstar)[u]})
        return True if left == right else (M, p, u)

    return _run(n, seed, draw)


def check_update_set(n=1000, seed=5):
    """Updating a set variable outside V1' with a subset of D* that is not a V1' image commutes."""

    def draw(rng):
        M = random_model(rng, extra1=(BZ,))
        p = random_params(rng, M)
        U = _subset(rng, sorted(p.dstar))
        if U in {relativize_labels(M, p)[1][X] for X in p.v1prime}:
            return None
        e = element_map(p.dstar)
        left = relativize(update(M, {BZ: U}), p)
        right = update(relativize(M, p), {BZ: frozenset(e[u] for u in U)})
        return True if left == right else (M, p, U)

    return _run(n, seed, draw)


def level0_universal_hypotheses(M, labels, f, p) -> bool:
    return (card_ok(M, labels, p) and individuals_in(M, f, p) and enums_short(f, p.l)
            and not (set(f.vars) & p.v0prime) and sets_kept(M, labels, f, p))


def check_level0_universal(n=1000, seed=6):
    """A level-0 universal true in M stays true in M* under its four conditions."""

    def draw(rng):
        M = random_model(rng)
        p = random_params(rng, M)
        f = level0_universal(rng, SETS, l=p.l)
        if not evaluate(M, f):
            return None
        if not level0_universal_hypotheses(M, relativize_labels(M, p), f, p):
            return None
        return True if evaluate(relativize(M, p), f) else (f, M, p)

    return _run(n, seed, draw)


def _falsifier(M, univ, points):
    for us in itertools.product(sorted(points), repeat=len(univ.vars)):
        if not evaluate(update(M, zip(univ.vars, us)), univ.body):
            return us
    return None


def witnesses_ok(M, f, p) -> bool:
    """Every failing instance of an inner universal over V1' has a falsifier inside D*."""
    pool = sorted(p.v1prime)
    for g in subformulas(f.body):
        if not isinstance(g, Forall0):
            continue
        for args in itertools.product(pool, repeat=len(f.vars)):
            inst = substitute1(g, zip(f.vars, args))
            if not evaluate(M, inst) and _falsifier(M, inst, p.dstar) is None:
                return False
    return True


def witness_points(M, f, v1p):
    pts = set()
    for g in subformulas(f.body):
        if isinstance(g, Forall0):
            for args in itertools.product(sorted(v1p), repeat=len(f.vars)):
                inst = substitute1(g, zip(f.vars, args))
                if not evaluate(M, inst):
                    pts.update(_falsifier(M, inst, range(M.m)))
    return pts


def check_level1_universal(n=1000, seed=7):
    """A level-1 universal true in M stays true in M* under its eight conditions."""

    def draw(rng):
        M = random_model(rng)
        f = level1_universal(rng, l=rng.choice((1, 2)))
        if not evaluate(M, f):
            return None
        free1 = free_variables(f).sort1
        p = random_params(rng, M, extra_points=witness_points(M, f, SETS))
        if not free1 <= p.v1prime:
            p = RelativizationParams(p.dstar, p.anchor, p.v0prime, p.v1prime | free1, p.l)
        labels = relativize_labels(M, p)
        inner_bound = {z for g in subformulas(f.body) if isinstance(g, Forall0) for z in g.vars}
        ok = (BZ not in p.v1prime and individuals_in(M, f, p) and card_ok(M, labels, p) and delta_ok(M, p)
              and enums_short(f, p.l) and witnesses_ok(M, f, p) and not (inner_bound & p.v0prime))
        if not ok:
            return None
        return True if evaluate(relativize(M, p), f) else (f, M, p)

    return _run(n, seed, draw)


ALL_CHECKS = {
    "individual atoms keep their truth value": check_atoms_level0,
    "enumeration atoms keep their truth value": check_enumerations,
    "set-level atoms keep their truth value": check_atoms_level1,
    "quantifier-free combinations are preserved both ways": check_quantifier_free,
    "individual update commutes with relativization": check_update_individual,
    "set update commutes with relativization": check_update_set,
    "level-0 universals survive relativization": check_level0_universal,
    "level-1 universals survive relativization": check_level1_universal,
}


"""Random formula generators for cross-checking and benchmarking.

Formulas use at most two free variables per sort, quantifier nesting at
most two and enumerations of at most two elements.  Inner level-0
universals are usually built linked to the enclosing set variable (the
body is guarded by ``z in Z``); a small share is left unguarded so the
fragment checker sees both outcomes.
"""

from __future__ import annotations

import random

from .encoders import build_cardinality
from .syntax import (
    EnumEq,
    EnumMem,
    Eq0,
    Eq1,
    Forall0,
    Forall1,
    Formula,
    Implies,
    Mem01,
    Mem12,
    Not,
    Or,
    Sort,
    Var,
    atom_vars,
    conj,
    disj,
)

FREE0 = (Var("x1", Sort.INDIVIDUAL), Var("x2", Sort.INDIVIDUAL))
FREE1 = (Var("X1", Sort.SET), Var("X2", Sort.SET))
FREE2 = (Var("A1", Sort.COLLECTION), Var("A2", Sort.COLLECTION))
Z0 = Var("z", Sort.INDIVIDUAL)
Z1 = Var("Z", Sort.SET)


class FormulaGenerator:
    """Seeded random formulas.  ``p_unlinked`` is the chance an inner universal is left unguarded."""

    def __init__(self, seed=0, *, p_unlinked=0.1, max_pieces=3):
        self.rng = random.Random(seed)
        self.p_unlinked = p_unlinked
        self.max_pieces = max_pieces

    def _pick_vars(self):
        r = self.rng
        self.v0 = FREE0[: r.choice((0, 1, 1, 2))]
        self.v1 = FREE1[: r.choice((1, 1, 2))]
        self.v2 = FREE2[: r.choice((0, 1, 1))]

    def atom(self, s0, s1, s2, level0=False) -> Formula:
        """A random atom over the given individual / set / collection variables."""
        r = self.rng
        kinds = []
        if s0:
            kinds += ["eq0", "mem01"] if s1 else ["eq0"]
            if s1:
                kinds.append("enumeq")
            if s2:
                kinds.append("enummem")
        if s1 and not level0:
            kinds.append("eq1")
            if s2:
                kinds.append("mem12")
        k = r.choice(kinds)
        if k == "eq0":
            return Eq0(*self._two(s0))
        if k == "mem01":
            return Mem01(r.choice(s0), r.choice(s1))
        if k == "enumeq":
            return EnumEq(self._two(s0)[: r.choice((1, 2))], r.choice(s1))
        if k == "enummem":
            return EnumMem(self._two(s0)[: r.choice((1, 2))], r.choice(s2))
        if k == "eq1":
            return Eq1(*self._two(s1))
        return Mem12(r.choice(s1), r.choice(s2))

    def _two(self, pool):
        """Two variables from ``pool``, distinct when possible (mostly)."""
        r = self.rng
        if len(pool) >= 2 and r.random() < 0.9:
            return tuple(r.sample(pool, 2))
        return (r.choice(pool), r.choice(pool))

    def boolean(self, leaf, size: int) -> Formula:
        r = self.rng
        if size <= 1:
            f = leaf()
            return Not(f) if r.random() < 0.35 else f
        left = r.randint(1, size - 1)
        a, b = self.boolean(leaf, left), self.boolean(leaf, size - left)
        op = r.choice(("and", "and", "or", "or", "implies"))
        if op == "and":
            return a & b
        if op == "or":
            return Or(a, b)
        return Implies(a, b)

    def level0_universal(self, s1, s2, set_bound=None) -> Formula:
        """``forall z . phi``; with ``set_bound`` the body is normally guarded by ``z in Z``."""
        r = self.rng
        s0 = (Z0,) + tuple(v for v in self.v0 if r.random() < 0.5)
        body = self.boolean(lambda: self._with(Z0, s0, s1, s2, level0=True), r.choice((1, 2)))
        if set_bound is not None and r.random() >= self.p_unlinked:
            body = Implies(Mem01(Z0, set_bound), body) if r.random() < 0.7 else Or(Not(Mem01(Z0, set_bound)), body)
        return Forall0((Z0,), body)

    def _with(self, v, s0, s1, s2, level0=False):
        """An atom that mentions ``v`` most of the time."""
        for _ in range(4):
            a = self.atom(s0, s1, s2, level0)
            if v in atom_vars(a):
                return a
        return a

    def level1_universal(self) -> Formula:
        r = self.rng
        s1 = (Z1,) + self.v1
        s2 = self.v2

        def leaf():
            roll = r.random()
            if roll < 0.35:
                return self.level0_universal(s1, s2, set_bound=Z1)
            if roll < 0.5:
                return build_cardinality(r.choice(("<=", ">=", "=")), Z1, r.choice((0, 1, 2)), avoid=self.v0)
            return self._with(Z1, self.v0, s1, s2)

        return Forall1((Z1,), self.boolean(leaf, r.choice((1, 2, 3))))

    def piece(self) -> Formula:
        r = self.rng
        roll = r.random()
        if roll < 0.4:
            f = self.boolean(lambda: self.atom(self.v0, self.v1, self.v2), r.choice((1, 2)))
        elif roll < 0.65:
            f = self.level0_universal(self.v1, self.v2)
        else:
            f = self.level1_universal() if self.v2 else self.level0_universal(self.v1, ())
        return Not(f) if r.random() < 0.25 else f

    def formula(self) -> Formula:
        self._pick_vars()
        pieces = [self.piece() for _ in range(self.rng.randint(1, self.max_pieces))]
        return conj(*pieces) if self.rng.random() < 0.75 else disj(*pieces)

    def quantifier_free(self) -> Formula:
        self._pick_vars()
        return self.boolean(lambda: self.atom(self.v0, self.v1, self.v2), self.rng.randint(1, 5))


def generate(n: int, seed=0, *, quantifier_free=False, accept=None, max_tries=None, **kw) -> list[Formula]:
    """``n`` distinct formulas passing ``accept`` (when given)."""
    g = FormulaGenerator(seed, **kw)
    out: list[Formula] = []
    seen = set()
    tries = 0
    limit = max_tries if max_tries is not None else 50 * n
    while len(out) < n and tries < limit:
        tries += 1
        f = g.quantifier_free() if quantifier_free else g.formula()
        if f in seen or (accept is not None and not accept(f)):
            continue
        seen.add(f)
        out.append(f)
    return out

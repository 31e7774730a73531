"""Propositional grounding of formulae over a fixed domain size.

Free variables become rows of propositional variables:

* ``p(x,u)``  -- individual ``x`` denotes element ``u`` (exactly one per row),
* ``q(X,u)``  -- element ``u`` belongs to set ``X``,
* ``r(A,S)``  -- subset ``S`` belongs to collection ``A``.

Quantifiers are expanded over all elements (level 0) or all subsets
(level 1).  The expanded formula is built as a hash-consed circuit with
constant folding, and each gate gets a Tseitin definition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import ResourceLimit
from .semantics import Interpretation, mask_to_set
from .syntax import (
    And,
    EnumEq,
    EnumMem,
    Eq0,
    Eq1,
    Forall0,
    Forall1,
    Formula,
    Iff,
    Implies,
    Mem01,
    Mem12,
    Not,
    Or,
    Sort,
    Var,
    free_var_list,
    subformulas,
)

MAX_M_WITH_SET_QUANTIFIERS = 16
DEFAULT_CLAUSE_BUDGET = 2_000_000


@dataclass
class CnfInstance:
    """Clauses over variables ``1..num_vars`` plus the map back to the formula.

    ``varmap[i]`` is ``("p", x, u)``, ``("q", X, u)``, ``("r", A, mask)`` or
    ``("t",)`` for Tseitin auxiliaries.  ``m`` and ``variables`` are None for
    instances read from plain DIMACS.
    """

    num_vars: int
    clauses: list
    varmap: dict = field(default_factory=dict)
    m: int | None = None
    variables: tuple = ()
    comments: list = field(default_factory=list)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


class _Circuit:
    def __init__(self, clause_budget: int):
        self.num_vars = 0
        self.clauses: list[tuple] = []
        self.varmap: dict[int, tuple] = {}
        self.cache: dict = {}
        self.and_children: dict[int, tuple] = {}
        self.budget = clause_budget

    def new_var(self, tag) -> int:
        self.num_vars += 1
        self.varmap[self.num_vars] = tag
        return self.num_vars

    def clause(self, *lits) -> None:
        self.clauses.append(tuple(lits))
        if len(self.clauses) > self.budget:
            raise ResourceLimit("grounding", self.budget, "clauses")

    def AND(self, lits) -> int | bool:
        out = []
        seen = set()
        for l in lits:
            if l is True:
                continue
            if l is False:
                return False
            if -l in seen:
                return False
            if l not in seen:
                seen.add(l)
                out.append(l)
        if not out:
            return True
        if len(out) == 1:
            return out[0]
        key = ("and", frozenset(out))
        g = self.cache.get(key)
        if g is None:
            g = self.new_var(("t",))
            for l in out:
                self.clause(-g, l)
            self.clause(g, *(-l for l in out))
            self.cache[key] = g
            self.and_children[g] = tuple(out)
        return g

    def OR(self, lits) -> int | bool:
        return self.NOT(self.AND(self.NOT(l) for l in lits))

    @staticmethod
    def NOT(l):
        if l is True:
            return False
        if l is False:
            return True
        return -l

    def IFF(self, a, b) -> int | bool:
        if a is True:
            return b
        if b is True:
            return a
        if a is False:
            return self.NOT(b)
        if b is False:
            return self.NOT(a)
        if a == b:
            return True
        if a == -b:
            return False
        sign = 1
        if a < 0:
            a, sign = -a, -sign
        if b < 0:
            b, sign = -b, -sign
        if a > b:
            a, b = b, a
        key = ("iff", a, b)
        g = self.cache.get(key)
        if g is None:
            g = self.new_var(("t",))
            self.clause(-g, -a, b)
            self.clause(-g, a, -b)
            self.clause(g, a, b)
            self.clause(g, -a, -b)
            self.cache[key] = g
        return g if sign > 0 else -g

    def assert_lit(self, l) -> None:
        if l is True:
            return
        if l is False:
            self.clause()
            return
        kids = self.and_children.get(l)
        if kids is not None:
            for k in kids:
                self.assert_lit(k)
        else:
            self.clause(l)


class _Grounder:
    def __init__(self, m: int, variables, *, eager_collections: bool, clause_budget: int):
        self.m = m
        self.c = _Circuit(clause_budget)
        self.p: dict[Var, list[int]] = {}
        self.q: dict[Var, list[int]] = {}
        self.r: dict[Var, dict[int, int]] = {}
        self.variables = tuple(variables)
        for v in self.variables:
            if v.sort == Sort.INDIVIDUAL:
                self.p[v] = [self.c.new_var(("p", v, u)) for u in range(m)]
            elif v.sort == Sort.SET:
                self.q[v] = [self.c.new_var(("q", v, u)) for u in range(m)]
            else:
                self.r[v] = {}
                if eager_collections:
                    for s in range(1 << m):
                        self.r_var(v, s)
        for v, row in self.p.items():
            self.c.clause(*row)
            for a, b in itertools.combinations(row, 2):
                self.c.clause(-a, -b)
        self.cache: dict = {}

    def r_var(self, a: Var, mask: int) -> int:
        row = self.r[a]
        g = row.get(mask)
        if g is None:
            g = row[mask] = self.c.new_var(("r", a, mask))
        return g

    # values: sort 0 -> int (bound) or Var (free); sort 1 -> int mask or Var

    def is_el(self, x, u):
        """Literal for "x denotes u"."""
        if isinstance(x, int):
            return x == u
        return self.p[x][u]

    def member(self, X, u):
        if isinstance(X, int):
            return bool(X >> u & 1)
        return self.q[X][u]

    def set_is(self, X, mask):
        """Literal for "X denotes the subset ``mask``"."""
        if isinstance(X, int):
            return X == mask
        key = ("e", X, mask)
        g = self.cache.get(key)
        if g is None:
            g = self.c.AND(self.member(X, u) if mask >> u & 1 else self.c.NOT(self.member(X, u)) for u in range(self.m))
            self.cache[key] = g
        return g

    def enc(self, f: Formula, env: dict):
        t = type(f)
        c = self.c
        m = self.m
        if t is Eq0:
            x, y = env.get(f.left, f.left), env.get(f.right, f.right)
            if isinstance(x, int) and isinstance(y, int):
                return x == y
            if isinstance(x, int):
                return self.is_el(y, x)
            if isinstance(y, int):
                return self.is_el(x, y)
            if x == y:
                return True
            return c.OR(c.AND((self.p[x][u], self.p[y][u])) for u in range(m))
        if t is Mem01:
            x, X = env.get(f.member, f.member), env.get(f.container, f.container)
            if isinstance(x, int):
                return self.member(X, x)
            return c.OR(c.AND((self.p[x][u], self.member(X, u))) for u in range(m))
        if t is EnumEq:
            xs = [env.get(v, v) for v in f.members]
            X = env.get(f.target, f.target)
            return c.AND(
                c.IFF(self.member(X, u), c.OR(self.is_el(x, u) for x in xs)) for u in range(m)
            )
        if t is EnumMem:
            xs = list(dict.fromkeys(env.get(v, v) for v in f.members))
            A = env.get(f.container, f.container)
            terms = []
            for size in range(1, min(len(xs), m) + 1):
                for combo in itertools.combinations(range(m), size):
                    mask = sum(1 << u for u in combo)
                    covered = c.AND(c.OR(self.is_el(x, u) for x in xs) for u in combo)
                    inside = c.AND(c.OR(self.is_el(x, u) for u in combo) for x in xs)
                    g = c.AND((covered, inside))
                    if g is not False:
                        terms.append(c.AND((g, self.r_var(A, mask))))
            return c.OR(terms)
        if t is Eq1:
            X, Y = env.get(f.left, f.left), env.get(f.right, f.right)
            if X == Y:
                return True
            return c.AND(c.IFF(self.member(X, u), self.member(Y, u)) for u in range(m))
        if t is Mem12:
            X, A = env.get(f.member, f.member), env.get(f.container, f.container)
            if isinstance(X, int):
                return self.r_var(A, X)
            return c.OR(c.AND((self.set_is(X, s), self.r_var(A, s))) for s in range(1 << m))
        if t is Not:
            return c.NOT(self.enc(f.body, env))
        if t is And:
            return c.AND((self.enc(f.left, env), self.enc(f.right, env)))
        if t is Or:
            return c.OR((self.enc(f.left, env), self.enc(f.right, env)))
        if t is Implies:
            return c.OR((c.NOT(self.enc(f.left, env)), self.enc(f.right, env)))
        if t is Iff:
            return c.IFF(self.enc(f.left, env), self.enc(f.right, env))
        if t is Forall0 or t is Forall1:
            return c.AND(self.instances(f, env))
        raise TypeError(f"not a formula: {f!r}")

    def instances(self, f, env):
        values = range(self.m) if isinstance(f, Forall0) else range(1 << self.m)
        for combo in itertools.product(values, repeat=len(f.vars)):
            inner = dict(env)
            inner.update(zip(f.vars, combo))
            lit = self.enc(f.body, inner)
            yield lit
            if lit is False:
                return

    def assert_formula(self, f: Formula, env: dict) -> None:
        """Assert ``f`` at the top level, splitting conjunctions and universals."""
        if isinstance(f, And):
            self.assert_formula(f.left, env)
            self.assert_formula(f.right, env)
        elif isinstance(f, (Forall0, Forall1)):
            for lit in self.instances(f, env):
                self.c.assert_lit(lit)
        elif isinstance(f, Not) and isinstance(f.body, Not):
            self.assert_formula(f.body.body, env)
        else:
            self.c.assert_lit(self.enc(f, env))


def _contains_forall1(f: Formula) -> bool:
    return any(isinstance(g, Forall1) for g in subformulas(f))


def ground(f, m: int, *, variables=None, symmetry: bool = False, eager_collections: bool = True,
           clause_budget: int = DEFAULT_CLAUSE_BUDGET) -> CnfInstance:
    """Ground ``f`` (a Formula or anything with a ``formula()`` method) at size ``m``.

    The result is satisfiable iff ``f`` has a model with exactly ``m``
    elements.  With ``symmetry`` on, the first individual variable is pinned
    to element 0 and the membership row of the first set variable is made
    monotone, which keeps satisfiability (any model can be permuted into
    that shape).  ``eager_collections=False`` allocates ``r(A,S)`` only
    for the subsets the formula can actually mention.
    """
    if not isinstance(f, Formula):
        f = f.formula()
    if m < 1:
        raise ValueError("domain size must be positive")
    if m > MAX_M_WITH_SET_QUANTIFIERS and _contains_forall1(f):
        raise ResourceLimit("grounding", MAX_M_WITH_SET_QUANTIFIERS, f"set quantifiers at m={m}")
    if variables is None:
        variables = free_var_list(f)
    g = _Grounder(m, variables, eager_collections=eager_collections, clause_budget=clause_budget)
    if symmetry:
        _break_symmetry(g)
    g.assert_formula(f, {})
    c = g.c
    return CnfInstance(c.num_vars, c.clauses, c.varmap, m, g.variables)


def _break_symmetry(g: _Grounder) -> None:
    first0 = next((v for v in g.variables if v.sort == Sort.INDIVIDUAL), None)
    first1 = next((v for v in g.variables if v.sort == Sort.SET), None)
    start = 0
    if first0 is not None:
        g.c.clause(g.p[first0][0])
        start = 1
    if first1 is not None:
        row = g.q[first1]
        for u in range(start, g.m - 1):
            g.c.clause(-row[u + 1], row[u])


def reconstruct_model(assignment, cnf: CnfInstance) -> Interpretation:
    """Read an Interpretation off a satisfying assignment of a grounded instance."""
    if cnf.m is None:
        raise ValueError("instance carries no grounding information")
    a0, a1, a2 = {}, {}, {}
    for v in cnf.variables:
        if v.sort == Sort.SET:
            a1[v] = set()
        elif v.sort == Sort.COLLECTION:
            a2[v] = set()
    for idx, tag in cnf.varmap.items():
        if not assignment.get(idx, False) or tag[0] == "t":
            continue
        kind, var, arg = tag
        if kind == "p":
            if var in a0:
                raise AssertionError(f"exactly-one row for {var.name} broken")
            a0[var] = arg
        elif kind == "q":
            a1.setdefault(var, set()).add(arg)
        else:
            a2.setdefault(var, set()).add(mask_to_set(arg))
    for v in cnf.variables:
        if v.sort == Sort.INDIVIDUAL and v not in a0:
            raise AssertionError(f"exactly-one row for {v.name} broken")
    return Interpretation(cnf.m, a0, a1, a2)


# ----------------------------------------------------------------------------
# DIMACS


def _fmt_tag(tag) -> str:
    if tag[0] == "t":
        return "t"
    kind, var, arg = tag
    if kind == "r":
        return f"r {var.name} {{{','.join(str(u) for u in sorted(mask_to_set(arg)))}}}"
    return f"{kind} {var.name} {arg}"


def export_dimacs(cnf: CnfInstance) -> str:
    lines = list(cnf.comments)
    if cnf.m is not None:
        lines.append(f"c stratisat domain {cnf.m}")
        for v in cnf.variables:
            lines.append(f"c stratisat var {int(v.sort)} {v.name}")
    for idx in sorted(cnf.varmap):
        lines.append(f"c map {idx} {_fmt_tag(cnf.varmap[idx])}")
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for cl in cnf.clauses:
        lines.append(" ".join([str(l) for l in cl] + ["0"]))
    return "\n".join(lines) + "\n"


def _parse_tag(fields, variables) -> tuple:
    kind = fields[0]
    if kind == "t" and len(fields) == 1:
        return ("t",)
    if kind in ("p", "q", "r") and len(fields) == 3:
        sort = {"p": Sort.INDIVIDUAL, "q": Sort.SET, "r": Sort.COLLECTION}[kind]
        var = variables.get(fields[1]) or Var(fields[1], sort)
        if kind == "r":
            body = fields[2]
            if not (body.startswith("{") and body.endswith("}")):
                raise ValueError(f"bad subset {body!r}")
            inner = body[1:-1]
            mask = sum(1 << int(u) for u in inner.split(",")) if inner else 0
            return ("r", var, mask)
        return (kind, var, int(fields[2]))
    raise ValueError(f"bad map entry: {' '.join(fields)}")


def import_dimacs(text: str) -> CnfInstance:
    """Parse DIMACS CNF text; ``c map`` / ``c stratisat`` comments are understood."""
    header = None
    comments, varmap = [], {}
    variables: dict[str, Var] = {}
    m = None
    clauses = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            fields = line.split()
            if len(fields) >= 2 and fields[0] == "c" and fields[1] == "map":
                try:
                    varmap[int(fields[2])] = _parse_tag(fields[3:], variables)
                except (ValueError, IndexError) as e:
                    raise ValueError(f"line {lineno}: {e}") from None
            elif len(fields) >= 3 and fields[:2] == ["c", "stratisat"]:
                if fields[2] == "domain":
                    m = int(fields[3])
                elif fields[2] == "var":
                    v = Var(fields[4], Sort(int(fields[3])))
                    variables[v.name] = v
                else:
                    raise ValueError(f"line {lineno}: unknown stratisat comment")
            else:
                comments.append(raw.rstrip("\n"))
            continue
        if line.startswith("p"):
            fields = line.split()
            if header is not None or len(fields) != 4 or fields[1] != "cnf":
                raise ValueError(f"line {lineno}: malformed header")
            header = (int(fields[2]), int(fields[3]))
            continue
        if header is None:
            raise ValueError(f"line {lineno}: clause before header")
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                if abs(lit) > header[0]:
                    raise ValueError(f"line {lineno}: literal {lit} out of range")
                pending.append(lit)
    if header is None:
        raise ValueError("missing 'p cnf' header")
    if pending:
        raise ValueError("last clause not terminated by 0")
    if len(clauses) != header[1]:
        raise ValueError(f"header announces {header[1]} clauses, found {len(clauses)}")
    # rebind map entries to declared variables so sorts survive the round trip
    for idx, tag in list(varmap.items()):
        if tag[0] != "t" and tag[1].name in variables:
            varmap[idx] = (tag[0], variables[tag[1].name], tag[2])
    return CnfInstance(header[0], clauses, varmap, m, tuple(variables.values()), comments)

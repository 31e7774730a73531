"""Set-theoretic constructs written as formulae of the fragment.

Level-0 set formers ``X = {z : phi(z)}`` become ``forall z . z in X <-> phi(z)``;
level-1 set formers ``A = {Z : phi(Z)}`` become ``forall Z . Z in A <-> phi(Z)``.
Cardinality literals ``|Z| <= h`` and friends are level-0 universals linked
to ``Z``, so they may sit inside level-1 matrices.

The unordered Cartesian product ``A = X1 (x) ... (x) Xn`` has three
encodings: one with a finite enumeration (linear size), two special cases
(pairwise disjoint / identical factors) and a general enumeration-free
one that lists every partition of ``{1..n}`` (size grows with the Bell
numbers).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .syntax import (
    EnumEq,
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
    conj,
    disj,
    exists0,
    formula_length,
    fresh_name,
)

LEVEL0_KINDS = ("empty", "full", "complement", "union", "intersection", "difference")
LEVEL1_KINDS = LEVEL0_KINDS + ("enum", "pow", "pow_le", "pow_eq", "pow_ge", "pow_lt")
CARDINALITY_KINDS = ("<=", "<", ">=", "=")
_CARD_ALIASES = {"≤": "<=", "≥": ">=", "le": "<=", "lt": "<", "ge": ">=", "eq": "="}


def _names(prefix: str, count: int, avoid) -> list[str]:
    used = {v.name if isinstance(v, Var) else v for v in avoid}
    out = []
    for i in range(1, count + 1):
        name = f"{prefix}{i}"
        if name in used:
            name = fresh_name(name, used)
        used.add(name)
        out.append(name)
    return out


def _one(prefix: str, sort: Sort, avoid) -> Var:
    used = {v.name for v in avoid}
    name = prefix if prefix not in used else fresh_name(prefix, used)
    return Var(name, sort)


def _check(args, sort: Sort, count: int | None, what: str) -> None:
    if count is not None and len(args) != count:
        raise ValueError(f"{what} takes {count} argument(s), got {len(args)}")
    for a in args:
        if not isinstance(a, Var) or a.sort != sort:
            raise ValueError(f"{what}: {a!r} is not a sort-{int(sort)} variable")


# ----------------------------------------------------------------------------
# level 0


def build_level0(kind: str, X: Var, *ys: Var) -> Formula:
    """``X = {}``, ``X = 1``, ``X = -Y``, ``X = Y1 | Y2``, ``X = Y1 & Y2``, ``X = Y1 \\ Y2``."""
    arity = {"empty": 0, "full": 0, "complement": 1, "union": 2, "intersection": 2, "difference": 2}
    if kind not in arity:
        raise ValueError(f"unknown level-0 set former {kind!r}")
    _check((X,) + ys, Sort.SET, arity[kind] + 1, kind)
    z = _one("z", Sort.INDIVIDUAL, (X,) + ys)
    if kind == "empty":
        body = Not(Eq0(z, z))
    elif kind == "full":
        body = Eq0(z, z)
    elif kind == "complement":
        body = Not(Mem01(z, ys[0]))
    elif kind == "union":
        body = Mem01(z, ys[0]) | Mem01(z, ys[1])
    elif kind == "intersection":
        body = Mem01(z, ys[0]) & Mem01(z, ys[1])
    else:
        body = Mem01(z, ys[0]) & Not(Mem01(z, ys[1]))
    return Forall0((z,), Iff(Mem01(z, X), body))


def build_subset(Z: Var, X: Var, avoid=()) -> Formula:
    """``Z <= X`` as ``forall z . z in Z -> z in X``."""
    _check((Z, X), Sort.SET, 2, "subset")
    z = _one("z", Sort.INDIVIDUAL, (Z, X) + tuple(avoid))
    return Forall0((z,), Implies(Mem01(z, Z), Mem01(z, X)))


def _at_most(Z: Var, h: int, avoid) -> Formula:
    cs = [Var(n, Sort.INDIVIDUAL) for n in _names("z", h + 1, (Z,) + tuple(avoid))]
    if h == 0:
        consequent = Not(Eq0(cs[0], cs[0]))
    else:
        consequent = disj(*(Eq0(a, b) for a, b in itertools.combinations(cs, 2)))
    return Forall0(tuple(cs), Implies(conj(*(Mem01(c, Z) for c in cs)), consequent))


def build_cardinality(kind: str, Z: Var, h: int, avoid=()) -> Formula:
    """``|Z| <= h``, ``|Z| < h``, ``|Z| >= h`` or ``|Z| = h``.

    ``|Z| <= h`` says that among any ``h+1`` members of ``Z`` two coincide;
    the others are rewritten into it.  Bound individuals are named
    ``z1, z2, ...`` (renamed if they clash with ``avoid``).
    """
    kind = _CARD_ALIASES.get(kind, kind)
    if kind not in CARDINALITY_KINDS:
        raise ValueError(f"unknown cardinality relation {kind!r}")
    if h < 0:
        raise ValueError("cardinality bound must be nonnegative")
    _check((Z,), Sort.SET, 1, "cardinality")
    if kind == "<=":
        return _at_most(Z, h, avoid)
    if kind == "<":
        return Not(Eq1(Z, Z)) if h == 0 else _at_most(Z, h - 1, avoid)
    if kind == ">=":
        return Eq1(Z, Z) if h == 0 else Not(_at_most(Z, h - 1, avoid))
    return build_cardinality("<=", Z, h, avoid) & build_cardinality(">=", Z, h, avoid)


# ----------------------------------------------------------------------------
# level 1


def build_level1(kind: str, A: Var, *args, h: int | None = None) -> Formula:
    """Level-1 set formers ``A = {Z : phi(Z)}``.

    kinds: ``empty``, ``full`` (all subsets), ``complement`` / ``union`` /
    ``intersection`` / ``difference`` of collections, ``enum`` (``A = {X1..Xk}``),
    ``pow``, and ``pow_le`` / ``pow_eq`` / ``pow_ge`` / ``pow_lt`` with ``h``.
    """
    if kind not in LEVEL1_KINDS:
        raise ValueError(f"unknown level-1 set former {kind!r}")
    _check((A,), Sort.COLLECTION, 1, kind)
    Z = _one("Z", Sort.SET, (A,) + args)
    if kind in ("empty", "full", "complement", "union", "intersection", "difference"):
        arity = {"empty": 0, "full": 0, "complement": 1, "union": 2, "intersection": 2, "difference": 2}[kind]
        _check(args, Sort.COLLECTION, arity, kind)
        if kind == "empty":
            body = Not(Eq1(Z, Z))
        elif kind == "full":
            body = Eq1(Z, Z)
        elif kind == "complement":
            body = Not(Mem12(Z, args[0]))
        elif kind == "union":
            body = Mem12(Z, args[0]) | Mem12(Z, args[1])
        elif kind == "intersection":
            body = Mem12(Z, args[0]) & Mem12(Z, args[1])
        else:
            body = Mem12(Z, args[0]) & Not(Mem12(Z, args[1]))
    elif kind == "enum":
        if not args:
            raise ValueError("enum needs at least one set variable")
        _check(args, Sort.SET, None, kind)
        body = disj(*(Eq1(Z, X) for X in args))
    else:
        _check(args, Sort.SET, 1, kind)
        (X,) = args
        sub = build_subset(Z, X, avoid=(A,))
        if kind == "pow":
            if h is not None:
                raise ValueError("pow takes no cardinality parameter")
            body = sub
        else:
            if h is None or h < 0:
                raise ValueError(f"{kind} needs a nonnegative h")
            rel = {"pow_le": "<=", "pow_eq": "=", "pow_ge": ">=", "pow_lt": "<="}[kind]
            # pow_lt(X, h) is pow_{< h+1}(X), i.e. |Z| <= h
            body = sub & build_cardinality(rel, Z, h, avoid=(A, X))
    return Forall1((Z,), Iff(Mem12(Z, A), body))


def build_pow_star(A: Var, *xs: Var) -> Formula:
    """``A = pow*(X1..Xk)``: subsets of the union meeting every ``Xi``."""
    if not xs:
        raise ValueError("pow* needs at least one set variable")
    _check((A,), Sort.COLLECTION, 1, "pow*")
    _check(xs, Sort.SET, None, "pow*")
    Z = _one("Z", Sort.SET, (A,) + xs)
    z = _one("z", Sort.INDIVIDUAL, (A, Z) + xs)
    inside = Forall0((z,), Implies(Mem01(z, Z), disj(*(Mem01(z, X) for X in xs))))
    meets = [Not(Forall0((z,), Implies(Mem01(z, Z), Not(Mem01(z, X))))) for X in xs]
    return Forall1((Z,), Iff(Mem12(Z, A), conj(inside, *meets)))


# ----------------------------------------------------------------------------
# unordered Cartesian product


def ucp_oracle(sets) -> frozenset:
    """``{{x1..xn} : xi in Xi}`` computed by enumerating all tuples."""
    sets = [frozenset(s) for s in sets]
    return frozenset(frozenset(t) for t in itertools.product(*sets))


def _ucp_args(A, xs, what):
    if not xs:
        raise ValueError(f"{what} needs n >= 1")
    _check((A,), Sort.COLLECTION, 1, what)
    _check(xs, Sort.SET, None, what)


def build_ucp_enum(A: Var, *xs: Var) -> Formula:
    """``forall Z . Z in A <-> exists z1..zn . AND zi in Xi & {z1..zn} = Z``."""
    _ucp_args(A, xs, "ucp-enum")
    Z = _one("Z", Sort.SET, (A,) + xs)
    zs = tuple(Var(n, Sort.INDIVIDUAL) for n in _names("z", len(xs), (A, Z) + xs))
    body = conj(*(Mem01(z, X) for z, X in zip(zs, xs)), EnumEq(zs, Z))
    return Forall1((Z,), Iff(Mem12(Z, A), exists0(zs, body)))


def build_ucp_disjoint(A: Var, *xs: Var) -> Formula:
    """Product of pairwise disjoint factors: ``|Z| = n`` and ``Z`` meets each factor.

    Only correct when the factors really are pairwise disjoint; the formula
    does not check it.
    """
    _ucp_args(A, xs, "ucp-disjoint")
    n = len(xs)
    Z = _one("Z", Sort.SET, (A,) + xs)
    avoid = (A, Z) + xs
    zs = tuple(Var(nm, Sort.INDIVIDUAL) for nm in _names("z", n, avoid))
    picks = exists0(zs, conj(*(Mem01(z, X) & Mem01(z, Z) for z, X in zip(zs, xs))))
    return Forall1((Z,), Iff(Mem12(Z, A), build_cardinality("=", Z, n, avoid) & picks))


def build_ucp_same(A: Var, X: Var, n: int) -> Formula:
    """Product of ``n`` copies of ``X``: nonempty subsets of ``X`` with at most ``n`` members."""
    if n < 1:
        raise ValueError("ucp-same needs n >= 1")
    _check((A,), Sort.COLLECTION, 1, "ucp-same")
    _check((X,), Sort.SET, 1, "ucp-same")
    Z = _one("Z", Sort.SET, (A, X))
    avoid = (A, X, Z)
    body = conj(build_cardinality("<=", Z, n, avoid), build_cardinality(">=", Z, 1, avoid), build_subset(Z, X, avoid))
    return Forall1((Z,), Iff(Mem12(Z, A), body))


@dataclass(frozen=True)
class Partition:
    """Blocks of a partition of ``{1..n}``, ordered by their least element."""

    blocks: tuple

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, i: int) -> int:
        return next(k for k, b in enumerate(self.blocks) if i in b)


MAX_PARTITION_N = 12
MAX_UCP_PARTITION_N = 6


def partitions(n: int) -> list[Partition]:
    """All partitions of ``{1..n}`` in restricted-growth-string order."""
    if not 1 <= n <= MAX_PARTITION_N:
        raise ValueError(f"partitions: n must be in 1..{MAX_PARTITION_N}")
    out = []
    rgs = [0] * n
    while True:
        k = max(rgs) + 1
        blocks = [[] for _ in range(k)]
        for i, b in enumerate(rgs):
            blocks[b].append(i + 1)
        out.append(Partition(tuple(tuple(b) for b in blocks)))
        # next restricted growth string
        i = n - 1
        while i > 0 and rgs[i] > max(rgs[:i]):
            i -= 1
        if i == 0:
            return out
        rgs[i] += 1
        for j in range(i + 1, n):
            rgs[j] = 0


def bell(n: int) -> int:
    return len(partitions(n))


def build_ucp_partition(A: Var, *xs: Var) -> Formula:
    """The enumeration-free product encoding: one disjunct per partition of ``{1..n}``.

    For a partition with blocks ``b1..bk`` the disjunct says ``|Z| = k`` and
    there are distinct ``z1..zk`` in ``Z`` with ``zi`` in every ``Xj``,
    ``j`` in ``bi``.
    """
    _ucp_args(A, xs, "ucp-partition")
    n = len(xs)
    if n > MAX_UCP_PARTITION_N:
        raise ValueError(f"ucp-partition: n must be at most {MAX_UCP_PARTITION_N}")
    Z = _one("Z", Sort.SET, (A,) + xs)
    avoid = (A, Z) + xs
    cases = []
    for P in partitions(n):
        k = len(P)
        zs = tuple(Var(nm, Sort.INDIVIDUAL) for nm in _names("z", k, avoid))
        distinct = [Not(Eq0(a, b)) for a, b in itertools.combinations(zs, 2)]
        rows = [conj(Mem01(z, Z), *(Mem01(z, xs[j - 1]) for j in block)) for z, block in zip(zs, P.blocks)]
        cases.append(build_cardinality("=", Z, k, avoid) & exists0(zs, conj(*distinct, *rows)))
    return Forall1((Z,), Iff(Mem12(Z, A), disj(*cases)))


def ucp_variables(n: int):
    """The default argument variables ``A, X1..Xn`` used by reports and the CLI."""
    return Var("A", Sort.COLLECTION), tuple(Var(f"X{i}", Sort.SET) for i in range(1, n + 1))


def length_report(n_max: int) -> list[tuple[int, int, int, int]]:
    """Rows ``(n, B_n, len_enum(n), len_partition(n))`` for ``n = 1..n_max``."""
    if not 1 <= n_max <= MAX_UCP_PARTITION_N:
        raise ValueError(f"n_max must be in 1..{MAX_UCP_PARTITION_N}")
    rows = []
    for n in range(1, n_max + 1):
        A, xs = ucp_variables(n)
        rows.append((n, bell(n), formula_length(build_ucp_enum(A, *xs)), formula_length(build_ucp_partition(A, *xs))))
    return rows


def length_report_csv(n_max: int) -> str:
    lines = ["n,bell,len_enum,len_partition"]
    lines += [",".join(str(v) for v in row) for row in length_report(n_max)]
    return "\n".join(lines) + "\n"


def partition_disjuncts(f: Formula) -> int:
    """Number of top-level disjuncts in the matrix of a level-1 set former."""
    rhs = f.body.right
    count = 0
    stack = [rhs]
    while stack:
        g = stack.pop()
        if isinstance(g, Or):
            stack.extend((g.left, g.right))
        else:
            count += 1
    return count

"""Finite interpretations and the satisfaction relation.

Domains are canonical: an interpretation of size ``m`` lives on
``{0, ..., m-1}``.  Sets are frozensets of ints, collections are
frozensets of such frozensets.

Two independent evaluators live here.  ``evaluate`` walks the formula
for a single interpretation.  ``enumerate_models`` evaluates a formula
over *every* candidate interpretation at once, holding each free
variable's value as a numpy column (sets and collections packed into
bitmasks); it is the brute-force oracle the solver is checked against.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import ResourceLimit, UnassignedVariable
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
)

DEFAULT_CANDIDATE_LIMIT = 1 << 24


def all_subsets(m: int) -> list[frozenset]:
    """Subsets of {0..m-1} ordered by their bitmask value."""
    return [mask_to_set(s) for s in range(1 << m)]


def set_to_mask(s: Iterable[int]) -> int:
    out = 0
    for u in s:
        out |= 1 << u
    return out


def mask_to_set(mask: int) -> frozenset:
    return frozenset(u for u in range(mask.bit_length()) if mask >> u & 1)


def collection_to_mask(c: Iterable[Iterable[int]]) -> int:
    out = 0
    for s in c:
        out |= 1 << set_to_mask(s)
    return out


def mask_to_collection(mask: int) -> frozenset:
    return frozenset(mask_to_set(s) for s in range(mask.bit_length()) if mask >> s & 1)


@dataclass(frozen=True)
class Interpretation:
    """A finite interpretation over the domain ``{0, ..., m-1}``.

    The three maps are copied on construction and must not be mutated.
    """

    m: int
    assign0: Mapping[Var, int] = field(default_factory=dict)
    assign1: Mapping[Var, frozenset] = field(default_factory=dict)
    assign2: Mapping[Var, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("domain must be nonempty")
        a0 = dict(self.assign0)
        a1 = {k: frozenset(v) for k, v in self.assign1.items()}
        a2 = {k: frozenset(frozenset(s) for s in v) for k, v in self.assign2.items()}
        for k, v in a0.items():
            if k.sort != Sort.INDIVIDUAL or not 0 <= v < self.m:
                raise ValueError(f"bad individual value {k.name} -> {v}")
        for k, v in a1.items():
            if k.sort != Sort.SET or any(not 0 <= u < self.m for u in v):
                raise ValueError(f"bad set value {k.name} -> {sorted(v)}")
        for k, v in a2.items():
            if k.sort != Sort.COLLECTION or any(not 0 <= u < self.m for s in v for u in s):
                raise ValueError(f"bad collection value for {k.name}")
        object.__setattr__(self, "assign0", a0)
        object.__setattr__(self, "assign1", a1)
        object.__setattr__(self, "assign2", a2)

    def __hash__(self):
        return hash(
            (
                self.m,
                tuple(sorted(self.assign0.items())),
                tuple(sorted(self.assign1.items(), key=lambda kv: kv[0])),
                tuple(sorted(self.assign2.items(), key=lambda kv: kv[0])),
            )
        )

    @property
    def domain(self) -> range:
        return range(self.m)

    def value(self, v: Var):
        table = (self.assign0, self.assign1, self.assign2)[int(v.sort)]
        try:
            return table[v]
        except KeyError:
            raise UnassignedVariable(v.name) from None

    def variables(self) -> list[Var]:
        return list(self.assign0) + list(self.assign1) + list(self.assign2)

    def restrict(self, vs: Iterable[Var]) -> Interpretation:
        keep = set(vs)
        return Interpretation(
            self.m,
            {k: v for k, v in self.assign0.items() if k in keep},
            {k: v for k, v in self.assign1.items() if k in keep},
            {k: v for k, v in self.assign2.items() if k in keep},
        )

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "sort0": {k.name: v for k, v in sorted(self.assign0.items())},
            "sort1": {k.name: sorted(v) for k, v in sorted(self.assign1.items())},
            "sort2": {
                k.name: sorted((sorted(s) for s in v), key=lambda s: (len(s), s))
                for k, v in sorted(self.assign2.items())
            },
        }

    @classmethod
    def from_json(cls, doc) -> Interpretation:
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(
            int(doc["m"]),
            {Var(k, Sort.INDIVIDUAL): int(v) for k, v in doc.get("sort0", {}).items()},
            {Var(k, Sort.SET): frozenset(v) for k, v in doc.get("sort1", {}).items()},
            {Var(k, Sort.COLLECTION): frozenset(frozenset(s) for s in v) for k, v in doc.get("sort2", {}).items()},
        )


def update(M: Interpretation, bindings) -> Interpretation:
    """Return ``M[v1/val1, ...]``; later bindings of the same variable win."""
    if isinstance(bindings, Mapping):
        bindings = bindings.items()
    a = [dict(M.assign0), dict(M.assign1), dict(M.assign2)]
    for v, val in bindings:
        if v.sort == Sort.INDIVIDUAL:
            val = int(val)
        elif v.sort == Sort.SET:
            val = frozenset(val)
        else:
            val = frozenset(frozenset(s) for s in val)
        a[int(v.sort)][v] = val
    return Interpretation(M.m, *a)


# ----------------------------------------------------------------------------
# scalar evaluation


def evaluate(M: Interpretation, f: Formula) -> bool:
    """Truth value of ``f`` in ``M``."""
    return _ev(f, M.m, M.assign0, M.assign1, M.assign2)


def _get(table, v):
    try:
        return table[v]
    except KeyError:
        raise UnassignedVariable(v.name) from None


def _ev(f, m, a0, a1, a2) -> bool:
    t = type(f)
    if t is Eq0:
        return _get(a0, f.left) == _get(a0, f.right)
    if t is Mem01:
        return _get(a0, f.member) in _get(a1, f.container)
    if t is EnumEq:
        return frozenset(_get(a0, v) for v in f.members) == _get(a1, f.target)
    if t is EnumMem:
        return frozenset(_get(a0, v) for v in f.members) in _get(a2, f.container)
    if t is Eq1:
        return _get(a1, f.left) == _get(a1, f.right)
    if t is Mem12:
        return _get(a1, f.member) in _get(a2, f.container)
    if t is Not:
        return not _ev(f.body, m, a0, a1, a2)
    if t is And:
        return _ev(f.left, m, a0, a1, a2) and _ev(f.right, m, a0, a1, a2)
    if t is Or:
        return _ev(f.left, m, a0, a1, a2) or _ev(f.right, m, a0, a1, a2)
    if t is Implies:
        return (not _ev(f.left, m, a0, a1, a2)) or _ev(f.right, m, a0, a1, a2)
    if t is Iff:
        return _ev(f.left, m, a0, a1, a2) == _ev(f.right, m, a0, a1, a2)
    if t is Forall0:
        for us in itertools.product(range(m), repeat=len(f.vars)):
            b = dict(a0)
            b.update(zip(f.vars, us))
            if not _ev(f.body, m, b, a1, a2):
                return False
        return True
    if t is Forall1:
        subsets = all_subsets(m)
        for Us in itertools.product(subsets, repeat=len(f.vars)):
            b = dict(a1)
            b.update(zip(f.vars, Us))
            if not _ev(f.body, m, a0, b, a2):
                return False
        return True
    raise TypeError(f"not a formula: {f!r}")


# ----------------------------------------------------------------------------
# brute-force enumeration


def _radix(v: Var, m: int) -> int:
    if v.sort == Sort.INDIVIDUAL:
        return m
    if v.sort == Sort.SET:
        return 1 << m
    return 1 << (1 << m)


def candidate_count(variables: Iterable[Var], m: int) -> int:
    n = 1
    for v in variables:
        n *= _radix(v, m)
    return n


def _order(f: Formula, order) -> list[Var]:
    free = free_var_list(f)
    if order is None:
        return free
    order = list(order)
    missing = set(free) - set(order)
    if missing:
        raise UnassignedVariable(", ".join(sorted(v.name for v in missing)))
    return sorted(order, key=lambda v: int(v.sort))


def _vec(f, env, m):
    """Evaluate ``f`` with every variable value a scalar or an int64 column."""
    t = type(f)
    if t is Eq0:
        return env[f.left] == env[f.right]
    if t is Mem01:
        return ((env[f.container] >> env[f.member]) & 1) == 1
    if t is EnumEq or t is EnumMem:
        mask = 0
        for v in f.members:
            mask = mask | (np.int64(1) << env[v])
        if t is EnumEq:
            return mask == env[f.target]
        return ((env[f.container] >> mask) & 1) == 1
    if t is Eq1:
        return env[f.left] == env[f.right]
    if t is Mem12:
        return ((env[f.container] >> env[f.member]) & 1) == 1
    if t is Not:
        return np.logical_not(_vec(f.body, env, m))
    if t is And:
        return np.logical_and(_vec(f.left, env, m), _vec(f.right, env, m))
    if t is Or:
        return np.logical_or(_vec(f.left, env, m), _vec(f.right, env, m))
    if t is Implies:
        return np.logical_or(np.logical_not(_vec(f.left, env, m)), _vec(f.right, env, m))
    if t is Iff:
        return _vec(f.left, env, m) == _vec(f.right, env, m)
    if t is Forall0 or t is Forall1:
        values = range(m) if t is Forall0 else range(1 << m)
        acc = True
        saved = {v: env.get(v) for v in f.vars}
        try:
            for combo in itertools.product(values, repeat=len(f.vars)):
                for v, val in zip(f.vars, combo):
                    env[v] = np.int64(val)
                acc = np.logical_and(acc, _vec(f.body, env, m))
                if not np.any(acc):
                    break
        finally:
            for v, old in saved.items():
                if old is None:
                    env.pop(v, None)
                else:
                    env[v] = old
        return acc
    raise TypeError(f"not a formula: {f!r}")


def _decode(idx: np.ndarray, variables: list[Var], m: int) -> dict:
    env = {}
    rest = idx
    for v in reversed(variables):
        r = _radix(v, m)
        rest, digit = np.divmod(rest, r)
        env[v] = digit
    return env


def _check_space(variables, m, limit) -> int:
    total = candidate_count(variables, m)
    if total > limit:
        raise ResourceLimit("enumerate_models", limit, f"{total} candidates at m={m}")
    if any(v.sort == Sort.COLLECTION for v in variables) and m > 5:
        raise ResourceLimit("enumerate_models", limit, "collections need 2^m-bit masks; m <= 5 supported")
    return total


def satisfying_indices(f: Formula, m: int, *, order=None, limit: int = DEFAULT_CANDIDATE_LIMIT,
                       chunk: int = 1 << 18, first_only: bool = False) -> Iterator[np.ndarray]:
    """Yield, chunk by chunk, the candidate indices whose interpretation satisfies ``f``.

    Candidate ``i`` is the mixed-radix number whose digits are the variable
    values in ``order`` (most significant first).
    """
    variables = _order(f, order)
    total = _check_space(variables, m, limit)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        env = _decode(idx, variables, m)
        truth = np.broadcast_to(np.asarray(_vec(f, env, m), dtype=bool), idx.shape)
        hits = idx[truth]
        if hits.size:
            yield hits[:1] if first_only else hits
            if first_only:
                return


def decode_candidate(i: int, variables: list[Var], m: int) -> Interpretation:
    digits = {}
    for v in reversed(variables):
        i, d = divmod(int(i), _radix(v, m))
        digits[v] = d
    a0 = {v: d for v, d in digits.items() if v.sort == Sort.INDIVIDUAL}
    a1 = {v: mask_to_set(d) for v, d in digits.items() if v.sort == Sort.SET}
    a2 = {v: mask_to_collection(d) for v, d in digits.items() if v.sort == Sort.COLLECTION}
    return Interpretation(m, a0, a1, a2)


def enumerate_models(f: Formula, m: int, *, order=None, limit: int = DEFAULT_CANDIDATE_LIMIT) -> Iterator[Interpretation]:
    """All models of ``f`` with domain ``{0..m-1}`` over its free variables.

    Models come out in lexicographic order of (sort-0 values, set masks,
    collection masks), variables taken in ``order`` within each sort
    (default: by name).  Raises ResourceLimit instead of answering when the
    candidate space exceeds ``limit``.
    """
    variables = _order(f, order)
    for hits in satisfying_indices(f, m, order=variables, limit=limit):
        for i in hits:
            yield decode_candidate(int(i), variables, m)


def count_models(f: Formula, m: int, *, order=None, limit: int = DEFAULT_CANDIDATE_LIMIT) -> int:
    return sum(int(h.size) for h in satisfying_indices(f, m, order=order, limit=limit))


def find_model(f: Formula, m: int, *, order=None, limit: int = DEFAULT_CANDIDATE_LIMIT) -> Interpretation | None:
    variables = _order(f, order)
    for hits in satisfying_indices(f, m, order=variables, limit=limit, first_only=True):
        return decode_candidate(int(hits[0]), variables, m)
    return None


def find_countermodel(f: Formula, m_max: int, *, limit: int = DEFAULT_CANDIDATE_LIMIT) -> Interpretation | None:
    """Smallest-domain interpretation falsifying ``f``, or None up to ``m_max``."""
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    for m in range(1, m_max + 1):
        M = find_model(Not(f), m, limit=limit)
        if M is not None:
            return M
    return None


def is_valid_upto(f: Formula, m_max: int, *, limit: int = DEFAULT_CANDIDATE_LIMIT) -> bool:
    """True iff no interpretation of size 1..m_max falsifies ``f``."""
    return find_countermodel(f, m_max, limit=limit) is None

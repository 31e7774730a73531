"""Independent reference implementations used by the tests."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def _columns(n: int) -> np.ndarray:
    """Row i is variable i+1's truth value across all 2**n assignments, bit-packed."""
    idx = np.arange(1 << n, dtype=np.uint32)
    bits = ((idx[None, :] >> np.arange(n, dtype=np.uint32)[:, None]) & 1).astype(bool)
    return np.packbits(bits, axis=1)


def truth_table_sat(clauses, n: int) -> bool:
    """Satisfiability by evaluating the CNF on every assignment at once."""
    if n == 0:
        return all(len(c) > 0 for c in clauses)
    cols = _columns(n)
    alive = np.full(cols.shape[1], 0xFF, dtype=np.uint8)
    for clause in clauses:
        acc = np.zeros_like(alive)
        for lit in clause:
            col = cols[abs(lit) - 1]
            acc |= col if lit > 0 else ~col
        alive &= acc
    if (1 << n) % 8:
        alive &= np.packbits(np.ones(1 << n, dtype=bool), bitorder="big")[: alive.size]
    return bool(alive.any())


def bell_triangle(n: int) -> list[int]:
    """B_1..B_n from the Bell triangle recurrence."""
    row = [1]
    out = [1]
    for _ in range(n - 1):
        new = [row[-1]]
        for v in row:
            new.append(new[-1] + v)
        row = new
        out.append(row[-1])
    return out


def powerset(s):
    s = sorted(s)
    return {frozenset(c) for k in range(len(s) + 1) for c in itertools.combinations(s, k)}


def rel_collection(MA, dstar, images_of_v1p, values_v1p, small_pool, l):
    """Relativized collection straight from the definition, one subset of D* at a time."""
    images = set(images_of_v1p)
    small = {S for S in powerset(small_pool) if len(S) <= l}
    out = set()
    for S in powerset(dstar):
        if S in MA and S not in images and S not in small:
            out.add(S)
        elif any(S == img and val in MA for img, val in zip(images_of_v1p, values_v1p)):
            out.add(S)
        elif S in small and S in MA:
            out.add(S)
    return frozenset(out)


def partition_member(Z, sets) -> bool:
    """Z is in the unordered product iff some partition of {1..n} has a bijection
    Z -> blocks with each x sent to a block whose indices all have x in X_i."""
    n = len(sets)
    Z = sorted(Z)
    for P in _all_partitions(list(range(1, n + 1))):
        if len(P) != len(Z):
            continue
        for perm in itertools.permutations(P):
            if all(all(x in sets[i - 1] for i in block) for x, block in zip(Z, perm)):
                return True
    return False


def _all_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in _all_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]

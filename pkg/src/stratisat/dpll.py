"""A small DPLL solver.

Two watched literals per clause, unit propagation, chronological
backtracking and a static branching order: variables sorted by how many
clauses mention them (ties by index), each tried first with its more
frequent polarity.  No clause learning, no restarts.
"""

from __future__ import annotations

from collections import Counter

from .errors import ResourceLimit


def _prepare(clauses):
    """Drop tautologies and duplicate literals. Returns (clauses, has_empty)."""
    out = []
    for c in clauses:
        seen = []
        taut = False
        for lit in c:
            if -lit in seen:
                taut = True
                break
            if lit not in seen:
                seen.append(lit)
        if taut:
            continue
        if not seen:
            return out, True
        out.append(seen)
    return out, False


def solve(clauses, num_vars: int | None = None, *, conflict_budget: int | None = None):
    """Return a satisfying total assignment ``{var: bool}`` or None.

    ``clauses`` is an iterable of iterables of nonzero ints (DIMACS style).
    Variables ``1..num_vars`` all receive a value; unconstrained ones are
    set False.  Raises ResourceLimit after ``conflict_budget`` conflicts.
    """
    clauses = [list(c) for c in clauses]
    n = max((abs(l) for c in clauses for l in c), default=0)
    if num_vars is None:
        num_vars = n
    elif n > num_vars:
        raise ValueError(f"clause mentions variable {n} > {num_vars}")
    clauses, empty = _prepare(clauses)
    if empty:
        return None

    value = [0] * (num_vars + 1)  # 0 unassigned, 1 true, -1 false

    def val(lit):
        v = value[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    watches: dict[int, list] = {}
    trail: list[int] = []
    units = []
    for c in clauses:
        if len(c) == 1:
            units.append(c[0])
        else:
            watches.setdefault(c[0], []).append(c)
            watches.setdefault(c[1], []).append(c)

    def enqueue(lit) -> bool:
        v = val(lit)
        if v == 1:
            return True
        if v == -1:
            return False
        value[abs(lit)] = 1 if lit > 0 else -1
        trail.append(lit)
        return True

    qhead = 0

    def propagate() -> bool:
        nonlocal qhead
        while qhead < len(trail):
            lit = trail[qhead]
            qhead += 1
            false_lit = -lit
            ws = watches.get(false_lit)
            if not ws:
                continue
            keep = []
            i = 0
            nws = len(ws)
            while i < nws:
                c = ws[i]
                i += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if val(first) == 1:
                    keep.append(c)
                    continue
                for k in range(2, len(c)):
                    if val(c[k]) != -1:
                        c[1], c[k] = c[k], c[1]
                        watches.setdefault(c[1], []).append(c)
                        break
                else:
                    keep.append(c)
                    if not enqueue(first):
                        keep.extend(ws[i:])
                        watches[false_lit] = keep
                        return False
            watches[false_lit] = keep
        return True

    for u in units:
        if not enqueue(u):
            return None
    if not propagate():
        return None

    occ = Counter(l for c in clauses for l in c)
    order = sorted(range(1, num_vars + 1), key=lambda v: (-(occ[v] + occ[-v]), v))
    phase = {v: (v if occ[v] >= occ[-v] else -v) for v in order}

    # decision stack: (trail length before the decision, decision literal, flipped?)
    stack: list[tuple[int, int, bool]] = []
    conflicts = 0
    pos = 0
    while True:
        while pos < len(order) and value[order[pos]] != 0:
            pos += 1
        if pos == len(order):
            return {v: value[v] == 1 for v in range(1, num_vars + 1)}
        lit = phase[order[pos]]
        stack.append((len(trail), lit, False))
        enqueue(lit)
        ok = propagate()
        if not ok:
            pos = 0  # backtracking frees earlier variables
        while not ok:
            conflicts += 1
            if conflict_budget is not None and conflicts > conflict_budget:
                raise ResourceLimit("dpll", conflict_budget, "conflicts")
            while stack and stack[-1][2]:
                stack.pop()
            if not stack:
                return None
            mark, lit, _ = stack.pop()
            for t in trail[mark:]:
                value[abs(t)] = 0
            del trail[mark:]
            qhead = mark
            stack.append((mark, -lit, True))
            enqueue(-lit)
            ok = propagate()


def check_assignment(clauses, assignment) -> bool:
    return all(any(assignment.get(abs(l), False) == (l > 0) for l in c) for c in clauses)

"""Exact phase-one simplex over rationals.

Only feasibility is needed: find ``x >= 0`` with ``A x = b``.  Rows are
sparse dicts ``{column: coefficient}``; everything stays a ``Fraction``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

Row = dict[int, Fraction]

_ZERO = Fraction(0)


def feasible_point(rows: list[Row], rhs: list[Fraction], num_vars: int,
                   max_pivots: int = 200_000) -> Optional[list[Fraction]]:
    """Return a basic feasible solution of ``rows @ x == rhs, x >= 0`` or None.

    Dantzig pricing, switching to Bland's rule after a run of degenerate
    pivots so the method cannot cycle.
    """
    m = len(rows)
    tab: list[Row] = []
    b: list[Fraction] = []
    for row, val in zip(rows, rhs):
        row = {k: Fraction(v) for k, v in row.items() if v != 0}
        val = Fraction(val)
        if val < 0:
            row = {k: -v for k, v in row.items()}
            val = -val
        # artificial for row k lives in column num_vars + k
        row[num_vars + len(tab)] = Fraction(1)
        tab.append(row)
        b.append(val)
    basis = [num_vars + k for k in range(m)]

    # reduced costs of the phase-one objective (sum of artificials)
    cost: Row = {}
    for row in tab:
        for c, v in row.items():
            if c < num_vars:
                cost[c] = cost.get(c, _ZERO) - v
    objective = sum(b, _ZERO)

    degenerate_run = 0
    pivots = 0
    while objective > 0:
        candidates = [(v, c) for c, v in cost.items() if v < 0 and c < num_vars]
        if not candidates:
            break
        if degenerate_run > 30:
            enter = min(c for _, c in candidates)
        else:
            enter = min(candidates)[1]

        leave = -1
        best = None
        for k in range(m):
            a = tab[k].get(enter)
            if a is not None and a > 0:
                ratio = b[k] / a
                if best is None or ratio < best or (ratio == best and basis[k] < basis[leave]):
                    best, leave = ratio, k
        if leave < 0:
            raise RuntimeError("phase-one simplex found an unbounded ray")
        degenerate_run = degenerate_run + 1 if best == 0 else 0

        d_enter = cost[enter]
        _pivot(tab, b, leave, enter)
        prow = tab[leave]
        for c, v in prow.items():
            nv = cost.get(c, _ZERO) - d_enter * v
            if nv:
                cost[c] = nv
            else:
                cost.pop(c, None)
        objective += d_enter * b[leave]
        basis[leave] = enter

        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")

    if objective != 0:
        return None
    x = [_ZERO] * num_vars
    for k, col in enumerate(basis):
        if col < num_vars:
            x[col] = b[k]
    return x


def _pivot(tab: list[Row], b: list[Fraction], leave: int, enter: int) -> None:
    prow = tab[leave]
    inv = 1 / prow[enter]
    if inv != 1:
        for c in prow:
            prow[c] *= inv
        b[leave] *= inv
    items = list(prow.items())
    pb = b[leave]
    for k, row in enumerate(tab):
        if k == leave:
            continue
        f = row.get(enter)
        if f is None:
            continue
        for c, v in items:
            nv = row.get(c, _ZERO) - f * v
            if nv:
                row[c] = nv
            else:
                del row[c]
        b[k] -= f * pb

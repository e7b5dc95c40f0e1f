import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog

from aqtwireless.lp import feasible_point

F = Fraction


def check(rows, rhs, x):
    assert all(v >= 0 for v in x)
    for row, val in zip(rows, rhs):
        assert sum(c * x[k] for k, c in row.items()) == val


def test_simple_feasible():
    rows = [{0: F(1), 1: F(1)}, {0: F(1), 2: F(-1)}]
    rhs = [F(1), F(1, 3)]
    x = feasible_point(rows, rhs, 3)
    check(rows, rhs, x)


def test_simple_infeasible():
    rows = [{0: F(1), 1: F(1)}, {0: F(1), 1: F(1)}]
    assert feasible_point(rows, [F(1), F(2)], 2) is None
    assert feasible_point([{0: F(1)}], [F(-1)], 1) is None


def test_redundant_and_degenerate_rows():
    rows = [{0: F(1), 1: F(1)}, {0: F(2), 1: F(2)}, {0: F(1)}]
    x = feasible_point(rows, [F(1), F(2), F(0)], 2)
    check(rows, [F(1), F(2), F(0)], x)


def _random_system(seed):
    rng = random.Random(seed)
    m, n = rng.randint(1, 5), rng.randint(1, 6)
    rows = [{k: F(rng.randint(-3, 3)) for k in range(n) if rng.random() < 0.7} for _ in range(m)]
    rhs = [F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(m)]
    return rows, rhs, n


@pytest.mark.parametrize("seed", range(150))
def test_agrees_with_highs(seed):
    rows, rhs, n = _random_system(seed)
    a = np.array([[float(r.get(k, 0)) for k in range(n)] for r in rows])
    res = linprog(np.zeros(n), A_eq=a, b_eq=[float(v) for v in rhs], bounds=[(0, None)] * n,
                  method="highs")
    x = feasible_point(rows, rhs, n)
    if x is not None:
        check(rows, rhs, x)
    assert (x is not None) == (res.status == 0)

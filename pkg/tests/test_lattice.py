from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import linprog

from toric_heights import lattice as la
from toric_heights.errors import LPError
from toric_heights.lp import feasible_point, linprog_exact

from strategies import int_matrices


def _det_int(m) -> int:
    return int(la.det(m))


def _is_hermite(h) -> bool:
    last = -1
    for row in h:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            continue
        j = nz[0]
        if j <= last or row[j] <= 0:
            return False
        last = j
    return True


# -- Hermite / Smith ------------------------------------------------------------------

def test_hnf_identity():
    h, u = la.hermite_normal_form(la.identity(3))
    assert h == la.identity(3) and u == la.identity(3)


def test_hnf_upper_triangular_example():
    h, u = la.hermite_normal_form([[2, 4], [0, 3]])
    assert h == ((2, 1), (0, 3))
    assert la.matmul(u, [[2, 4], [0, 3]]) == h
    assert abs(_det_int(u)) == 1


def test_hnf_zero_matrix():
    h, u = la.hermite_normal_form([[0, 0], [0, 0]])
    assert h == ((0, 0), (0, 0)) and u == la.identity(2)


@given(int_matrices(max_rows=6, max_cols=6, bound=100))
def test_hnf_reconstruction(m):
    h, u = la.hermite_normal_form(m)
    assert la.matmul(u, m) == h
    assert abs(_det_int(u)) == 1
    assert _is_hermite(h)


def test_snf_examples():
    assert la.smith_invariants([[2, 0], [0, 3]]) == (1, 6)
    assert la.smith_invariants([[4, 6], [2, 2]]) == (2, 2)
    assert la.smith_invariants([[0, 0], [0, 0]]) == (0, 0)


@given(int_matrices(max_rows=6, max_cols=6, bound=100))
def test_snf_reconstruction(m):
    d, u, v = la.smith_normal_form(m)
    assert la.matmul(la.matmul(u, m), v) == d
    assert abs(_det_int(u)) == 1 and abs(_det_int(v)) == 1
    diag = [d[i][i] for i in range(min(len(d), len(d[0])))]
    assert all(x >= 0 for x in diag)
    assert all(d[i][j] == 0 for i in range(len(d)) for j in range(len(d[0])) if i != j)
    for a, b in zip(diag, diag[1:]):
        assert (b == 0) if a == 0 else b % a == 0


@given(int_matrices(max_rows=4, max_cols=4, bound=30))
def test_snf_matches_determinantal_divisors(m):
    # d_1 ... d_k = gcd of k x k minors (independent characterization)
    import itertools
    inv = la.smith_invariants(m)
    rows, cols = len(m), len(m[0])
    prod = 1
    for k in range(1, min(rows, cols) + 1):
        minors = [_det_int([[m[i][j] for j in cs] for i in rs])
                  for rs in itertools.combinations(range(rows), k)
                  for cs in itertools.combinations(range(cols), k)]
        g = math.gcd(*minors)
        prod *= inv[k - 1]
        assert prod == g


# -- kernels and cokernels -------------------------------------------------------------

def test_kernel_examples():
    assert [tuple(abs(x) for x in v) for v in la.kernel_basis([[1, 1]])] == [(1, 1)]
    assert la.kernel_basis(la.identity(2)) == []
    (v,) = la.kernel_basis([[2, 4]])
    assert v in ((2, -1), (-2, 1))


@given(int_matrices(max_rows=4, max_cols=6, bound=20))
def test_kernel_is_saturated_basis(m):
    ker = la.kernel_basis(m)
    for v in ker:
        assert all(x == 0 for x in la.matvec(m, v))
    assert len(ker) == len(m[0]) - la.rank(m)
    if ker:
        assert all(x == 1 for x in la.smith_invariants(ker))


def test_cokernel_examples():
    assert la.cokernel_order(la.identity(2)) == 1
    assert la.cokernel_order([[2, 0], [0, 3]]) == 6
    assert la.cokernel_order([[0, 0]]) == math.inf


# -- exact LP ----------------------------------------------------------------------------

def test_minimal_scaling_examples():
    assert la.minimal_scaling((1, 2), (-2, -2), [(1, 0), (0, 1)]) == 2
    assert la.minimal_scaling((1,), (-3,), [(1,)]) == 3
    assert la.minimal_scaling((1, 1), (-1, -3), [(1, 0), (1, 2)]) == 3


def test_minimal_scaling_unbounded():
    with pytest.raises(LPError) as exc:
        la.minimal_scaling((1, 0), (0, 0), [(1, 0), (-1, 0), (0, 1)])
    assert exc.value.code == "unbounded-below"


def _in_cone(point, gens) -> bool:
    a_eq = [[g[i] for g in gens] for i in range(len(point))]
    m = len(gens)
    return feasible_point([[-int(i == j) for j in range(m)] for i in range(m)], [0] * m,
                          a_eq, list(point), nvars=m) is not None


def _bisection_oracle(c, k, gens) -> Fraction:
    """Infimum located by rational bisection on cone membership."""
    lo, hi = Fraction(-64), Fraction(64)
    assert _in_cone([hi * x + y for x, y in zip(c, k)], gens)
    for _ in range(40):
        mid = (lo + hi) / 2
        if _in_cone([mid * x + y for x, y in zip(c, k)], gens):
            hi = mid
        else:
            lo = mid
    return hi


@given(st.integers(0, 10 ** 6))
def test_minimal_scaling_matches_bisection(seed):
    import random
    rng = random.Random(seed)
    d = rng.choice([1, 2, 3])
    gens = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    gens += [tuple(rng.randint(0, 3) for _ in range(d)) for _ in range(rng.randint(0, 2))]
    gens = [g for g in gens if any(g)]
    c = tuple(rng.randint(1, 4) for _ in range(d))
    k = tuple(rng.randint(-6, 3) for _ in range(d))
    a = la.minimal_scaling(c, k, gens)
    assert _in_cone([a * x + y for x, y in zip(c, k)], gens)
    # infimum is attained at a; anything below fails, and bisection agrees to 2^-30
    assert not _in_cone([(a - Fraction(1, 10 ** 6)) * x + y for x, y in zip(c, k)], gens)
    assert abs(_bisection_oracle(c, k, gens) - a) < Fraction(1, 2 ** 30)


@given(st.integers(0, 10 ** 6))
def test_linprog_exact_agrees_with_scipy(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    m = int(rng.integers(n, n + 5))
    a = rng.integers(-4, 5, size=(m, n))
    b = rng.integers(0, 8, size=m)
    box = np.vstack([np.eye(n, dtype=int), -np.eye(n, dtype=int)])
    a = np.vstack([a, box])
    b = np.concatenate([b, np.full(2 * n, 10)])
    c = rng.integers(-5, 6, size=n)
    ours = linprog_exact(c.tolist(), a.tolist(), b.tolist())
    ref = linprog(c, A_ub=a, b_ub=b, bounds=[(None, None)] * n, method="highs")
    assert ours.status == "optimal" and ref.status == 0
    assert abs(float(ours.value) - ref.fun) < 1e-7
    x = np.array([float(v) for v in ours.x])
    assert np.all(a @ x <= b + 1e-9)


def test_linprog_infeasible_and_unbounded():
    assert linprog_exact([1], [[1], [-1]], [-1, -1]).status == "infeasible"
    assert linprog_exact([1], [[1]], [3]).status == "unbounded"
    res = linprog_exact([1, 1], [[-1, 0], [0, -1]], [0, 0], [[1, -1]], [2])
    assert res.status == "optimal" and res.value == 2 and res.x == (2, 0)

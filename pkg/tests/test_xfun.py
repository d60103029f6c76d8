from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from toric_heights import lattice as la
from toric_heights.cones import Cone, dual_cone
from toric_heights.errors import ConeError
from toric_heights.ratfun import RatFunc
from toric_heights.xfun import numeric_x, x_function, x_function_image, x_function_projected

from strategies import pointed_cones, random_pointed_cone, random_projection


def inv(n, *forms, scalar=1):
    return RatFunc.inverse_forms([(f, 1) for f in forms], n, scalar)


def interior_point(c: Cone, rng: random.Random) -> list[Fraction]:
    w = [Fraction(rng.randint(1, 20), rng.randint(1, 5)) for _ in c.generators]
    return [sum(wi * g[i] for wi, g in zip(w, c.generators)) for i in range(c.ambient_rank)]


def hull_oracle(c: Cone, s) -> float:
    """k! times the volume of {y in dual cone : <s, y> <= 1}, from the convex hull of its vertices."""
    k = c.ambient_rank
    rays = dual_cone(c).generators
    pts = [np.zeros(k)] + [np.array(y, float) / float(la.dot(y, s)) for y in rays]
    return math.factorial(k) * ConvexHull(np.array(pts)).volume


# -- examples -------------------------------------------------------------------------

def test_orthant():
    for k in (1, 2, 3):
        assert x_function(Cone.orthant(k)).value == inv(k, *la.identity(k))


def test_two_dimensional_example():
    x = x_function(Cone(2, [(1, 0), (1, 2)]))
    assert x.value == inv(2, (0, 1), (2, -1), scalar=2)
    assert x((3, 1)) == Fraction(2, 5)
    assert x.render() == "2/((2*s1 - s2)*s2)"


def test_errors():
    with pytest.raises(ConeError, match="not-full-dimensional"):
        x_function(Cone(2, [(1, 0)]))
    with pytest.raises(ConeError, match="not-pointed"):
        x_function(Cone(2, [(1, 0), (-1, 0), (0, 1)]))


# -- properties -------------------------------------------------------------------

@given(pointed_cones(), st.integers(0, 10 ** 6))
def test_homogeneity_and_positivity(c, seed):
    rng = random.Random(seed)
    x = x_function(c)
    k = c.ambient_rank
    for _ in range(5):
        s = interior_point(c, rng)
        v = x(s)
        assert v > 0
        assert x([2 * t for t in s]) == v / 2 ** k


@given(pointed_cones())
def test_degree_and_poles(c):
    f = x_function(c).value
    assert f.num.degree - f.den_degree == -c.ambient_rank
    normals = set(c.facet_normals) | {tuple(-a for a in n) for n in c.facet_normals}
    assert all(form in normals for form, _ in f.den)


@given(pointed_cones(), st.integers(0, 10 ** 6))
def test_triangulation_independence(c, seed):
    rays = list(dual_cone(c).generators)
    random.Random(seed).shuffle(rays)
    assert x_function(c, order=rays) == x_function(c)


@given(pointed_cones(), st.integers(0, 10 ** 6))
def test_matches_convex_hull_volume(c, seed):
    s = interior_point(c, random.Random(seed))
    assert float(x_function(c)(s)) == pytest.approx(hull_oracle(c, s), rel=1e-9)


# -- projections ----------------------------------------------------------------------

def test_projection_examples():
    got = x_function_projected(Cone.orthant(2), [(1, -1)])
    assert got.value == inv(1, (1,))
    assert got.value.substitute_linear([(1, 1)]) == inv(2, (1, 1))
    orth3 = Cone.orthant(3)
    got = x_function_projected(orth3, [(1, 1, -1)])
    assert got.value == x_function(got.cone).value
    with pytest.raises(ConeError, match="kernel-meets-cone"):
        x_function_projected(Cone.orthant(2), [(1, 1)])


def test_flat_image_reports_kernel():
    # an image that is a half-plane forces the kernel into the cone
    c = Cone(3, [(1, 0, 0), (-1, 0, 1), (0, 1, 0)])
    with pytest.raises(ConeError, match="kernel-meets-cone"):
        x_function_image(c, [(1, 0, 0), (0, 1, 0)])


def test_cokernel_factor():
    psi = [(2, 0), (0, 1)]
    c = Cone.orthant(2)
    assert la.cokernel_order(psi) == 2
    assert x_function_image(c, psi).value == x_function(Cone(2, [(2, 0), (0, 1)])).value
    psi = [(1, 1, 0), (0, 2, 2)]
    assert la.cokernel_order(psi) == 2
    img = x_function_image(Cone.orthant(3), psi)
    assert img.value == x_function(img.cone).value


@settings(max_examples=20)
@given(st.integers(0, 10 ** 9), st.sampled_from([(2, 1), (3, 2), (3, 1), (4, 3), (4, 2)]))
def test_projection_consistency(seed, shape):
    k, r = shape
    rng = random.Random(seed)
    c = random_pointed_cone(rng, k)
    psi = random_projection(rng, k, r)
    img = x_function_image(c, psi)
    assert img.cone == Cone(r, [la.matvec(psi, g) for g in c.generators])
    assert img.value == x_function(img.cone).value


@settings(max_examples=20)
@given(st.integers(0, 10 ** 9))
def test_projected_uses_saturated_quotient(seed):
    rng = random.Random(seed)
    c = random_pointed_cone(rng, 3)
    psi = random_projection(rng, 3, 2)
    (gamma,) = la.kernel_basis(psi)
    got = x_function_projected(c, [tuple(2 * g for g in gamma)])
    p = la.kernel_basis([gamma])
    assert la.cokernel_order(p) == 1
    assert got.value == x_function(Cone(2, [la.matvec(p, g) for g in c.generators])).value


# -- Monte Carlo ------------------------------------------------------------------

def test_numeric_examples():
    v, e = numeric_x(Cone.orthant(2), (1, 1), samples=200_000, seed=1)
    assert abs(v - 1) < 4 * e and e < 0.01
    v, e = numeric_x(Cone.orthant(2), (2, 3), samples=200_000, seed=2)
    assert abs(v - 1 / 6) < 4 * e
    v, e = numeric_x(Cone(2, [(1, 0), (1, 2)]), (3, 1), samples=200_000, seed=3)
    assert abs(v - 0.4) < 4 * e


@settings(max_examples=10)
@given(pointed_cones(dims=(2, 3)), st.integers(0, 10 ** 6))
def test_numeric_agrees_within_error(c, seed):
    s = interior_point(c, random.Random(seed))
    v, e = numeric_x(c, [float(t) for t in s], samples=100_000, seed=seed)
    exact = float(x_function(c)(s))
    assert abs(v - exact) < 5 * e + 1e-12


def test_numeric_not_interior():
    with pytest.raises(ConeError, match="not-interior"):
        numeric_x(Cone.orthant(2), (1, -1))
    with pytest.raises(ConeError, match="not-interior"):
        numeric_x(Cone.orthant(2), (1, 0))

from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from toric_heights import lattice as la
from toric_heights.cones import Cone, dual_cone, is_regular, minimal_face, triangulate
from toric_heights.errors import ConeError

from strategies import pointed_cones, random_pointed_cone

SQUARE = Cone(3, [(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)])


def brute_force_facets(c: Cone) -> set[tuple[int, ...]]:
    """Facet normals from every hyperplane spanned by generators that supports the cone."""
    k = c.ambient_rank
    out = set()
    for sub in itertools.combinations(c.generators, k - 1):
        if k > 1 and la.rank(sub) < k - 1:
            continue
        n = la.primitive(la.kernel_basis(sub)[0]) if k > 1 else (1,)
        vals = [la.dot(n, g) for g in c.generators]
        if all(v >= 0 for v in vals):
            out.add(n)
        elif all(v <= 0 for v in vals):
            out.add(tuple(-x for x in n))
    return out


def test_dual_examples():
    assert dual_cone(Cone.orthant(2)).generators == ((0, 1), (1, 0))
    assert set(dual_cone(Cone(2, [(1, 0), (1, 2)])).generators) == {(0, 1), (2, -1)}
    assert set(dual_cone(SQUARE).generators) == {(1, 1, 1), (-1, 1, 1), (1, -1, 1), (-1, -1, 1)}


def test_dual_errors():
    with pytest.raises(ConeError, match="not-full-dimensional"):
        dual_cone(Cone(2, [(1, 0)]))
    with pytest.raises(ConeError, match="not-pointed"):
        dual_cone(Cone(2, [(1, 0), (-1, 0), (0, 1)]))


@given(pointed_cones())
def test_facets_match_brute_force(c):
    assert set(c.facet_normals) == brute_force_facets(c)


@given(pointed_cones())
def test_double_dual(c):
    assert set(dual_cone(dual_cone(c)).generators) == set(c.extremal_rays)


def test_regularity():
    assert is_regular(Cone.orthant(2))
    assert not is_regular(Cone(2, [(1, 0), (1, 2)]))
    assert not is_regular(Cone(2, [(1, 1), (1, -1)]))
    assert is_regular(Cone(1, [(2,)]))  # primitivized to (1,)


@given(pointed_cones())
def test_regular_simplicial_has_unit_det(c):
    if c.is_simplicial and is_regular(Cone(c.ambient_rank, c.extremal_rays)):
        assert abs(la.det(c.extremal_rays)) == 1


def test_triangulate_examples():
    simplex = Cone(2, [(1, 0), (1, 2)])
    assert triangulate(simplex) == [simplex]
    pieces = triangulate(SQUARE)
    assert len(pieces) == 2
    # lattice-normalized volume of the square pyramid slice is 4
    assert sum(abs(la.det(p.generators)) for p in pieces) == 4
    assert triangulate(Cone(2, [(1, 0), (1, 1), (0, 1)])) == [Cone.orthant(2)]


@given(pointed_cones(), st.integers(0, 10 ** 6))
def test_triangulation_covers_once(c, seed):
    rng = random.Random(seed)
    pieces = triangulate(c)
    assert all(p.is_simplicial and p.dim == c.ambient_rank for p in pieces)
    rays = c.extremal_rays
    for _ in range(5):
        w = [Fraction(rng.randint(1, 50), rng.randint(1, 7)) for _ in rays]
        x = [sum(wi * r[i] for wi, r in zip(w, rays)) for i in range(c.ambient_rank)]
        inside = [p for p in pieces if p.contains_interior(x)]
        on = [p for p in pieces if p.contains(x)]
        assert len(on) >= 1
        assert len(inside) <= 1
        if len(on) == 1:
            assert len(inside) == 1


def test_minimal_face_examples():
    orth = Cone.orthant(2)
    f = minimal_face(orth, (0, 2))
    assert f.cone.generators == ((0, 1),) and f.codim == 1
    assert minimal_face(orth, (1, 1)).codim == 0
    assert minimal_face(orth, (0, 0)).codim == 2
    with pytest.raises(ConeError, match="point-not-in-cone"):
        minimal_face(orth, (-1, 0))


@given(pointed_cones(), st.integers(0, 10 ** 6))
def test_minimal_face_is_minimal(c, seed):
    rng = random.Random(seed)
    rays = list(c.extremal_rays)
    chosen = rng.sample(rays, rng.randint(1, len(rays)))
    x = [sum(r[i] for r in chosen) for i in range(c.ambient_rank)]
    face = minimal_face(c, x)
    assert face.cone.contains(x)
    # every face containing x contains the minimal one
    for normal in c.facet_normals:
        if la.dot(normal, x) == 0:
            assert all(la.dot(normal, g) == 0 for g in face.cone.generators)


def test_contains_examples():
    orth = Cone.orthant(2)
    assert orth.contains((1, 0))
    assert not orth.contains((-1, 0))
    assert Cone(2, [(1, 0), (1, 2)]).contains((1, 1))


def test_generators_normalized():
    c = Cone(2, [(2, 0), (1, 0), (0, 3)])
    assert c.generators == ((0, 1), (1, 0))
    assert c == Cone(2, [(0, 1), (1, 0)])

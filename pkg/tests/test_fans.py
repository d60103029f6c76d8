from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from toric_heights import lattice as la
from toric_heights.errors import FanValidationError, ToricError
from toric_heights.fans import (PLFunction, anticanonical_function, evaluate_pl, is_projective,
                                validate_fan)

P2_RAW = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [2, 0]]}


def _violations(raw) -> list[str]:
    with pytest.raises(FanValidationError) as exc:
        validate_fan(raw)
    return exc.value.violations


# -- validation examples --------------------------------------------------------

def test_p2_is_valid():
    fan = validate_fan(P2_RAW)
    assert fan.rank == 2 and fan.n_rays == 3 and len(fan.max_cones) == 3


def test_missing_cone_is_incomplete():
    raw = dict(P2_RAW, max_cones=[[0, 1], [1, 2]])
    assert "not-complete" in _violations(raw)


def test_non_regular_cone_is_reported():
    raw = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -2], [0, -1]],
           "max_cones": [[0, 1], [1, 2], [2, 3], [0, 2]]}
    # det((1,0),(-1,-2)) = -2; the other three cones are unimodular
    assert [v for v in _violations(raw) if v.startswith("not-regular")] == ["not-regular(3)"]


def test_overlapping_cones():
    raw = {"rank": 2, "rays": [[1, 0], [0, 1], [-1, -1], [1, 1]],
           "max_cones": [[0, 1], [1, 2], [2, 0], [0, 3]]}
    assert any(v.startswith("bad-intersection") for v in _violations(raw))


def test_malformed_inputs():
    assert _violations({"rank": 2, "rays": [[1, 0, 0]], "max_cones": []})[0].startswith("malformed")
    assert _violations({"rank": 2, "rays": [[1, 0]], "max_cones": [[0, 5]]})[0].startswith("malformed")
    assert "duplicate-ray" in _violations({"rank": 1, "rays": [[1], [1], [-1]],
                                           "max_cones": [[0], [2]]})


def test_three_dimensional_examples(all_fans):
    p3 = validate_fan({"rank": 3, "rays": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [-1, -1, -1]],
                       "max_cones": [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]})
    assert is_projective(p3)
    cube = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    octants = [[a, b, c] for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    assert is_projective(validate_fan({"rank": 3, "rays": cube, "max_cones": octants}))
    assert "not-complete" in _violations({"rank": 3, "rays": cube, "max_cones": octants[:-1]})


# -- brute-force 2D oracle ------------------------------------------------------------

def _angular_oracle(rays, cones) -> bool:
    """A 2D regular fan is complete iff its cones are exactly consecutive pairs in angular order,
    each spanning less than a half-turn with determinant one."""
    if len(set(map(tuple, rays))) != len(rays) or len(rays) < 3:
        return False
    order = sorted(range(len(rays)), key=lambda i: math.atan2(rays[i][1], rays[i][0]))
    pairs = {frozenset((order[k], order[(k + 1) % len(order)])) for k in range(len(order))}
    if {frozenset(c) for c in cones} != pairs or len(cones) != len(pairs):
        return False
    for k in range(len(order)):
        a, b = rays[order[k]], rays[order[(k + 1) % len(order)]]
        if a[0] * b[1] - a[1] * b[0] != 1:
            return False
    return True


def _random_smooth_fan(rng: random.Random, blowups: int):
    rays = [(1, 0), (0, 1), (-1, -1)] if rng.random() < 0.5 else [(1, 0), (0, 1), (-1, 0), (0, -1)]
    for _ in range(blowups):
        k = rng.randrange(len(rays))
        a, b = rays[k], rays[(k + 1) % len(rays)]
        rays.insert(k + 1, (a[0] + b[0], a[1] + b[1]))
    cones = [[i, (i + 1) % len(rays)] for i in range(len(rays))]
    return [list(r) for r in rays], cones


@given(st.integers(0, 10 ** 6), st.integers(0, 5), st.sampled_from(["keep", "drop", "swap", "extra"]))
def test_validation_matches_angular_oracle(seed, blowups, mutation):
    rng = random.Random(seed)
    rays, cones = _random_smooth_fan(rng, blowups)
    if mutation == "drop":
        cones.pop(rng.randrange(len(cones)))
    elif mutation == "swap":
        i, j = rng.sample(range(len(rays)), 2)
        cones[rng.randrange(len(cones))] = [i, j]
    elif mutation == "extra":
        rays.append([rng.randint(-3, 3), rng.randint(-3, 3) or 1])
        k = rng.randrange(len(cones))
        cones[k] = [cones[k][0], len(rays) - 1]
        cones.append([len(rays) - 1, cones[(k + 1) % len(cones)][0]])
    # drop degenerate mutations the oracle cannot express
    if any(len(set(c)) != 2 for c in cones) or any(math.gcd(*r) != 1 for r in rays):
        return
    try:
        validate_fan({"rank": 2, "rays": rays, "max_cones": cones})
        ok = True
    except FanValidationError:
        ok = False
    assert ok == _angular_oracle(rays, cones)


@given(st.integers(0, 10 ** 6), st.integers(0, 5))
def test_smooth_complete_surfaces_are_projective(seed, blowups):
    rays, cones = _random_smooth_fan(random.Random(seed), blowups)
    assert is_projective(validate_fan({"rank": 2, "rays": rays, "max_cones": cones}))


# -- piecewise linear functions ----------------------------------------------------

def test_evaluate_examples(p2, p1):
    phi = anticanonical_function(p2)
    assert evaluate_pl(phi, (1, 0)) == 1
    assert evaluate_pl(phi, (1, 1)) == 2
    assert evaluate_pl(phi, (-2, -2)) == 2
    assert evaluate_pl(phi, (-1, 0)) == 2  # (-1,-1) + (0,1)
    assert evaluate_pl(phi, (0, 0)) == 0
    assert evaluate_pl(PLFunction(p1, [1, 2]), (-3,)) == 6
    with pytest.raises(ToricError, match="dimension-mismatch"):
        evaluate_pl(phi, (1,))


def _points(draw_ints, rank):
    return st.lists(draw_ints, min_size=rank, max_size=rank)


@pytest.mark.parametrize("name", ["p1", "p2", "p1xp1", "f1"])
@given(data=st.data())
def test_homogeneity_and_linearity_on_cones(all_fans, name, data):
    fan = all_fans[name]
    vals = data.draw(st.lists(st.fractions(-5, 5, max_denominator=6),
                              min_size=fan.n_rays, max_size=fan.n_rays))
    phi = PLFunction(fan, vals)
    x = data.draw(_points(st.integers(-20, 20), fan.rank))
    t = data.draw(st.fractions(0, 9, max_denominator=5))
    assert evaluate_pl(phi, [t * v for v in x]) == t * evaluate_pl(phi, x)
    # on the cone containing x, phi is the cone's linear form
    idx = fan.locate(x)
    assert evaluate_pl(phi, x) == la.dot(phi.linear_form(idx), x)
    # on a ray, phi takes its prescribed value
    i = data.draw(st.integers(0, fan.n_rays - 1))
    assert evaluate_pl(phi, fan.rays[i]) == phi.values[i]


@pytest.mark.parametrize("name", ["p2", "p1xp1", "f1"])
def test_linear_forms_agree_on_shared_faces(all_fans, name):
    fan = all_fans[name]
    phi = PLFunction(fan, [Fraction(k + 1, 3) for k in range(fan.n_rays)])
    for ci, cj, facet in fan.adjacent_pairs:
        for r in facet:
            e = fan.rays[r]
            assert la.dot(phi.linear_form(ci), e) == la.dot(phi.linear_form(cj), e)


@pytest.mark.parametrize("name", ["p1", "p2", "p1xp1", "f1"])
@given(data=st.data())
def test_anticanonical_positive_off_origin(all_fans, name, data):
    fan = all_fans[name]
    x = data.draw(_points(st.integers(-50, 50), fan.rank))
    v = evaluate_pl(anticanonical_function(fan), x)
    assert (v > 0) == any(x)
    assert v >= 0


@pytest.mark.parametrize("name", ["p2", "p1xp1"])
@given(data=st.data())
def test_shift_by_character(all_fans, name, data):
    fan = all_fans[name]
    m = data.draw(_points(st.integers(-4, 4), fan.rank))
    x = data.draw(_points(st.integers(-9, 9), fan.rank))
    phi = anticanonical_function(fan)
    assert evaluate_pl(phi.shifted(m), x) == evaluate_pl(phi, x) + la.dot(m, x)


def test_bundled_fans_projective(all_fans):
    assert all(is_projective(f) for f in all_fans.values())


# P^3 with the three edges towards (1,1,1) subdivided and every side face cut in the same
# rotational sense: a smooth complete threefold with no ample class.
TWISTED_RAYS = [[-1, 0, 0], [0, -1, 0], [0, 0, -1], [1, 1, 1], [0, 1, 1], [1, 0, 1], [1, 1, 0]]
TWISTED_CONES = [[0, 1, 2], [0, 1, 5], [0, 5, 4], [4, 5, 3], [1, 2, 6], [1, 6, 5], [5, 6, 3],
                 [2, 0, 4], [2, 4, 6], [6, 4, 3]]


def test_twisted_threefold_is_not_projective():
    fan = validate_fan({"rank": 3, "rays": TWISTED_RAYS, "max_cones": TWISTED_CONES})
    assert not is_projective(fan)
    # cutting one face the other way breaks the twist
    untwisted = TWISTED_CONES[:7] + [[2, 0, 6], [0, 6, 4], [6, 4, 3]]
    assert is_projective(validate_fan({"rank": 3, "rays": TWISTED_RAYS, "max_cones": untwisted}))

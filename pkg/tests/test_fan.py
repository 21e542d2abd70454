import random

import pytest
from hypothesis import given, settings, strategies as st

from csalgebra.fan import (
    DegenerateFan, DimensionMismatch, Fan, NotARefinement, ResolutionLimit, common_refinement,
    containing_cone, cube_fan, fan_2d, is_complete, projective_space_fan, refines, resolve,
)
from csalgebra.polytope import hull, normal_fan, simplex
from conftest import random_fan_2d

SQ = cube_fan(2)
P2 = projective_space_fan(2)
WPS112 = fan_2d([(1, 0), (0, 1), (-1, -2)])
BLOWUP = fan_2d([(1, 0), (1, 1), (0, 1), (-1, -1)])


def int_det(rows):
    if len(rows) == 2:
        (a, b), (c, d) = rows
        return a * d - b * c
    (a, b, c), (d, e, f), (g, h, i) = rows
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def all_unimodular(f: Fan) -> bool:
    return all(abs(int_det([f.rays[i] for i in c])) == 1 for c in f.cones)


fans_2d = st.integers(0, 10 ** 6).map(lambda s: random_fan_2d(random.Random(s)))


# completeness and smoothness

def test_completeness_examples():
    assert is_complete(P2)
    assert is_complete(SQ)
    quadrant = Fan.build([(1, 0), (0, 1)], [(0, 1)])
    assert not is_complete(quadrant)


def test_three_cones_missing_one_quadrant():
    f = Fan.build([(1, 0), (0, 1), (-1, 0), (0, -1)], [(0, 1), (1, 2), (2, 3)])
    assert not f.is_complete()


def test_completeness_3d():
    assert projective_space_fan(3).is_complete()
    assert cube_fan(3).is_complete()
    half = Fan.build(cube_fan(3).rays, cube_fan(3).cones[:4])
    assert not half.is_complete()


def test_smoothness_examples():
    assert SQ.is_smooth()
    assert P2.is_smooth()
    f = fan_2d([(1, 0), (1, 2), (-1, 0), (0, -1)])
    assert not f.is_smooth()


def test_walls_bound_two_cones():
    for f in (SQ, P2, BLOWUP, projective_space_fan(3), resolve(WPS112)):
        assert all(len(cs) == 2 for cs in f.walls.values())


def test_non_simplicial_rejected_unless_triangulated():
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    with pytest.raises(DegenerateFan):
        Fan.build(rays, [(0, 1, 2, 3)])


# refinement

def test_common_refinement_examples():
    assert common_refinement(P2, P2) == P2
    r = common_refinement(SQ, P2)
    assert set(r.rays) == {(1, 0), (0, 1), (-1, 0), (0, -1), (-1, -1)}
    assert len(r.cones) == 5


def test_common_refinement_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        common_refinement(SQ, cube_fan(3))


@settings(max_examples=40, deadline=None)
@given(fans_2d, fans_2d)
def test_common_refinement_2d_matches_ray_union(a, b):
    r = common_refinement(a, b)
    assert r == fan_2d(list(a.rays) + list(b.rays))
    assert refines(r, a) and refines(r, b)


def test_common_refinement_3d():
    r = common_refinement(projective_space_fan(3), cube_fan(3))
    assert len(r.cones) == 16
    assert r.is_complete()
    assert refines(r, projective_space_fan(3)) and refines(r, cube_fan(3))


def test_refines_examples():
    assert refines(resolve(WPS112), WPS112)
    assert not refines(SQ, P2)
    assert refines(P2, P2)


@settings(max_examples=30, deadline=None)
@given(fans_2d, fans_2d, fans_2d)
def test_refines_partial_order(a, b, c):
    ab = common_refinement(a, b)
    abc = common_refinement(ab, c)
    assert refines(abc, ab) and refines(ab, a) and refines(abc, a)
    if refines(a, b) and refines(b, a):
        assert a == b


def test_containing_cone():
    ci = BLOWUP.cones.index(tuple(sorted(BLOWUP.ray_index[r] for r in [(1, 0), (1, 1)])))
    bi = containing_cone(BLOWUP, ci, P2)
    assert set(P2.rays[i] for i in P2.cones[bi]) == {(1, 0), (0, 1)}
    with pytest.raises(NotARefinement):
        containing_cone(SQ, SQ.locate((-1, -3)), P2)


# location

def test_locate():
    assert set(SQ.rays[i] for i in SQ.cones[SQ.locate((3, 5))]) == {(1, 0), (0, 1)}
    wall = SQ.locate((1, 0))
    assert wall == min(i for i in range(4) if SQ.contains(i, (1, 0)))
    assert set(P2.rays[i] for i in P2.cones[P2.locate((-2, -1))]) == {(-1, -1), (0, 1)}


# resolution

def test_resolve_weighted_projective_plane():
    r = resolve(WPS112)
    assert set(r.rays) - set(WPS112.rays) == {(0, -1)}
    assert all_unimodular(r)


def test_resolve_inserts_unique_interior_point():
    f = fan_2d([(1, 0), (1, 2), (-1, 0), (0, -1)])
    r = resolve(f)
    assert (1, 1) in r.rays
    assert all_unimodular(r)


def test_resolve_fixed_point_and_idempotent():
    assert resolve(P2) is P2
    r = resolve(WPS112)
    assert resolve(r) == r


def test_resolve_limit():
    f = fan_2d([(1, 0), (1, 7), (-1, 0), (0, -1)])
    with pytest.raises(ResolutionLimit):
        resolve(f, depth_limit=1)


@settings(max_examples=40, deadline=None)
@given(fans_2d)
def test_resolve_random_2d(f):
    r = resolve(f)
    assert all_unimodular(r)
    assert r.is_complete()
    assert refines(r, f)


@pytest.mark.parametrize("last", [(-1, -1, -2), (-1, -2, -3)])
def test_resolve_weighted_3d(last):
    rays = [(1, 0, 0), (0, 1, 0), (0, 0, 1), last]
    f = Fan.build(rays, [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    assert f.is_complete() and not f.is_smooth()
    r = resolve(f)
    assert all_unimodular(r)
    assert r.is_complete()
    assert refines(r, f)


def test_triangulated_normal_fan_keeps_cells():
    octa = hull([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    f = normal_fan(octa)
    assert len(f.cells) == 6
    assert all(len(c) == 4 for c in f.cells)
    assert len(f.cones) == 12
    assert f.is_complete()
    assert normal_fan(simplex(3)).cells is None


# serialization

@settings(max_examples=30, deadline=None)
@given(fans_2d)
def test_json_round_trip(f):
    assert Fan.from_json(f.to_json()) == f


def test_canonical_form():
    f = Fan.build([(0, 1), (-1, -1), (1, 0)], [(2, 0), (1, 2), (0, 1)])
    assert f == P2
    assert list(f.rays) == sorted(f.rays)

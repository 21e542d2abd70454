import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from csalgebra import fan as fanmod
from csalgebra.polytope import (
    ArityMismatch, EmptyInput, Halfspace, Polytope, box, empty, hull, intersection, minkowski_combination,
    minkowski_sum, mixed_volume, normal_fan, point, scale, simplex, support_value, translate, volume,
)
from conftest import lattice_polytopes, permanent, shoelace

S = box([1, 1])
T = simplex(2)
PENT = [(0, 0), (2, 0), (2, 1), (1, 2), (0, 2)]


def verts(p):
    return {tuple(int(x) if x.denominator == 1 else x for x in v) for v in p.vertices}


# hull

def test_hull_drops_interior_point():
    p = hull([(0, 0), (1, 0), (0, 1), (Fraction(1, 4), Fraction(1, 4))])
    assert verts(p) == {(0, 0), (1, 0), (0, 1)}


def test_hull_of_nothing_is_empty():
    assert hull([], dim=2).is_empty
    assert empty(2).is_empty


def test_hull_square_with_centre():
    p = hull([(0, 0), (1, 0), (1, 1), (0, 1), (Fraction(1, 2), Fraction(1, 2))])
    assert verts(p) == {(0, 0), (1, 0), (1, 1), (0, 1)}


def test_hull_dimension_mismatch():
    with pytest.raises(fanmod.DimensionMismatch):
        hull([(0, 0), (1, 0, 0)])


def test_hull_3d_drops_edge_and_face_points():
    pts = [(x, y, z) for x in (0, 1, 2) for y in (0, 1, 2) for z in (0, 1, 2)]
    assert verts(hull(pts)) == {(x, y, z) for x in (0, 2) for y in (0, 2) for z in (0, 2)}


def test_vertices_are_lex_sorted():
    p = hull([(1, 1), (0, 0), (1, 0), (0, 1)])
    assert list(p.vertices) == sorted(p.vertices)


# sums

def test_square_plus_triangle_is_pentagon():
    assert verts(minkowski_sum(S, T)) == set(PENT)


def test_sum_with_point_translates():
    assert minkowski_sum(S, point((3, 5))) == translate(S, (3, 5))


def test_triangle_doubling():
    assert minkowski_sum(T, T) == scale(T, 2)


def test_sum_with_empty_rejected():
    with pytest.raises(EmptyInput):
        minkowski_sum(S, empty(2))


# volumes

def test_volume_examples():
    assert volume(S) == 1
    assert volume(T) == Fraction(1, 2)
    assert volume(hull(PENT)) == Fraction(7, 2) == shoelace(PENT)


def test_volume_lower_dimensional_is_zero():
    assert volume(hull([(0, 0), (1, 1)])) == 0
    assert volume(hull([(0, 0, 0), (1, 0, 0), (0, 1, 0)])) == 0


def test_octahedron_volume():
    octa = hull([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    assert volume(octa) == Fraction(4, 3)


@settings(max_examples=60, deadline=None)
@given(lattice_polytopes(2))
def test_volume_2d_matches_shoelace(p):
    assert volume(p) == shoelace(p.vertices)


@settings(max_examples=30, deadline=None)
@given(lattice_polytopes(3, bound=3))
def test_volume_3d_matches_float_hull(p):
    assert abs(float(volume(p)) - ConvexHull([[float(x) for x in v] for v in p.vertices]).volume) < 1e-9


@settings(max_examples=40, deadline=None)
@given(lattice_polytopes(2), st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
       st.fractions(min_value=0, max_value=4, max_denominator=5))
def test_volume_translation_and_scaling(p, t, lam):
    assert volume(translate(p, t)) == volume(p)
    assert volume(scale(p, lam)) == lam ** 2 * volume(p)


# mixed volumes

def test_mixed_volume_examples():
    assert mixed_volume([S, S]) == 2
    assert mixed_volume([S, T]) == 2
    assert mixed_volume([T, T]) == 1
    assert mixed_volume([S, T]) == shoelace(PENT) - 1 - Fraction(1, 2)


def test_box_mixed_volume_is_permanent():
    rows = [(1, 1, 1), (1, 1, 1), (1, 2, 3)]
    assert mixed_volume([box(r) for r in rows]) == permanent(rows) == 12


def test_box_permanent_random():
    rng = random.Random(7)
    for _ in range(10):
        rows = [tuple(rng.randint(1, 5) for _ in range(3)) for _ in range(3)]
        assert mixed_volume([box(r) for r in rows]) == permanent(rows)


def test_mixed_volume_arity():
    with pytest.raises(ArityMismatch):
        mixed_volume([S])


@settings(max_examples=30, deadline=None)
@given(lattice_polytopes(2, bound=3), lattice_polytopes(2, bound=3), lattice_polytopes(2, bound=3),
       st.integers(0, 3), st.integers(0, 3))
def test_mixed_volume_properties(a, b, c, lam, mu):
    assert mixed_volume([a, b]) == mixed_volume([b, a]) >= 0
    assert mixed_volume([a, a]) == 2 * volume(a)
    combo = minkowski_combination([a, b], [lam, mu]) if lam or mu else point((0, 0))
    assert mixed_volume([combo, c]) == lam * mixed_volume([a, c]) + mu * mixed_volume([b, c])
    if b.contains((0, 0)):
        assert mixed_volume([a, c]) <= mixed_volume([minkowski_sum(a, b), c])


# support values and facets

def test_support_values():
    assert support_value(S, (1, 1)) == 0
    assert support_value(S, (-1, -1)) == -2
    assert support_value(T, (-1, 2)) == -1


@settings(max_examples=40, deadline=None)
@given(lattice_polytopes(2), lattice_polytopes(2), st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_support_additive(a, b, u):
    assert support_value(minkowski_sum(a, b), u) == support_value(a, u) + support_value(b, u)


def test_facets_describe_polytope():
    p = hull(PENT)
    assert len(p.facets) == 5
    for h in p.facets:
        assert all(h.contains(v) for v in p.vertices)
        assert Halfspace.from_json(h.to_json()) == h
    assert p.contains((1, 1))
    assert not p.contains((2, 2))


# normal fans

def test_normal_fan_square():
    f = normal_fan(S)
    assert set(f.rays) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert len(f.cones) == 4


def test_normal_fan_triangle_is_projective_plane():
    assert normal_fan(T) == fanmod.projective_space_fan(2)


def test_normal_fan_degenerate():
    with pytest.raises(fanmod.DegenerateFan):
        normal_fan(hull([(0, 0), (1, 1)]))


def test_normal_fan_cones_minimize():
    p = hull(PENT)
    f = normal_fan(p)
    for cone in f.cones:
        u = [sum(f.rays[i][k] for i in cone) for k in range(2)]
        best = support_value(p, u)
        assert sum(1 for v in p.vertices if v[0] * u[0] + v[1] * u[1] == best) == 1


@settings(max_examples=25, deadline=None)
@given(lattice_polytopes(2), lattice_polytopes(2))
def test_normal_fan_of_sum_is_common_refinement(a, b):
    assert normal_fan(minkowski_sum(a, b)) == fanmod.common_refinement(normal_fan(a), normal_fan(b))


def test_normal_fan_of_sum_3d():
    octa = hull([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    tet = simplex(3)
    assert normal_fan(minkowski_sum(octa, tet)) == fanmod.common_refinement(normal_fan(octa), normal_fan(tet))


# intersections and serialization

def test_intersection():
    a = box([2, 2])
    b = translate(a, (1, 1))
    assert intersection(a, b) == translate(box([1, 1]), (1, 1))
    assert intersection(a, translate(a, (5, 5))).is_empty
    assert volume(intersection(a, translate(a, (2, 0)))) == 0


@settings(max_examples=30, deadline=None)
@given(lattice_polytopes(2))
def test_json_round_trip(p):
    assert Polytope.from_json(p.to_json()) == p

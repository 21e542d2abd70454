import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from csalgebra.bodies import (
    DepthExceeded, NotSpanning, SupportOracle, builtin, builtin_kh, directions_up_to, incarnation, is_exact_on, is_nef,
    minkowski_oracle, oracle_from_polytope, outer_approx, parse_table, refine_until_nef, scaled_oracle,
    table_oracle, translated_oracle,
)
from csalgebra.fan import DimensionMismatch, common_refinement, cube_fan, fan_2d, projective_space_fan, refines
from csalgebra.polytope import EmptyInput, box, empty, hull, normal_fan, point, simplex, support_value, volume
from conftest import lattice_polytopes, random_blowup

S = box([1, 1])
T = simplex(2)
KH = builtin_kh()
SQ = cube_fan(2)
P2 = projective_space_fan(2)

vectors = st.tuples(st.fractions(-5, 5, max_denominator=6), st.fractions(-5, 5, max_denominator=6))


def kh_area_oracle(d: int) -> Fraction:
    """Area of {m : <m,v> >= h(v)} for all v with |v| <= d, by clipping the unit square."""
    from shapely.geometry import Polygon, box as sbox
    poly = sbox(-2, -2, 3, 3)
    for v in directions_up_to(2, d):
        c = float(KH(v))
        big = 100.0
        # halfplane <m, v> >= c as a large polygon
        a, b = float(v[0]), float(v[1])
        nrm = (a * a + b * b) ** 0.5
        p0 = (a * c / nrm ** 2, b * c / nrm ** 2)
        t = (-b / nrm, a / nrm)
        n = (a / nrm, b / nrm)
        half = Polygon([(p0[0] - big * t[0], p0[1] - big * t[1]), (p0[0] + big * t[0], p0[1] + big * t[1]),
                        (p0[0] + big * t[0] + big * n[0], p0[1] + big * t[1] + big * n[1]),
                        (p0[0] - big * t[0] + big * n[0], p0[1] - big * t[1] + big * n[1])])
        poly = poly.intersection(half)
    return poly.area


# oracles

def test_polytope_oracle_values():
    assert oracle_from_polytope(S)((-1, 0)) == -1
    assert oracle_from_polytope(T)((1, 1)) == 0
    pt = oracle_from_polytope(point((2, 3)))
    assert pt((5, -7)) == 2 * 5 - 3 * 7


def test_polytope_oracle_rejects_empty():
    with pytest.raises(EmptyInput):
        oracle_from_polytope(empty(2))


def test_kh_values():
    assert KH((1, 1)) == Fraction(1, 2)
    assert KH((1, 0)) == 0
    assert KH((-1, 2)) == -1
    assert builtin("kh") == KH
    with pytest.raises(ValueError):
        builtin("nope")


def test_kh_is_support_of_curved_body():
    # h(u) = min over the arc sqrt(x) + sqrt(y) = 1 when u >= 0, else over the corners (1,0), (0,1)
    for u in [(1, 1), (2, 1), (1, 3), (5, 2)]:
        x, y = u
        s = [(t * t, (1 - t) ** 2) for t in (i / 2000 for i in range(2001))]
        approx = min(a * x + b * y for a, b in s)
        assert abs(float(KH(u)) - approx) < 1e-5


@settings(max_examples=60, deadline=None)
@given(vectors, vectors, st.fractions(0, 6, max_denominator=5))
def test_oracles_conical_and_superadditive(u, w, lam):
    for h in (KH, oracle_from_polytope(hull([(0, 0), (3, 1), (1, 2)]))):
        assert h((lam * u[0], lam * u[1])) == lam * h(u)
        assert h((u[0] + w[0], u[1] + w[1])) >= h(u) + h(w)


def test_minkowski_oracles():
    pt = oracle_from_polytope(point((3, -1)))
    shifted = minkowski_oracle(KH, pt)
    assert shifted((2, 5)) == KH((2, 5)) + 6 - 5
    assert minkowski_oracle(oracle_from_polytope(S), oracle_from_polytope(T))((-1, -1)) == -3
    assert minkowski_oracle(KH, KH)((1, 1)) == 1
    with pytest.raises(DimensionMismatch):
        minkowski_oracle(KH, oracle_from_polytope(box([1, 1, 1])))


def test_scaled_and_translated():
    assert scaled_oracle(KH, 3)((1, 1)) == Fraction(3, 2)
    assert translated_oracle(KH, (1, 2))((1, 1)) == Fraction(7, 2)
    assert translated_oracle(oracle_from_polytope(S), (1, 0)).polytope == hull([(1, 0), (2, 0), (1, 1), (2, 1)])


# outer approximations

def test_outer_approx_kh_examples():
    a = outer_approx(KH, [(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1)])
    assert a == T
    b = outer_approx(KH, [(1, 0), (-1, 0), (0, 1), (0, -1), (-1, -1), (1, 1)])
    assert volume(b) == Fraction(3, 8)


def test_outer_approx_not_spanning():
    with pytest.raises(NotSpanning):
        outer_approx(KH, [(1, 0), (0, 1), (-1, 1)])


def test_outer_approx_areas_decrease_to_one_third():
    areas = [volume(outer_approx(KH, directions_up_to(2, d))) for d in (1, 2, 3, 4, 6, 8)]
    assert all(a >= b for a, b in zip(areas, areas[1:]))
    assert all(a > Fraction(1, 3) for a in areas)
    assert areas[-1] - Fraction(1, 3) < Fraction(1, 100)
    for d, a in zip((1, 2, 3), areas):
        assert abs(float(a) - kh_area_oracle(d)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(lattice_polytopes(2))
def test_outer_approx_reproduces_polytopes(p):
    assert outer_approx(oracle_from_polytope(p), normal_fan(p).rays) == p


def test_outer_approx_reproduces_3d_polytope():
    p = hull([(0, 0, 0), (2, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    assert outer_approx(oracle_from_polytope(p), normal_fan(p).rays) == p


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_outer_approx_support_dominates(seed):
    rng = random.Random(seed)
    extra = [(rng.randint(-4, 4), rng.randint(1, 4)) for _ in range(4)]
    f = fan_2d(extra + [(1, 0), (0, 1), (-1, 0), (0, -1), (-1, -1)])
    q = outer_approx(KH, f.rays)
    for r in f.rays:
        assert support_value(q, r) >= KH(r)
    assert support_value(q, (1, 0)) == KH((1, 0))


# incarnations

def test_incarnation_examples():
    inc = incarnation(KH, SQ)
    vals = dict(zip(SQ.rays, inc.coefficients))
    assert vals == {(1, 0): 0, (0, 1): 0, (-1, 0): 1, (0, -1): 1}
    assert inc.nef_flag
    assert outer_approx(KH, SQ.rays) == S
    inc = incarnation(oracle_from_polytope(T), P2)
    assert dict(zip(P2.rays, inc.coefficients)) == {(1, 0): 0, (0, 1): 0, (-1, -1): 1}
    assert inc.nef_flag


def test_triangle_on_square_fan_is_not_exact():
    # the interpolant passes the wall test but misses the triangle's kink along (-1,-1)
    h = oracle_from_polytope(T)
    inc = incarnation(h, SQ)
    assert dict(zip(SQ.rays, inc.coefficients)) == {(1, 0): 0, (0, 1): 0, (-1, 0): 1, (0, -1): 1}
    assert inc.nef_flag
    assert not is_exact_on(h, SQ)


def test_non_concave_values_fail_wall_test():
    vals = [0 if r != (-1, 0) else 1 for r in SQ.rays]
    assert not is_nef(SQ, vals)


@settings(max_examples=30, deadline=None)
@given(lattice_polytopes(2))
def test_incarnation_on_normal_fan_is_nef(p):
    assert incarnation(oracle_from_polytope(p), normal_fan(p)).nef_flag


def test_incarnation_3d():
    p = hull([(0, 0, 0), (2, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    f = normal_fan(p)
    assert incarnation(oracle_from_polytope(p), f).nef_flag
    assert is_exact_on(oracle_from_polytope(p), f)


# refinement to nef fans

def test_refine_examples():
    f, depth = refine_until_nef(oracle_from_polytope(T), SQ)
    assert depth == 1
    assert set(f.rays) - set(SQ.rays) == {(-1, -1)}
    assert f.is_smooth()
    f, depth = refine_until_nef(oracle_from_polytope(T), common_refinement(P2, SQ))
    assert depth == 0
    f, depth = refine_until_nef(KH, SQ)
    assert depth == 0 and f == SQ


def test_refine_table_oracle():
    h = table_oracle([((1, 0), 0), ((0, 1), 0), ((-1, -1), -1), ((1, 1), 0)])
    assert h.polytope == T
    f, depth = refine_until_nef(h, SQ)
    assert depth == 1
    assert refines(f, SQ) and f.is_smooth()
    assert incarnation(h, f).nef_flag


def test_non_concave_table_rejected():
    with pytest.raises(ValueError):
        table_oracle([((1, 0), 0), ((0, 1), 0), ((-1, 0), 0), ((0, -1), 0), ((1, 1), 1)])


def test_refine_by_wall_insertion_3d():
    octa = hull([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)])
    h = SupportOracle(3, lambda u: support_value(octa, u), "builtin", ("test", "octahedron"))
    rng = random.Random(0)
    start = random_blowup(rng, random_blowup(rng, cube_fan(3)))
    assert not incarnation(h, start).nef_flag
    f, depth = refine_until_nef(h, start)
    assert depth >= 1
    assert refines(f, start) and f.is_smooth()
    assert incarnation(h, f).nef_flag


def test_refine_depth_exceeded():
    h = table_oracle([((1, 0), 0), ((0, 1), 0), ((-1, -1), -1)])
    with pytest.raises(DepthExceeded) as err:
        refine_until_nef(h, SQ, depth_limit=0)
    assert err.value.depth == 0


def test_parse_table():
    data = {"dim": 2, "values": [{"u": [1, 0], "h": "0"}, {"u": [0, 1], "h": "0"},
                                 {"u": [-1, -1], "h": "-1"}]}
    h = parse_table(data)
    assert h.kind == "user-table"
    assert h((-2, -2)) == -2
    assert h.polytope == T
    three = {"dim": 3, "fan": projective_space_fan(3).to_json(),
             "values": [{"u": list(r), "h": "0"} for r in projective_space_fan(3).rays]}
    assert parse_table(three)((1, 2, 3)) == 0

import itertools
import math
import os
import random
import sys
from fractions import Fraction

import pytest
from hypothesis import assume, strategies as st

from csalgebra import fan as fanmod
from csalgebra.polytope import hull, support_value
from csalgebra.ppoly import PiecewisePolynomial

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA, name)


def shoelace(points) -> Fraction:
    """Area of a polygon given by its vertices in any order (sorted by angle first)."""
    cx = sum(Fraction(p[0]) for p in points) / len(points)
    cy = sum(Fraction(p[1]) for p in points) / len(points)
    pts = sorted(points, key=lambda p: math.atan2(float(p[1] - cy), float(p[0] - cx)))
    s = sum(Fraction(a[0]) * b[1] - Fraction(b[0]) * a[1] for a, b in zip(pts, pts[1:] + pts[:1]))
    return abs(s) / 2


def permanent(m) -> int:
    n = len(m)
    return sum(math.prod(m[i][s[i]] for i in range(n)) for s in itertools.permutations(range(n)))


@st.composite
def lattice_polytopes(draw, n=2, bound=4, min_pts=None, max_pts=None):
    lo = min_pts or n + 1
    hi = max_pts or n + 4
    k = draw(st.integers(lo, hi))
    pts = [tuple(draw(st.integers(-bound, bound)) for _ in range(n)) for _ in range(k)]
    p = hull(pts)
    assume(p.is_full_dimensional)
    return p


def random_fan_2d(rng: random.Random, count: int = 6, bound: int = 4) -> fanmod.Fan:
    """Complete 2D fan on random rays (usually not smooth)."""
    while True:
        rays = [(rng.randint(-bound, bound), rng.randint(-bound, bound)) for _ in range(count)]
        rays = [r for r in rays if r != (0, 0)]
        try:
            return fanmod.fan_2d(rays)
        except fanmod.FanError:
            continue


@pytest.fixture
def rng():
    return random.Random(12345)


def star_subdivide(f: fanmod.Fan, face) -> fanmod.Fan:
    """Insert the sum of the face's rays and split every cone containing the face."""
    face = [tuple(r) for r in face]
    w = fanmod.primitive([sum(r[k] for r in face) for k in range(f.dim)])
    cones = []
    for c in f.cones:
        rs = [f.rays[i] for i in c]
        if all(r in rs for r in face):
            for r in face:
                cones.append([x if x != r else w for x in rs])
        else:
            cones.append(rs)
    return fanmod.Fan.from_vector_cones(cones, f.dim)


def random_blowup(rng: random.Random, f: fanmod.Fan) -> fanmod.Fan:
    """Star subdivision at a random face of dimension at least 2 (keeps smoothness)."""
    c = [f.rays[i] for i in rng.choice(f.cones)]
    k = rng.randint(2, len(c))
    return star_subdivide(f, rng.sample(c, k))


def smooth_chain(rng: random.Random, base: fanmod.Fan, steps=(1, 1)):
    """Fans fine >= middle >= base built by random blow-ups."""
    middle = base
    for _ in range(steps[0]):
        middle = random_blowup(rng, middle)
    fine = middle
    for _ in range(steps[1]):
        fine = random_blowup(rng, fine)
    return fine, middle, base


def support_pl(f: fanmod.Fan, p):
    """Support function of ``p`` as a conewise linear function on ``f``."""
    return PiecewisePolynomial.from_ray_values(f, [support_value(p, r) for r in f.rays])


def pytest_terminal_summary(terminalreporter):
    results = getattr(sys.modules.get("test_acceptance"), "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        verdict, title, elapsed = results[number]
        terminalreporter.write_line(f"{verdict} criterion {number}: {title} ({elapsed:.2f}s)")

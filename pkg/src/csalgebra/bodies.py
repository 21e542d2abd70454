"""Convex bodies given by support functions, their fan incarnations and outer approximations."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Callable, Mapping, Sequence

from .exactgeom import Q, dot, fmt_q, nullspace, primitive, solve_linear
from .fan import DimensionMismatch, Fan, _angle_cmp_2d, common_refinement, fan_2d, resolve
from .polytope import EmptyInput, Polytope, hull, minkowski_sum, normal_fan, scale, support_value, translate


class NotSpanning(ValueError):
    pass


class DepthExceeded(RuntimeError):
    def __init__(self, message: str, depth: int):
        super().__init__(message)
        self.depth = depth


class SupportOracle:
    """A conical, concave, rational-valued function h(u) = inf_{m in K} <m, u>.

    ``key`` identifies the body up to equality of support functions for
    polytope-backed oracles, and up to construction otherwise.
    """

    def __init__(self, dim: int, fn: Callable[[tuple], Fraction], kind: str, key,
                 polytope: Polytope | None = None):
        self.dim = dim
        self._fn = fn
        self.kind = kind
        self.key = key
        self.polytope = polytope

    def __call__(self, u: Sequence) -> Fraction:
        u = tuple(Q(x) for x in u)
        if len(u) != self.dim:
            raise DimensionMismatch(f"expected a vector of length {self.dim}")
        return Q(self._fn(u))

    eval = __call__

    @property
    def is_polytope(self) -> bool:
        return self.polytope is not None

    def __eq__(self, other):
        return isinstance(other, SupportOracle) and self.dim == other.dim and self.key == other.key

    def __hash__(self):
        return hash((self.dim, self.key))

    def __repr__(self):
        return f"SupportOracle({self.kind}, {self.key!r})"


def oracle_from_polytope(p: Polytope) -> SupportOracle:
    if p.is_empty:
        raise EmptyInput("support function of the empty set")
    return SupportOracle(p.dim, lambda u: support_value(p, u), "polytope", ("P", p.vertices), p)


def kh(x: Fraction, y: Fraction) -> Fraction:
    if x >= 0 and y >= 0 and x + y > 0:
        return x * y / (x + y)
    return min(x, y)


def builtin_kh() -> SupportOracle:
    """Support function of {x, y >= 0, x + y <= 1, sqrt(x) + sqrt(y) >= 1}."""
    return SupportOracle(2, lambda u: kh(u[0], u[1]), "builtin", ("builtin", "kh"))


BUILTINS = {"kh": builtin_kh}


def builtin(name: str) -> SupportOracle:
    try:
        return BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown builtin body {name!r}") from None


def table_oracle(values: Sequence[tuple[Sequence[int], object]], fan: Fan | None = None) -> SupportOracle:
    """Piecewise linear oracle interpolating tabulated values on the rays of a fan."""
    pairs = [(primitive(u), Q(h) / math.gcd(*[int(x) for x in u])) for u, h in values]
    dim = len(pairs[0][0])
    if fan is None:
        if dim != 2:
            raise ValueError("user tables in dimension != 2 need an explicit fan")
        fan = fan_2d([u for u, _ in pairs])
    table = dict(pairs)
    missing = [r for r in fan.rays if r not in table]
    if missing:
        raise ValueError(f"no value given for rays {missing}")
    ray_vals = [table[r] for r in fan.rays]
    if not is_nef(fan, ray_vals):
        raise ValueError("tabulated values are not concave on their fan")
    lin = []
    for ci, c in enumerate(fan.cones):
        forms = fan.dual_forms[ci]
        lin.append(tuple(sum(ray_vals[r] * forms[j][k] for j, r in enumerate(c)) for k in range(dim)))

    def fn(u):
        return dot(lin[fan.locate(u)], u)

    poly = outer_approx_from_values(fan.rays, ray_vals)
    return SupportOracle(dim, fn, "user-table", ("table", fan.rays, tuple(ray_vals)), poly)


def minkowski_oracle(a: SupportOracle, b: SupportOracle) -> SupportOracle:
    if a.dim != b.dim:
        raise DimensionMismatch("oracles of different dimension")
    if a.is_polytope and b.is_polytope:
        return oracle_from_polytope(minkowski_sum(a.polytope, b.polytope))
    return SupportOracle(a.dim, lambda u: a(u) + b(u), "sum", ("sum",) + tuple(sorted((a.key, b.key), key=repr)))


def scaled_oracle(a: SupportOracle, c) -> SupportOracle:
    c = Q(c)
    if c < 0:
        raise ValueError("negative Minkowski scaling")
    if c == 1:
        return a
    if a.is_polytope:
        return oracle_from_polytope(scale(a.polytope, c))
    return SupportOracle(a.dim, lambda u: c * a(u), "scaled", ("scaled", c, a.key))


def translated_oracle(a: SupportOracle, t: Sequence) -> SupportOracle:
    t = [Q(x) for x in t]
    if a.is_polytope:
        return oracle_from_polytope(translate(a.polytope, t))
    return SupportOracle(a.dim, lambda u: a(u) + dot(t, u), "translated", ("translated", tuple(t), a.key))


def linear_part(h: SupportOracle) -> tuple[Fraction, ...]:
    """Values at the standard basis vectors; subtracting them pins translations."""
    return tuple(h(tuple(int(i == j) for j in range(h.dim))) for i in range(h.dim))


# ---------------------------------------------------------------------------
# outer approximations
# ---------------------------------------------------------------------------

def _positively_spanning(dirs: Sequence[tuple[int, ...]]) -> bool:
    n = len(dirs[0])
    if n == 1:
        return any(d[0] > 0 for d in dirs) and any(d[0] < 0 for d in dirs)
    if n == 2:
        ds = sorted(set(primitive(d) for d in dirs), key=cmp_to_key(_angle_cmp_2d))
        if len(ds) < 3:
            return False
        for k in range(len(ds)):
            a, b = ds[k], ds[(k + 1) % len(ds)]
            if a[0] * b[1] - a[1] * b[0] <= 0:
                return False
        return True
    return _cone_is_everything(dirs)


def _cone_is_everything(dirs) -> bool:
    """Every +-e_i is a nonnegative combination (checked by a small exact LP on vertices)."""
    n = len(dirs[0])
    for i in range(n):
        for s in (1, -1):
            target = tuple(s * int(i == j) for j in range(n))
            if not _in_cone_generated(dirs, target):
                return False
    return True


def _in_cone_generated(dirs, target) -> bool:
    n = len(target)
    for sub in itertools.combinations(range(len(dirs)), n):
        m = [[dirs[j][r] for j in sub] for r in range(n)]
        sol = solve_linear(m, target)
        if sol.consistent and not sol.kernel and all(x >= 0 for x in sol.solution):
            return True
    return False


def _clip(poly: list[tuple], v: Sequence, c: Fraction) -> list[tuple]:
    """Clip a convex polygon by {m : <m, v> >= c}."""
    out = []
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        fp, fq = dot(v, p) - c, dot(v, q) - c
        if fp >= 0:
            out.append(p)
        if (fp > 0 > fq) or (fp < 0 < fq):
            t = fp / (fp - fq)
            out.append(tuple(a + t * (b - a) for a, b in zip(p, q)))
    dedup = []
    for p in out:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    return dedup


def _bounding_box_2d(dirs, vals) -> list[tuple]:
    ds = sorted(range(len(dirs)), key=cmp_to_key(lambda i, j: _angle_cmp_2d(dirs[i], dirs[j])))
    bounds = {}
    for i in range(2):
        for s in (1, -1):
            target = tuple(s * int(i == j) for j in range(2))
            best = None
            for k in range(len(ds)):
                a, b = ds[k], ds[(k + 1) % len(ds)]
                va, vb = dirs[a], dirs[b]
                det_ = va[0] * vb[1] - va[1] * vb[0]
                la = Fraction(target[0] * vb[1] - target[1] * vb[0], det_)
                lb = Fraction(va[0] * target[1] - va[1] * target[0], det_)
                if la >= 0 and lb >= 0:
                    best = la * vals[a] + lb * vals[b]
                    break
            bounds[(i, s)] = best
    x0, x1 = bounds[(0, 1)], -bounds[(0, -1)]
    y0, y1 = bounds[(1, 1)], -bounds[(1, -1)]
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def outer_approx_from_values(dirs: Sequence[Sequence[int]], vals: Sequence) -> Polytope:
    """Intersection of the halfspaces {m : <m, d> >= val} (bounded)."""
    dirs = [tuple(int(x) for x in d) for d in dirs]
    vals = [Q(v) for v in vals]
    n = len(dirs[0])
    if not _positively_spanning(dirs):
        raise NotSpanning("directions do not positively span; the intersection is unbounded")
    if n == 1:
        lo = max(v for d, v in zip(dirs, vals) if d[0] > 0)
        hi = min(-v for d, v in zip(dirs, vals) if d[0] < 0)
        return hull([(lo,), (hi,)]) if lo <= hi else Polytope(1, ())
    if n == 2:
        poly = _bounding_box_2d(dirs, vals)
        for d, v in zip(dirs, vals):
            poly = _clip(poly, d, v)
            if not poly:
                return Polytope(2, ())
        return hull(poly, dim=2)
    pts = []
    for trip in itertools.combinations(range(len(dirs)), n):
        sol = solve_linear([dirs[i] for i in trip], [vals[i] for i in trip])
        if not sol.consistent or sol.kernel:
            continue
        m = sol.solution
        if all(dot(d, m) >= v for d, v in zip(dirs, vals)):
            pts.append(m)
    return hull(pts, dim=n)


def outer_approx(h: SupportOracle, directions: Sequence[Sequence[int]]) -> Polytope:
    dirs = [primitive(d) for d in directions]
    return outer_approx_from_values(dirs, [h(d) for d in dirs])


def directions_up_to(n: int, d: int) -> list[tuple[int, ...]]:
    """All primitive integer vectors of sup-norm at most ``d``."""
    out = []
    for v in itertools.product(range(-d, d + 1), repeat=n):
        if any(v) and math.gcd(*v) == 1:
            out.append(v)
    return out


# ---------------------------------------------------------------------------
# incarnations and nefness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Incarnation:
    fan: Fan
    coefficients: tuple[Fraction, ...]
    nef_flag: bool

    def ray_values(self) -> tuple[Fraction, ...]:
        return tuple(-a for a in self.coefficients)

    def to_json(self) -> dict:
        return {"fan": self.fan.to_json(), "coefficients": [fmt_q(a) for a in self.coefficients],
                "nef": self.nef_flag}


def _interpolant(fan: Fan, vals: Sequence[Fraction], ci: int) -> tuple[Fraction, ...]:
    forms = fan.dual_forms[ci]
    return tuple(sum(vals[r] * forms[j][k] for j, r in enumerate(fan.cones[ci])) for k in range(fan.dim))


def is_nef(fan: Fan, vals: Sequence[Fraction]) -> bool:
    """Wall test: each cone's linear interpolant dominates the value at the far ray of its neighbour."""
    for wall, cs in fan.walls.items():
        if len(cs) != 2:
            continue
        for a, b in (cs, cs[::-1]):
            lin = _interpolant(fan, vals, a)
            opp = next(r for r in fan.cones[b] if r not in wall)
            if dot(lin, fan.rays[opp]) < vals[opp]:
                return False
    return True


def incarnation(h: SupportOracle, fan: Fan) -> Incarnation:
    vals = [h(r) for r in fan.rays]
    return Incarnation(fan, tuple(-v for v in vals), is_nef(fan, vals))


def is_exact_on(h: SupportOracle, fan: Fan) -> bool:
    """True iff ``h`` is linear on every maximal cone (sampled at the cone's barycentre)."""
    vals = [h(r) for r in fan.rays]
    for c in fan.cones:
        centre = [sum(fan.rays[r][k] for r in c) for k in range(fan.dim)]
        if h(centre) != sum(vals[r] for r in c):
            return False
    return True


def _violating_walls(fan: Fan, vals) -> list[frozenset]:
    bad = []
    for wall, cs in sorted(fan.walls.items(), key=lambda kv: sorted(kv[0])):
        for a, b in (cs, cs[::-1]):
            lin = _interpolant(fan, vals, a)
            opp = next(r for r in fan.cones[b] if r not in wall)
            if dot(lin, fan.rays[opp]) < vals[opp]:
                bad.append((wall, cs))
                break
    return bad


def refine_until_nef(h: SupportOracle, start: Fan, depth_limit: int = 8) -> tuple[Fan, int]:
    """Smooth refinement of ``start`` carrying a nef incarnation of ``h``.

    Polytope-backed oracles must in addition be linear on every cone, so the
    incarnation realizes the polytope itself; this takes one step (refine by
    the normal fan, then resolve).  Other oracles get, per step, the kink ray
    of every violated wall (where the segment joining the two opposite rays
    crosses the wall's span), followed by a resolution.
    """
    fan = start
    for depth in range(depth_limit + 1):
        vals = [h(r) for r in fan.rays]
        nef = is_nef(fan, vals)
        if nef and (not h.is_polytope or is_exact_on(h, fan)):
            return fan, depth
        if depth == depth_limit:
            break
        if h.is_polytope:
            fan = resolve(common_refinement(fan, normal_fan(h.polytope)))
            continue
        new_rays = sorted({_kink_ray(fan, wall, cs) for wall, cs in _violating_walls(fan, vals)})
        for r in new_rays:
            fan = _star(fan, r)
        fan = resolve(fan)
    raise DepthExceeded(f"no nef incarnation found within depth {depth_limit}", depth_limit)


def _kink_ray(fan: Fan, wall: frozenset, cs) -> tuple[int, ...]:
    """Primitive ray where the segment between the rays opposite ``wall`` meets its span."""
    a, b = (fan.rays[next(r for r in fan.cones[ci] if r not in wall)] for ci in cs)
    nu = nullspace([fan.rays[r] for r in sorted(wall)])[0]
    sa, sb = abs(dot(nu, a)), abs(dot(nu, b))
    return primitive([sb * x + sa * y for x, y in zip(a, b)])


def _star(fan: Fan, w: tuple[int, ...]) -> Fan:
    """Stellar subdivision of ``fan`` at the ray ``w``."""
    if w in fan.ray_index:
        return fan
    face = fan.minimal_face(w)
    cones = []
    for c in fan.cones:
        if face <= set(c):
            for r in face:
                cones.append([fan.rays[x] for x in c if x != r] + [w])
        else:
            cones.append([fan.rays[x] for x in c])
    return Fan.from_vector_cones(cones, fan.dim)


def nef_fan(h: SupportOracle, start: Fan, depth_limit: int = 8) -> Fan:
    return refine_until_nef(h, start, depth_limit)[0]


def parse_table(data: Mapping) -> SupportOracle:
    fan = Fan.from_json(data["fan"]) if "fan" in data else None
    return table_oracle([(e["u"], e["h"]) for e in data["values"]], fan)

"""Rational polytopes in dimension <= 3: hulls, Minkowski sums, volumes, normal fans."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .exactgeom import Q, dot, fmt_q, primitive, rank, solve_linear
from .fan import DegenerateFan, DimensionMismatch, Fan

RatVec = tuple[Fraction, ...]


class EmptyInput(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Halfspace:
    """The set {m : <m, normal> >= offset}."""

    normal: tuple[int, ...]
    offset: Fraction

    def contains(self, m: Sequence) -> bool:
        return dot(self.normal, m) >= self.offset

    def to_json(self) -> dict:
        return {"normal": list(self.normal), "offset": fmt_q(self.offset)}

    @classmethod
    def from_json(cls, data: dict) -> "Halfspace":
        return cls(tuple(int(x) for x in data["normal"]), Q(data["offset"]))


# ---------------------------------------------------------------------------
# hull kernels on integer points
# ---------------------------------------------------------------------------

def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _idot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _hull2(pts: list[tuple]) -> list[tuple]:
    """Strict convex hull in counter-clockwise order (Andrew's monotone chain)."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def turn(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _hull3(pts: list[tuple]) -> list[tuple]:
    """Boundary triangles of a full-dimensional 3-d hull, outward oriented."""
    pts = sorted(set(pts))
    p0 = pts[0]
    p1 = next(p for p in pts if p != p0)
    d1 = _sub(p1, p0)
    p2 = next(p for p in pts if _cross(d1, _sub(p, p0)) != (0, 0, 0))
    nrm = _cross(d1, _sub(p2, p0))
    p3 = next(p for p in pts if _idot(nrm, _sub(p, p0)) != 0)
    base = [p0, p1, p2, p3]

    def plane(tri):
        a, b, c = tri
        n = _cross(_sub(b, a), _sub(c, a))
        return n, _idot(n, a)

    # insert extreme points along a few directions first so most later points are interior
    dirs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, -1, 0), (0, 1, -1), (1, 0, -1),
            (1, 1, -1), (1, -1, 1), (-1, 1, 1)]
    first = []
    for d in dirs:
        for pick in (max, min):
            q = pick(pts, key=lambda p: d[0] * p[0] + d[1] * p[1] + d[2] * p[2])
            if q not in first:
                first.append(q)
    seen = set(first)
    pts = first + [p for p in pts if p not in seen]
    faces: dict = {}
    for k in range(4):
        tri = [base[j] for j in range(4) if j != k]
        n, off = plane(tri)
        if _idot(n, base[k]) > off:
            tri[1], tri[2] = tri[2], tri[1]
            n, off = tuple(-x for x in n), -off
        faces[tuple(tri)] = (n, off)
    for p in pts:
        if p in base:
            continue
        x, y, z = p
        visible = [f for f, (n, off) in faces.items() if n[0] * x + n[1] * y + n[2] * z > off]
        if not visible:
            continue
        edges = set()
        for a, b, c in visible:
            edges.update(((a, b), (b, c), (c, a)))
        for f in visible:
            del faces[f]
        for a, b in edges:
            if (b, a) not in edges:
                tri = (a, b, p)
                faces[tri] = plane(tri)
    return list(faces)


def _affine_dim_int(pts: list[tuple]) -> int:
    """Affine dimension of integer points in ambient dimension <= 3."""
    p0 = pts[0]
    diffs = [_sub(p, p0) for p in pts[1:]]
    d1 = next((d for d in diffs if any(d)), None)
    if d1 is None:
        return 0
    if len(p0) == 1:
        return 1
    if len(p0) == 2:
        return 2 if any(d1[0] * d[1] - d1[1] * d[0] for d in diffs) else 1
    nrm = next((c for c in (_cross(d1, d) for d in diffs) if c != (0, 0, 0)), None)
    if nrm is None:
        return 1
    return 3 if any(_idot(nrm, d) for d in diffs) else 2


def _scale_to_int(points: Sequence[RatVec]):
    den = 1
    for p in points:
        for x in p:
            den = den * x.denominator // math.gcd(den, x.denominator)
    return den, [tuple(x.numerator * (den // x.denominator) for x in p) for p in points]


# ---------------------------------------------------------------------------
# polytope
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Polytope:
    dim: int
    vertices: tuple[RatVec, ...]

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @cached_property
    def affine_dim(self) -> int:
        if not self.vertices:
            return -1
        if self.dim <= 3:
            return _affine_dim_int(_scale_to_int(self.vertices)[1])
        v0 = self.vertices[0]
        return rank([_sub(v, v0) for v in self.vertices[1:]]) if len(self.vertices) > 1 else 0

    @property
    def is_full_dimensional(self) -> bool:
        return self.affine_dim == self.dim

    @cached_property
    def _boundary(self):
        """Facets as (inward normal, offset, vertex ids) and boundary triangles."""
        n = self.dim
        if not self.is_full_dimensional:
            raise DegenerateFan("polytope is not full-dimensional")
        verts = self.vertices
        if n == 1:
            return [((1,), verts[0][0], (0,)), ((-1,), -verts[1][0], (1,))], []
        den, ipts = _scale_to_int(verts)
        idx = {p: i for i, p in enumerate(ipts)}
        if n == 2:
            cyc = _hull2(ipts)
            facets = []
            for k in range(len(cyc)):
                a, b = cyc[k], cyc[(k + 1) % len(cyc)]
                inward = primitive((a[1] - b[1], b[0] - a[0]))
                off = Fraction(_idot(inward, a), den)
                facets.append((inward, off, tuple(sorted((idx[a], idx[b])))))
            tris = [(idx[cyc[0]], idx[cyc[k]], idx[cyc[k + 1]]) for k in range(1, len(cyc) - 1)]
            return facets, tris
        if n == 3:
            tris = _hull3(ipts)
            planes: dict = {}
            for a, b, c in tris:
                outward = primitive(_cross(_sub(b, a), _sub(c, a)))
                inward = tuple(-x for x in outward)
                planes.setdefault((inward, _idot(inward, a)), set()).update((a, b, c))
            facets = []
            for (inward, off), on in planes.items():
                facets.append((inward, Fraction(off, den), tuple(sorted(idx[p] for p in on))))
            facets.sort()
            return facets, [tuple(idx[p] for p in t) for t in tris]
        raise NotImplementedError("facet enumeration implemented for n <= 3")

    @cached_property
    def facets(self) -> tuple[Halfspace, ...]:
        return tuple(Halfspace(nrm, off) for nrm, off, _ in self._boundary[0])

    def facet_vertices(self) -> list[tuple[int, ...]]:
        return [ids for _, _, ids in self._boundary[0]]

    def contains(self, m: Sequence) -> bool:
        m = [Q(x) for x in m]
        if self.is_full_dimensional:
            return all(h.contains(m) for h in self.facets)
        if self.is_empty:
            return False
        return hull(list(self.vertices) + [tuple(m)]).vertices == self.vertices

    def to_json(self) -> dict:
        return {"dim": self.dim, "vertices": [[fmt_q(x) for x in v] for v in self.vertices]}

    @classmethod
    def from_json(cls, data: dict) -> "Polytope":
        return hull([[Q(x) for x in v] for v in data["vertices"]], dim=data["dim"])

    def __repr__(self):
        return f"Polytope({[tuple(fmt_q(x) for x in v) for v in self.vertices]})"


def _lift(points: list[RatVec], dim: int) -> list[RatVec]:
    """Extreme points of a finite set (any affine dimension, ambient dim <= 3)."""
    v0 = points[0]
    diffs = [_sub(p, v0) for p in points]
    d = rank(diffs)
    if d == 0:
        return [v0]
    coords = next(c for c in itertools.combinations(range(dim), d)
                  if rank([[v[i] for i in c] for v in diffs]) == d)
    proj = [tuple(p[i] for i in coords) for p in points]
    back = {}
    for p, q in zip(points, proj):
        back.setdefault(q, p)
    den, ipts = _scale_to_int(proj)
    iback = {ip: back[q] for ip, q in zip(ipts, proj)}
    if d == 1:
        return [iback[min(ipts)], iback[max(ipts)]]
    if d == 2:
        return [iback[p] for p in _hull2(ipts)]
    if d == 3:
        return [iback[p] for t in _hull3(ipts) for p in t]
    raise NotImplementedError("hull implemented for affine dimension <= 3")


def hull(points: Iterable[Sequence], dim: int | None = None) -> Polytope:
    pts = [tuple(Q(x) for x in p) for p in points]
    if dim is None:
        if not pts:
            raise DimensionMismatch("cannot infer the dimension of an empty point set")
        dim = len(pts[0])
    if any(len(p) != dim for p in pts):
        raise DimensionMismatch("points of different dimensions")
    if not pts:
        return Polytope(dim, ())
    pts = sorted(set(pts))
    if dim == 3:
        den, ipts = _scale_to_int(pts)
        if len(ipts) > 3 and _affine_dim_int(ipts) == 3:
            ext = [tuple(Fraction(x, den) for x in p) for p in _prune_3d(_hull3_points(ipts))]
            return Polytope(dim, tuple(sorted(ext)))
    ext = _lift(pts, dim)
    return Polytope(dim, tuple(sorted(set(ext))))


def _hull3_points(ipts: list[tuple]) -> list[tuple]:
    return sorted({p for t in _hull3(ipts) for p in t})


def _prune_3d(ipts: list[tuple]) -> list[tuple]:
    """Drop boundary points of a 3-d integer hull that are not vertices of their facets."""
    tris = _hull3(ipts)
    planes: dict = {}
    for a, b, c in tris:
        nrm = primitive(_cross(_sub(b, a), _sub(c, a)))
        planes.setdefault((nrm, _idot(nrm, a)), set()).update((a, b, c))
    keep = set()
    for (nrm, _), on in planes.items():
        axis = next(i for i in range(3) if nrm[i] != 0)
        coords = [i for i in range(3) if i != axis]
        proj = {tuple(p[i] for i in coords): p for p in on}
        for q in _hull2(list(proj)):
            keep.add(proj[q])
    return list(keep)


def empty(dim: int) -> Polytope:
    return Polytope(dim, ())


def point(p: Sequence) -> Polytope:
    return hull([p])


def box(lengths: Sequence) -> Polytope:
    """Axis-parallel box [0, l_1] x ... x [0, l_n]."""
    ls = [Q(x) for x in lengths]
    return hull(itertools.product(*[(Fraction(0), l) for l in ls]))


def simplex(n: int, scale=1) -> Polytope:
    s = Q(scale)
    return hull([tuple([Fraction(0)] * n)] + [tuple(s * int(i == j) for j in range(n)) for i in range(n)])


def translate(p: Polytope, t: Sequence) -> Polytope:
    t = [Q(x) for x in t]
    return Polytope(p.dim, tuple(sorted(tuple(a + b for a, b in zip(v, t)) for v in p.vertices)))


def scale(p: Polytope, lam) -> Polytope:
    lam = Q(lam)
    if lam < 0:
        raise ValueError("negative scaling")
    if lam == 0:
        return point([0] * p.dim) if not p.is_empty else p
    return Polytope(p.dim, tuple(tuple(lam * x for x in v) for v in p.vertices))


def minkowski_sum(a: Polytope, b: Polytope) -> Polytope:
    if a.dim != b.dim:
        raise DimensionMismatch("polytopes of different dimensions")
    if a.is_empty or b.is_empty:
        raise EmptyInput("Minkowski sum with the empty set is not supported")
    if a.dim == 3:
        den, ipts = _scale_to_int(a.vertices + b.vertices)
        ia, ib = ipts[:len(a.vertices)], ipts[len(a.vertices):]
        sums = sorted({(u[0] + v[0], u[1] + v[1], u[2] + v[2]) for u in ia for v in ib})
        if len(sums) > 3 and _affine_dim_int(sums) == 3:
            ext = sorted(_prune_3d(_hull3_points(sums)))
            return Polytope(3, tuple(tuple(Fraction(x, den) for x in p) for p in ext))
    return hull([tuple(x + y for x, y in zip(u, v)) for u in a.vertices for v in b.vertices], dim=a.dim)


def minkowski_combination(polys: Sequence[Polytope], coeffs: Sequence) -> Polytope:
    """sum_i c_i P_i for nonnegative rational c_i."""
    out = None
    for p, c in zip(polys, coeffs):
        q = scale(p, c)
        out = q if out is None else minkowski_sum(out, q)
    if out is None:
        raise EmptyInput("empty combination")
    return out


def volume(p: Polytope) -> Fraction:
    if p.is_empty:
        raise EmptyInput("volume of the empty set")
    if not p.is_full_dimensional:
        return Fraction(0)
    n = p.dim
    v = p.vertices
    if n == 1:
        return v[1][0] - v[0][0]
    facets, tris = p._boundary
    den, v = _scale_to_int(v)
    apex = v[0]
    total = 0
    if n == 2:
        for i, j, k in tris:
            a, b = _sub(v[j], v[i]), _sub(v[k], v[i])
            total += abs(a[0] * b[1] - a[1] * b[0])
        return Fraction(total, 2 * den ** 2)
    for i, j, k in tris:
        a, b, c = _sub(v[i], apex), _sub(v[j], apex), _sub(v[k], apex)
        total += abs(_idot(_cross(a, b), c))
    return Fraction(total, 6 * den ** 3)


def mixed_volume(bodies: Sequence[Polytope]) -> Fraction:
    """Mixed volume by inclusion-exclusion over Minkowski sums of sub-families."""
    if not bodies:
        raise ArityMismatch("no bodies")
    n = bodies[0].dim
    if len(bodies) != n:
        raise ArityMismatch(f"need exactly {n} bodies, got {len(bodies)}")
    if any(b.dim != n for b in bodies):
        raise DimensionMismatch("bodies of different dimensions")
    if any(b.is_empty for b in bodies):
        raise EmptyInput("mixed volume of the empty set")
    if all(b == bodies[0] for b in bodies):
        return math.factorial(n) * volume(bodies[0])
    sums: dict = {}
    total = Fraction(0)
    for size in range(1, n + 1):
        for sub in itertools.combinations(range(n), size):
            s = bodies[sub[0]] if size == 1 else minkowski_sum(sums[sub[:-1]], bodies[sub[-1]])
            sums[sub] = s
            total += (-1) ** (n - size) * volume(s)
    return total


def support_value(p: Polytope, u: Sequence) -> Fraction:
    """min over the polytope of <m, u>."""
    if p.is_empty:
        raise EmptyInput("support function of the empty set")
    u = [Q(x) for x in u]
    return min(dot(v, u) for v in p.vertices)


def normal_fan(p: Polytope) -> Fan:
    """Fan of the cones {u : <v,u> = min_P <.,u>}, one per vertex v."""
    if p.is_empty or not p.is_full_dimensional:
        raise DegenerateFan("normal fan needs a full-dimensional polytope")
    facets = p._boundary[0]
    normals = [f[0] for f in facets]
    cones = []
    for vi in range(len(p.vertices)):
        cones.append([k for k, f in enumerate(facets) if vi in f[2]])
    return Fan.build(normals, cones, triangulate=True, dim=p.dim)


def intersection(a: Polytope, b: Polytope) -> Polytope:
    """Intersection of two full-dimensional polytopes (possibly empty or lower-dimensional)."""
    if a.dim != b.dim:
        raise DimensionMismatch("polytopes of different dimensions")
    if a.is_empty or b.is_empty:
        return Polytope(a.dim, ())
    if not (a.is_full_dimensional and b.is_full_dimensional):
        raise DegenerateFan("intersection needs full-dimensional polytopes")
    hs = list(a.facets) + list(b.facets)
    n = a.dim
    if n == 1:
        lo = max(a.vertices[0][0], b.vertices[0][0])
        hi = min(a.vertices[-1][0], b.vertices[-1][0])
        return hull([(lo,), (hi,)]) if lo <= hi else Polytope(1, ())
    pts = []
    for trip in itertools.combinations(hs, n):
        sol = solve_linear([h.normal for h in trip], [h.offset for h in trip])
        if sol.consistent and not sol.kernel and all(h.contains(sol.solution) for h in hs):
            pts.append(sol.solution)
    return hull(pts, dim=n)

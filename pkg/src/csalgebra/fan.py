"""Complete rational simplicial fans.

Fans are stored in canonical form: primitive rays sorted lexicographically,
each maximal cone a sorted tuple of ray indices, cones sorted. Two fans are
equal exactly when they have the same canonical form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, cmp_to_key
from math import gcd
from typing import Iterable, Sequence

from .exactgeom import Q, det, dot, inverse, primitive, rank


class FanError(ValueError):
    pass


class DegenerateFan(FanError):
    pass


class DimensionMismatch(FanError):
    pass


class NotSmooth(FanError):
    pass


class NotComplete(FanError):
    pass


class NotARefinement(FanError):
    pass


class ResolutionLimit(FanError):
    pass


IntVec = tuple[int, ...]


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _idot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _angle_cmp_2d(a, b):
    """Counter-clockwise order starting at the positive x-axis."""
    ha = 0 if (a[1] > 0 or (a[1] == 0 and a[0] > 0)) else 1
    hb = 0 if (b[1] > 0 or (b[1] == 0 and b[0] > 0)) else 1
    if ha != hb:
        return ha - hb
    c = a[0] * b[1] - a[1] * b[0]
    return -1 if c > 0 else (1 if c < 0 else 0)


def _pulling_triangulation(rays: Sequence[IntVec], ids: Sequence[int]) -> list[tuple[int, ...]]:
    """Split a full-dimensional non-simplicial cone by pulling its lex-smallest ray.

    Only n <= 3 is supported; in dimension 3 the rays are put in cyclic order
    around the cone's axis and fanned out from the pulled ray.
    """
    n = len(rays[ids[0]])
    if len(ids) == n:
        return [tuple(ids)]
    if n <= 2:
        raise DegenerateFan("a pointed cone in dimension <= 2 has at most n rays")
    if n != 3:
        raise NotImplementedError("triangulation of non-simplicial cones needs n <= 3")
    axis = tuple(sum(rays[i][k] for i in ids) for k in range(3))
    r0 = min(ids, key=lambda i: rays[i])
    others = [i for i in ids if i != r0]
    v0 = rays[r0]

    def half(i):
        s = _idot(axis, _cross(v0, rays[i]))
        if s > 0:
            return 0
        if s < 0:
            return 1
        return 0 if _idot(v0, rays[i]) > 0 else 1

    def cmp(i, j):
        hi, hj = half(i), half(j)
        if hi != hj:
            return hi - hj
        s = _idot(axis, _cross(rays[i], rays[j]))
        return -1 if s > 0 else (1 if s < 0 else 0)

    order = sorted(others, key=cmp_to_key(cmp))
    return [tuple(sorted((r0, order[k], order[k + 1]))) for k in range(len(order) - 1)]


@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[IntVec, ...]
    cones: tuple[tuple[int, ...], ...]
    # maximal cones before triangulation, when some were not simplicial
    cells: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False, repr=False)

    # construction ---------------------------------------------------------
    @classmethod
    def build(cls, rays: Iterable[Sequence], cones: Iterable[Sequence[int]], *,
              triangulate: bool = False, dim: int | None = None) -> "Fan":
        raw = [primitive(r) for r in rays]
        if dim is None:
            if not raw:
                raise DegenerateFan("a fan needs rays")
            dim = len(raw[0])
        if any(len(r) != dim for r in raw):
            raise DimensionMismatch("rays of different lengths")
        uniq = sorted(set(raw))
        pos = {r: i for i, r in enumerate(uniq)}
        out = set()
        cells = set()
        for c in cones:
            ids = sorted({pos[raw[i]] for i in c})
            if len(ids) < dim or rank([uniq[i] for i in ids]) < dim:
                raise DegenerateFan(f"cone {list(c)} is not full-dimensional")
            if len(ids) > dim:
                if not triangulate:
                    raise DegenerateFan(f"cone {list(c)} is not simplicial")
                out.update(_pulling_triangulation(uniq, ids))
            else:
                out.add(tuple(ids))
            cells.add(tuple(ids))
        used = sorted({i for c in out for i in c})
        if len(used) != len(uniq):
            remap = {old: new for new, old in enumerate(used)}
            uniq = [uniq[i] for i in used]
            out = {tuple(remap[i] for i in c) for c in out}
            cells = {tuple(remap[i] for i in c) for c in cells}
        simplicial = all(len(c) == dim for c in cells)
        return cls(dim, tuple(uniq), tuple(sorted(out)), None if simplicial else tuple(sorted(cells)))

    @classmethod
    def from_vector_cones(cls, cones: Iterable[Iterable[IntVec]], dim: int, **kw) -> "Fan":
        rays = sorted({tuple(r) for c in cones for r in c})
        pos = {r: i for i, r in enumerate(rays)}
        return cls.build(rays, [[pos[tuple(r)] for r in c] for c in cones], dim=dim, **kw)

    # cached geometry ------------------------------------------------------
    @cached_property
    def dual_forms(self) -> tuple[tuple[tuple[Fraction, ...], ...], ...]:
        """Per maximal cone, the rows of the inverse ray matrix.

        Row ``j`` is the linear form equal to 1 on the cone's ``j``-th ray and
        0 on its other rays (the cone's coordinates).
        """
        if self.dim <= 3:
            return tuple(tuple(tuple(Fraction(x, d) for x in row) for row in adj)
                         for adj, d in self._adjugates)
        out = []
        for c in self.cones:
            cols = [self.rays[i] for i in c]
            m = [[cols[j][r] for j in range(self.dim)] for r in range(self.dim)]
            out.append(inverse(m))
        return tuple(out)

    @cached_property
    def _adjugates(self) -> tuple:
        """Per maximal cone (dim <= 3), the adjugate of the ray matrix and its determinant."""
        out = []
        for c in self.cones:
            cols = [self.rays[i] for i in c]
            out.append(_adjugate(cols))
        return tuple(out)

    @cached_property
    def int_forms(self) -> tuple[tuple[tuple[tuple[int, ...], ...], int], ...]:
        """Per maximal cone, |det| times the inverse ray matrix (integer rows) and |det|."""
        if self.dim <= 3:
            return tuple((adj, d) if d > 0 else (tuple(tuple(-x for x in row) for row in adj), -d)
                         for adj, d in self._adjugates)
        out = []
        for forms, d in zip(self.dual_forms, self.dets):
            d = abs(d)
            out.append((tuple(tuple(int(x * d) for x in row) for row in forms), d))
        return tuple(out)

    @cached_property
    def dets(self) -> tuple[int, ...]:
        return tuple(int(det([self.rays[i] for i in c])) for c in self.cones)

    @cached_property
    def face_set(self) -> frozenset:
        faces = set()
        for c in self.cones:
            for k in range(len(c) + 1):
                faces.update(frozenset(s) for s in itertools.combinations(c, k))
        return frozenset(faces)

    @cached_property
    def walls(self) -> dict:
        w: dict = {}
        for ci, c in enumerate(self.cones):
            for s in itertools.combinations(c, self.dim - 1):
                w.setdefault(frozenset(s), []).append(ci)
        return w

    @cached_property
    def memo(self) -> dict:
        """Per-fan cache for derived data computed by other modules."""
        return {}

    @cached_property
    def ray_index(self) -> dict:
        return {r: i for i, r in enumerate(self.rays)}

    @cached_property
    def neighbours(self) -> dict:
        """For each face, the rays completing it to a larger face."""
        out: dict = {}
        for face, cs in self.cones_of_face.items():
            out[face] = frozenset(r for ci in cs for r in self.cones[ci]) - face
        return out

    @cached_property
    def cones_of_face(self) -> dict:
        out: dict = {}
        for ci, c in enumerate(self.cones):
            for k in range(len(c) + 1):
                for s in itertools.combinations(c, k):
                    out.setdefault(frozenset(s), []).append(ci)
        return out

    def coords(self, ci: int, u: Sequence) -> tuple[Fraction, ...]:
        """Coordinates of ``u`` in the ray basis of maximal cone ``ci``."""
        den, iu = _int_direction(u)
        rows, d = self.int_forms[ci]
        return tuple(Fraction(_idot(row, iu), d * den) for row in rows)

    def _contains_int(self, ci: int, iu: tuple[int, ...]) -> bool:
        return all(_idot(row, iu) >= 0 for row in self.int_forms[ci][0])

    def contains(self, ci: int, u: Sequence) -> bool:
        return self._contains_int(ci, _int_direction(u)[1])

    def _locate_int(self, iu: tuple[int, ...]) -> int:
        for ci in range(len(self.cones)):
            if self._contains_int(ci, iu):
                return ci
        raise NotComplete(f"no maximal cone contains {list(iu)}")

    def locate(self, u: Sequence) -> int:
        """Index of the lowest-numbered maximal cone containing ``u``."""
        return self._locate_int(_int_direction(u)[1])

    def minimal_face(self, u: Sequence) -> frozenset:
        """Rays spanning the smallest cone of the fan containing ``u``."""
        iu = _int_direction(u)[1]
        ci = self._locate_int(iu)
        rows = self.int_forms[ci][0]
        return frozenset(r for r, row in zip(self.cones[ci], rows) if _idot(row, iu) > 0)

    def is_smooth(self) -> bool:
        return all(abs(d) == 1 for d in self.dets)

    def is_complete(self) -> bool:
        return is_complete(self)

    def require_smooth(self):
        if not self.is_smooth():
            raise NotSmooth("fan is not smooth")

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {"dim": self.dim, "rays": [list(r) for r in self.rays],
                "max_cones": [list(c) for c in self.cones]}

    @classmethod
    def from_json(cls, data: dict) -> "Fan":
        return cls.build(data["rays"], data["max_cones"], dim=data["dim"])

    def __repr__(self):
        return f"Fan(dim={self.dim}, rays={list(self.rays)}, cones={list(self.cones)})"


def _adjugate(cols: Sequence[Sequence[int]]) -> tuple:
    """Rows r_j with <r_j, cols[k]> = d * [j == k], and d = det(cols), for 1 <= len(cols) <= 3."""
    n = len(cols)
    if n == 1:
        return ((1,),), cols[0][0]
    if n == 2:
        (a, b), (c, d) = cols
        det2 = a * d - b * c
        return ((d, -c), (-b, a)), det2
    u, v, w = cols
    r0 = (v[1] * w[2] - v[2] * w[1], v[2] * w[0] - v[0] * w[2], v[0] * w[1] - v[1] * w[0])
    r1 = (w[1] * u[2] - w[2] * u[1], w[2] * u[0] - w[0] * u[2], w[0] * u[1] - w[1] * u[0])
    r2 = (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])
    return (r0, r1, r2), sum(x * y for x, y in zip(u, r0))


def _int_direction(u: Sequence) -> tuple[int, tuple[int, ...]]:
    """Positive scale ``den`` and the integer vector ``den * u``."""
    if all(type(x) is int for x in u):
        return 1, tuple(u)
    u = [Q(x) for x in u]
    den = 1
    for x in u:
        den = den * x.denominator // gcd(den, x.denominator)
    return den, tuple(x.numerator * (den // x.denominator) for x in u)


def is_complete(f: Fan) -> bool:
    """Wall pairing with opposite sides, plus covering degree one at a generic point."""
    n = f.dim
    if not f.cones:
        return False
    for wall, cs in f.walls.items():
        if len(cs) != 2:
            return False
        c0, c1 = cs
        opp0 = next(i for i in f.cones[c0] if i not in wall)
        opp1 = next(i for i in f.cones[c1] if i not in wall)
        k = f.cones[c0].index(opp0)
        if dot(f.dual_forms[c0][k], f.rays[opp1]) >= 0:
            return False
    for p in (1009, 10007, 100003, 1000003):
        u = [Fraction(1, p ** k) * (1 if k % 2 == 0 else -1) for k in range(n)]
        count = 0
        on_boundary = False
        for ci in range(len(f.cones)):
            lam = f.coords(ci, u)
            if all(x >= 0 for x in lam):
                if any(x == 0 for x in lam):
                    on_boundary = True
                    break
                count += 1
        if not on_boundary:
            return count == 1
    raise RuntimeError("could not find a generic probe point")


def is_smooth(f: Fan) -> bool:
    return f.is_smooth()


def refines(a: Fan, b: Fan) -> bool:
    """True iff every maximal cone of ``a`` lies inside a maximal cone of ``b``."""
    if a.dim != b.dim:
        raise DimensionMismatch("fans of different dimension")
    memo = a.memo.setdefault("refines", {})
    if b not in memo:
        memo[b] = _refines(a, b)
    return memo[b]


def _refines(a: Fan, b: Fan) -> bool:
    for c in a.cones:
        centre = [sum(a.rays[i][k] for i in c) for k in range(a.dim)]
        try:
            bi = b.locate(centre)
        except NotComplete:
            return False
        if not all(b.contains(bi, a.rays[i]) for i in c):
            return False
    return True


def locate(f: Fan, u: Sequence) -> int:
    return f.locate(u)


def containing_cone(fine: Fan, ci: int, coarse: Fan) -> int:
    """Maximal cone of ``coarse`` containing maximal cone ``ci`` of ``fine``."""
    c = fine.cones[ci]
    centre = [sum(fine.rays[i][k] for i in c) for k in range(fine.dim)]
    bi = coarse.locate(centre)
    if not all(coarse.contains(bi, fine.rays[i]) for i in c):
        raise NotARefinement("fan is not a refinement of the target")
    return bi


# ---------------------------------------------------------------------------
# common refinement
# ---------------------------------------------------------------------------

def _int_facets(f: Fan) -> list[list[IntVec]]:
    """Integer inward facet normals of each maximal cone."""
    return [[primitive(row) for row in f.dual_forms[ci]] for ci in range(len(f.cones))]


def _in_cone(normals, v) -> bool:
    return all(_idot(nrm, v) >= 0 for nrm in normals)


def _cell_structure(f: Fan):
    """Map each simplicial cone to its cell and list the walls between cells."""
    if f.cells is None:
        return list(range(len(f.cones))), len(f.cones), list(f.walls)
    owner = []
    for c in f.cones:
        owner.append(next(k for k, cell in enumerate(f.cells) if set(c) <= set(cell)))
    walls = [w for w, cs in f.walls.items() if len({owner[c] for c in cs}) > 1 or len(cs) == 1]
    return owner, len(f.cells), walls


def common_refinement(a: Fan, b: Fan) -> Fan:
    """Coarsest common refinement, triangulated by pulling where needed."""
    if a.dim != b.dim:
        raise DimensionMismatch("fans of different dimension")
    if a == b:
        return a
    n = a.dim
    own_a, na_cells, walls_a = _cell_structure(a)
    own_b, nb_cells, walls_b = _cell_structure(b)
    cand = set(a.rays) | set(b.rays)
    if n == 3:
        def wall_planes(f: Fan, walls):
            out = []
            for wall in walls:
                r1, r2 = (f.rays[i] for i in sorted(wall))
                out.append((r1, r2, _cross(r1, r2)))
            return out

        def in_2cone(r1, r2, nrm, d):
            return _idot(nrm, _cross(d, r2)) >= 0 and _idot(nrm, _cross(r1, d)) >= 0

        pa, pb = wall_planes(a, walls_a), wall_planes(b, walls_b)
        for r1, r2, na in pa:
            for s1, s2, nb in pb:
                d = _cross(na, nb)
                if d == (0, 0, 0):
                    continue
                for sgn in (1, -1):
                    dd = tuple(sgn * x for x in d)
                    if in_2cone(r1, r2, na, dd) and in_2cone(s1, s2, nb, dd):
                        cand.add(primitive(dd))
    elif n > 3:
        raise NotImplementedError("common refinement implemented for n <= 3")
    cand = sorted(cand)
    fa, fb = _int_facets(a), _int_facets(b)
    in_a = [set() for _ in range(na_cells)]
    for ci, nr in enumerate(fa):
        in_a[own_a[ci]].update(i for i, r in enumerate(cand) if _in_cone(nr, r))
    in_b = [set() for _ in range(nb_cells)]
    for ci, nr in enumerate(fb):
        in_b[own_b[ci]].update(i for i, r in enumerate(cand) if _in_cone(nr, r))
    cells = []
    for sa in in_a:
        for sb in in_b:
            s = sa & sb
            if len(s) >= n and rank([cand[i] for i in s]) == n:
                cells.append(sorted(s))
    return Fan.build(cand, cells, triangulate=True, dim=n)


# ---------------------------------------------------------------------------
# resolution
# ---------------------------------------------------------------------------

def _parallelepiped_points(cone_rays: Sequence[IntVec]):
    """Nonzero lattice points sum(l_i v_i), 0 <= l_i < 1, with their coordinates."""
    n = len(cone_rays)
    m = [[cone_rays[j][r] for j in range(n)] for r in range(n)]
    inv = inverse(m)
    gens = []
    for j in range(n):
        col = tuple(inv[i][j] % 1 for i in range(n))
        gens.append(col)
    seen = {tuple([Fraction(0)] * n)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for lam in frontier:
            for g in gens:
                s = tuple((x + y) % 1 for x, y in zip(lam, g))
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    pts = []
    for lam in seen:
        if any(lam):
            p = tuple(int(sum(lam[j] * cone_rays[j][r] for j in range(n))) for r in range(n))
            pts.append((lam, p))
    return pts


def resolve(f: Fan, depth_limit: int | None = None) -> Fan:
    """Smooth refinement by iterated stellar subdivision.

    The inserted ray is the parallelepiped lattice point of the chosen cone
    with the smallest coordinate sum in the cone's ray basis (ties broken by
    the lexicographically smallest point).
    """
    if f.is_smooth():
        return f
    n = f.dim
    cones = {frozenset(f.rays[i] for i in c) for c in f.cones}
    dets = {}

    def mult(c):
        if c not in dets:
            dets[c] = abs(int(det(sorted(c))))
        return dets[c]

    steps = 0
    while True:
        bad = [c for c in cones if mult(c) > 1]
        if not bad:
            break
        steps += 1
        if depth_limit is not None and steps > depth_limit:
            raise ResolutionLimit("resolution step limit exceeded")
        target = min(bad, key=lambda c: sorted(c))
        crays = sorted(target)
        pts = _parallelepiped_points(crays)
        lam, w = min(pts, key=lambda t: (sum(t[0]), t[1]))
        face = frozenset(r for r, x in zip(crays, lam) if x > 0)
        for c in [c for c in cones if face <= c]:
            cones.discard(c)
            for r in face:
                cones.add((c - {r}) | {w})
    return Fan.from_vector_cones([sorted(c) for c in cones], n)


# ---------------------------------------------------------------------------
# standard fans
# ---------------------------------------------------------------------------

def fan_2d(rays: Sequence[Sequence[int]]) -> Fan:
    """Complete 2-d fan whose maximal cones join angularly consecutive rays."""
    rs = sorted({primitive(r) for r in rays}, key=cmp_to_key(_angle_cmp_2d))
    cones = []
    for k in range(len(rs)):
        a, b = rs[k], rs[(k + 1) % len(rs)]
        if a[0] * b[1] - a[1] * b[0] <= 0:
            raise NotComplete("consecutive rays span an angle of at least pi")
        cones.append((a, b))
    return Fan.from_vector_cones(cones, 2)


def projective_space_fan(n: int) -> Fan:
    rays = [tuple(int(i == j) for j in range(n)) for i in range(n)] + [tuple([-1] * n)]
    cones = [c for c in itertools.combinations(range(n + 1), n)]
    return Fan.build(rays, cones, dim=n)


def cube_fan(n: int) -> Fan:
    """Normal fan of the cube: rays +-e_i, one cone per orthant."""
    rays = []
    for i in range(n):
        for s in (1, -1):
            rays.append(tuple(s * int(i == j) for j in range(n)))
    cones = []
    for signs in itertools.product((0, 1), repeat=n):
        cones.append([2 * i + signs[i] for i in range(n)])
    return Fan.build(rays, cones, dim=n)

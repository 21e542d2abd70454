"""Piecewise polynomial functions on simplicial fans.

On a smooth complete fan these model the rational Chow ring of the toric
variety: the quotient by global linear functions is graded, its top piece is
one-dimensional, and ``degree_functional`` is normalized to 1 on the product
of the ray Courant functions of any maximal cone.

Internally many computations go through Stanley-Reisner coordinates: a
piecewise polynomial ``f`` is written as ``sum c_a x^a`` where ``x_r`` is the
Courant function of ray ``r`` and the support of each ``a`` is a cone.  Such
monomials are keyed as sorted tuples of ``(ray, exponent)`` pairs.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactgeom import Polynomial, Q, dot, poly_divide_exact, primitive, solve_linear
from .fan import Fan, NotARefinement, containing_cone, refines


class FanMismatch(ValueError):
    pass


class DegreeMismatch(ValueError):
    pass


class WallMismatch(ValueError):
    pass


Monomial = tuple[tuple[int, int], ...]


def _wall_param(fan: Fan, wall: frozenset) -> list[list[int]]:
    rays = [fan.rays[i] for i in sorted(wall)]
    return [[r[k] for r in rays] for k in range(fan.dim)]


class PiecewisePolynomial:
    """One polynomial (in the coordinates of N) per maximal cone of a fan."""

    __slots__ = ("fan", "parts")

    def __init__(self, fan: Fan, parts: Sequence[Polynomial], check: bool = True):
        if len(parts) != len(fan.cones):
            raise ValueError("need one polynomial per maximal cone")
        self.fan = fan
        self.parts = tuple(parts)
        if check:
            self.check_walls()

    # constructors ----------------------------------------------------------
    @classmethod
    def constant(cls, fan: Fan, c=1) -> "PiecewisePolynomial":
        p = Polynomial.const(fan.dim, c)
        return cls(fan, [p] * len(fan.cones), check=False)

    @classmethod
    def zero(cls, fan: Fan) -> "PiecewisePolynomial":
        return cls.constant(fan, 0)

    @classmethod
    def global_poly(cls, fan: Fan, p: Polynomial) -> "PiecewisePolynomial":
        return cls(fan, [p] * len(fan.cones), check=False)

    @classmethod
    def linear(cls, fan: Fan, m: Sequence) -> "PiecewisePolynomial":
        return cls.global_poly(fan, Polynomial.linear([Q(x) for x in m]))

    @classmethod
    def from_ray_values(cls, fan: Fan, values: Sequence) -> "PiecewisePolynomial":
        """The conewise linear function taking ``values[r]`` on ray generator ``r``."""
        values = [Q(v) for v in values]
        parts = []
        for ci, c in enumerate(fan.cones):
            forms = fan.dual_forms[ci]
            coeffs = [sum(values[r] * forms[j][k] for j, r in enumerate(c)) for k in range(fan.dim)]
            parts.append(Polynomial.linear(coeffs))
        return cls(fan, parts, check=False)

    # structure ---------------------------------------------------------------
    def check_walls(self):
        for wall, cs in self.fan.walls.items():
            if len(cs) != 2:
                continue
            diff = self.parts[cs[0]] - self.parts[cs[1]]
            if diff and diff.compose_linear(_wall_param(self.fan, wall)):
                raise WallMismatch(f"parts disagree on the wall spanned by rays {sorted(wall)}")

    @property
    def degree(self):
        """Common homogeneous degree, or ``"mixed"``; the zero function has degree 0."""
        degs = set()
        for p in self.parts:
            if not p.is_homogeneous():
                return "mixed"
            if p:
                degs.add(p.degree())
        if len(degs) > 1:
            return "mixed"
        return degs.pop() if degs else 0

    def max_degree(self) -> int:
        return max((p.degree() for p in self.parts), default=-1)

    def homogeneous_part(self, d: int) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.fan, [p.homogeneous_part(d) for p in self.parts], check=False)

    def truncate(self, d: int) -> "PiecewisePolynomial":
        """Drop all terms of degree above ``d``."""
        parts = [Polynomial._raw(p.nvars, {e: c for e, c in p.terms.items() if sum(e) <= d})
                 for p in self.parts]
        return PiecewisePolynomial(self.fan, parts, check=False)

    def is_zero(self) -> bool:
        return not any(self.parts)

    def __call__(self, u: Sequence) -> Fraction:
        u = [Q(x) for x in u]
        return self.parts[self.fan.locate(u)](u)

    # arithmetic ----------------------------------------------------------------
    def _other(self, other) -> "PiecewisePolynomial":
        if isinstance(other, PiecewisePolynomial):
            if other.fan != self.fan:
                raise FanMismatch("piecewise polynomials live on different fans")
            return other
        if isinstance(other, Polynomial):
            return PiecewisePolynomial.global_poly(self.fan, other)
        return PiecewisePolynomial.constant(self.fan, Q(other))

    def __add__(self, other):
        o = self._other(other)
        return PiecewisePolynomial(self.fan, [a + b for a, b in zip(self.parts, o.parts)], check=False)

    __radd__ = __add__

    def __neg__(self):
        return PiecewisePolynomial(self.fan, [-p for p in self.parts], check=False)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, (PiecewisePolynomial, Polynomial)):
            c = Q(other)
            return PiecewisePolynomial(self.fan, [p * c for p in self.parts], check=False)
        o = self._other(other)
        return PiecewisePolynomial(self.fan, [a * b for a, b in zip(self.parts, o.parts)], check=False)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = PiecewisePolynomial.constant(self.fan, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, PiecewisePolynomial):
            return NotImplemented
        return self.fan == other.fan and self.parts == other.parts

    def __hash__(self):
        return hash(self.parts)

    # serialization -------------------------------------------------------------
    def to_json(self) -> dict:
        return {"fan": self.fan.to_json(), "degree": self.degree,
                "parts": {str(i): p.to_json() for i, p in enumerate(self.parts)}}

    @classmethod
    def from_json(cls, data: Mapping) -> "PiecewisePolynomial":
        fan = Fan.from_json(data["fan"])
        parts = [Polynomial.from_json(fan.dim, data["parts"].get(str(i), {}))
                 for i in range(len(fan.cones))]
        return cls(fan, parts)

    def __repr__(self):
        return f"PiecewisePolynomial({list(self.parts)})"


def pp_mul(a: PiecewisePolynomial, b: PiecewisePolynomial) -> PiecewisePolynomial:
    return a * b


# ---------------------------------------------------------------------------
# Courant functions
# ---------------------------------------------------------------------------

def _dual_form(fan: Fan, ci: int, ray: int) -> tuple[Fraction, ...]:
    return fan.dual_forms[ci][fan.cones[ci].index(ray)]


def courant_ray(fan: Fan, ray: int) -> PiecewisePolynomial:
    """Piecewise linear, 1 on generator ``ray`` and 0 on all other generators."""
    fan.require_smooth()
    values = [0] * len(fan.rays)
    values[ray] = 1
    return PiecewisePolynomial.from_ray_values(fan, values)


def courant_cone(fan: Fan, cone: Iterable[int]) -> PiecewisePolynomial:
    """Product of the ray Courant functions over the rays of ``cone``."""
    fan.require_smooth()
    cone = frozenset(cone)
    parts = []
    for ci, c in enumerate(fan.cones):
        if cone <= set(c):
            p = Polynomial.const(fan.dim, 1)
            for r in sorted(cone):
                p = p * Polynomial.linear(_dual_form(fan, ci, r))
        else:
            p = Polynomial._raw(fan.dim, {})
        parts.append(p)
    return PiecewisePolynomial(fan, parts, check=False)


# ---------------------------------------------------------------------------
# pullback
# ---------------------------------------------------------------------------

def pullback(f: PiecewisePolynomial, target: Fan) -> PiecewisePolynomial:
    """Restrict ``f`` to the cones of a refinement of its fan."""
    if target == f.fan:
        return f
    if target.dim != f.fan.dim:
        raise NotARefinement("fans of different dimension")
    parts = [f.parts[containing_cone(target, ci, f.fan)] for ci in range(len(target.cones))]
    return PiecewisePolynomial(target, parts, check=False)


# ---------------------------------------------------------------------------
# Stanley-Reisner coordinates
# ---------------------------------------------------------------------------

def sr_expand(f: PiecewisePolynomial) -> dict[Monomial, Fraction]:
    """Coefficients of ``f`` in the monomials of the ray Courant functions."""
    fan = f.fan
    fan.require_smooth()
    out: dict = {}
    for ci, c in enumerate(fan.cones):
        p = f.parts[ci]
        if not p:
            continue
        rows = [[fan.rays[r][k] for r in c] for k in range(fan.dim)]
        g = p.compose_linear(rows)
        for e, coef in g.terms.items():
            key = tuple((r, k) for r, k in zip(c, e) if k)
            out[key] = coef
    return out


def sr_to_pp(fan: Fan, sr: Mapping[Monomial, Fraction]) -> PiecewisePolynomial:
    fan.require_smooth()
    parts = []
    for ci, c in enumerate(fan.cones):
        cs = set(c)
        total: dict = {}
        for mono, coef in sr.items():
            if not coef or any(r not in cs for r, _ in mono):
                continue
            p = Polynomial.const(fan.dim, coef)
            for r, k in mono:
                p = p * Polynomial.linear(_dual_form(fan, ci, r)) ** k
            for e, v in p.terms.items():
                total[e] = total.get(e, 0) + v
        parts.append(Polynomial(fan.dim, total))
    return PiecewisePolynomial(fan, parts, check=False)


def _mono_mul(fan: Fan, a: Monomial, b: Monomial) -> Monomial | None:
    d = dict(a)
    for r, k in b:
        d[r] = d.get(r, 0) + k
    if frozenset(d) not in fan.cones_of_face:
        return None
    return tuple(sorted(d.items()))


def _shift(a: Monomial, drop: int, add: int | None = None) -> Monomial:
    d = dict(a)
    d[drop] -= 1
    if not d[drop]:
        del d[drop]
    if add is not None:
        d[add] = d.get(add, 0) + 1
    return tuple(sorted(d.items()))


def _pivot(fan: Fan, a: Monomial):
    """Ray with exponent >= 2, a maximal cone containing the support, and its dual form."""
    rho = next(r for r, k in a if k >= 2)
    face = frozenset(r for r, _ in a)
    ci = fan.cones_of_face[face][0]
    return rho, face, ci, _dual_form(fan, ci, rho)


def _deg_monomial(fan: Fan, a: Monomial) -> Fraction:
    memo = fan.memo.setdefault("deg", {})
    if a in memo:
        return memo[a]
    face = frozenset(r for r, _ in a)
    if face not in fan.cones_of_face:
        val = Fraction(0)
    elif len(a) == fan.dim:
        val = Fraction(1)
    else:
        rho, face, ci, m = _pivot(fan, a)
        sigma = set(fan.cones[ci])
        val = Fraction(0)
        for r in sorted(fan.neighbours[face]):
            if r in sigma:
                continue
            c = dot(m, fan.rays[r])
            if c:
                val -= c * _deg_monomial(fan, _shift(a, rho, r))
    memo[a] = val
    return val


def _degree_sr(f: PiecewisePolynomial) -> Fraction:
    return sum((c * _deg_monomial(f.fan, a) for a, c in sr_expand(f).items()), Fraction(0))


def degree_by_localization(f: PiecewisePolynomial, u: Sequence | None = None) -> Fraction:
    """sum over maximal cones of f_s(u) / prod(dual forms of s)(u) at a generic point."""
    fan = f.fan
    fan.require_smooth()
    candidates = [u] if u is not None else [
        [Fraction(p ** k + k, 1 + 2 * k) * (-1) ** k for k in range(fan.dim)] for p in (101, 103, 107, 109)]
    for pt in candidates:
        pt = [Q(x) for x in pt]
        total = Fraction(0)
        ok = True
        for ci in range(len(fan.cones)):
            den = Fraction(1)
            for row in fan.dual_forms[ci]:
                den *= dot(row, pt)
            if den == 0:
                ok = False
                break
            total += f.parts[ci](pt) / den
        if ok:
            return total
    raise ValueError("probe point lies on a cone hyperplane")


def degree_functional(f: PiecewisePolynomial, method: str = "sr") -> Fraction:
    """Degree of a top-degree piecewise polynomial on a smooth complete fan.

    ``method="sr"`` rewrites Stanley-Reisner monomials with linear relations
    until each is a product over a maximal cone; ``method="linear"`` solves the
    defining linear system ``f = c*phi_s0 + sum m_i * g_i`` directly (small
    fans only).
    """
    fan = f.fan
    fan.require_smooth()
    n = fan.dim
    if not f.is_zero() and f.degree != n:
        raise DegreeMismatch(f"degree functional needs degree {n}, got {f.degree}")
    if method == "sr":
        return _degree_sr(f)
    if method == "linear":
        return _degree_linear(f)
    if method == "localization":
        return degree_by_localization(f)
    raise ValueError(f"unknown method {method}")


# ---------------------------------------------------------------------------
# dense linear algebra in the graded pieces
# ---------------------------------------------------------------------------

def sr_monomials(fan: Fan, d: int) -> list[Monomial]:
    """All Stanley-Reisner monomials of degree ``d`` supported on cones."""
    memo = fan.memo.setdefault("sr_monomials", {})
    if d in memo:
        return memo[d]
    faces = sorted((tuple(sorted(f)) for f in fan.cones_of_face if 0 < len(f) <= d)) if d else [()]
    out = []
    for face in faces:
        k = len(face)
        if k == 0:
            out.append(())
            continue
        for extra in itertools.combinations_with_replacement(range(k), d - k):
            exps = [1] * k
            for i in extra:
                exps[i] += 1
            out.append(tuple(zip(face, exps)))
    memo[d] = out
    return out


def _column_order(monos: list[Monomial]) -> list[Monomial]:
    """Non-squarefree monomials first, squarefree ones last."""
    return sorted(monos, key=lambda a: (all(k == 1 for _, k in a), a))


def _linear_sr(fan: Fan, i: int) -> list[tuple[Monomial, Fraction]]:
    """The i-th coordinate function as a combination of ray Courant functions."""
    return [(((r, 1),), Fraction(v[i])) for r, v in enumerate(fan.rays) if v[i]]


def _times_linear(fan: Fan, i: int, b: Monomial, pos: Mapping) -> dict:
    vec: dict = {}
    for a, c in _linear_sr(fan, i):
        prod = _mono_mul(fan, a, b)
        if prod is not None:
            vec[pos[prod]] = vec.get(pos[prod], 0) + c
    return {j: c for j, c in vec.items() if c}


def _ideal_basis(fan: Fan, d: int):
    """Echelon basis of (linear functions) * (degree d-1) inside degree d."""
    memo = fan.memo.setdefault("ideal", {})
    if d in memo:
        return memo[d]
    cols = _column_order(sr_monomials(fan, d))
    pos = {a: j for j, a in enumerate(cols)}
    rows = []
    for i in range(fan.dim):
        for b in sr_monomials(fan, d - 1):
            vec = _times_linear(fan, i, b, pos)
            if vec:
                rows.append(vec)
    pivots: dict[int, dict] = {}
    for vec in rows:
        vec = _reduce_vec(vec, pivots)
        if vec:
            j = min(vec)
            c = vec[j]
            vec = {k: v / c for k, v in vec.items()}
            for pj, pv in pivots.items():
                if j in pv:
                    f = pv[j]
                    for k, v in vec.items():
                        s = pv.get(k, 0) - f * v
                        if s:
                            pv[k] = s
                        else:
                            pv.pop(k, None)
            pivots[j] = vec
    memo[d] = (cols, pos, pivots)
    return memo[d]


def _reduce_vec(vec: dict, pivots: dict) -> dict:
    vec = dict(vec)
    for j in sorted(vec):
        if j in vec and j in pivots:
            c = vec[j]
            for k, v in pivots[j].items():
                s = vec.get(k, 0) - c * v
                if s:
                    vec[k] = s
                else:
                    vec.pop(k, None)
    return vec


def _to_vec(sr: Mapping[Monomial, Fraction], pos: Mapping) -> dict:
    return {pos[a]: c for a, c in sr.items() if c}


def reduce_mod_linear(f: PiecewisePolynomial) -> PiecewisePolynomial:
    """Canonical representative of ``f`` modulo global linear functions.

    The representative is the remainder after eliminating an echelon basis of
    the ideal's degree-``d`` piece, with squarefree monomials ordered last so
    that top-degree classes reduce to a multiple of the last maximal cone.
    """
    fan = f.fan
    fan.require_smooth()
    d = f.degree
    if d == "mixed":
        raise DegreeMismatch("reduce_mod_linear needs a homogeneous function")
    if f.is_zero() or d > fan.dim:
        return PiecewisePolynomial.zero(fan)
    if d == 0:
        return f
    if d == fan.dim:
        return courant_cone(fan, fan.cones[-1]) * degree_functional(f)
    cols, pos, pivots = _ideal_basis(fan, d)
    rem = _reduce_vec(_to_vec(sr_expand(f), pos), pivots)
    return sr_to_pp(fan, {cols[j]: c for j, c in rem.items()})


def is_zero_mod_linear(f: PiecewisePolynomial) -> bool:
    """Zero test in the quotient by pairing against every complementary monomial."""
    fan = f.fan
    n = fan.dim
    if f.is_zero():
        return True
    for d in range(0, f.max_degree() + 1):
        part = f.homogeneous_part(d)
        if part.is_zero() or d > n:
            continue
        if d == 0:
            return False
        sr = sr_expand(part)
        for b in sr_monomials(fan, n - d):
            val = Fraction(0)
            for a, c in sr.items():
                prod = _mono_mul(fan, a, b)
                if prod is not None:
                    val += c * _deg_monomial(fan, prod)
            if val:
                return False
    return True


def _degree_linear(f: PiecewisePolynomial) -> Fraction:
    """Solve f = c * phi_s0 + (linear) * g as one exact linear system."""
    fan = f.fan
    n = fan.dim
    cols = _column_order(sr_monomials(fan, n))
    pos = {a: j for j, a in enumerate(cols)}
    gens = []
    s0 = tuple((r, 1) for r in fan.cones[0])
    gens.append({pos[s0]: Fraction(1)})
    for i in range(n):
        for b in sr_monomials(fan, n - 1):
            gens.append(_times_linear(fan, i, b, pos))
    target = _to_vec(sr_expand(f), pos)
    matrix = [[g.get(j, 0) for g in gens] for j in range(len(cols))]
    rhs = [target.get(j, 0) for j in range(len(cols))]
    sol = solve_linear(matrix, rhs)
    if not sol.consistent:
        raise ValueError("top-degree function is not a multiple of a point class")
    return sol.solution[0]


# ---------------------------------------------------------------------------
# push-forward
# ---------------------------------------------------------------------------

def _squarefree_form(fan: Fan, a: Monomial) -> dict[frozenset, Polynomial]:
    """Write x^a as sum_t p_t(u) * phi_t with squarefree cone products phi_t."""
    memo = fan.memo.setdefault("sqf", {})
    if a in memo:
        return memo[a]
    if all(k == 1 for _, k in a):
        out = {frozenset(r for r, _ in a): Polynomial.const(fan.dim, 1)}
    else:
        rho, face, ci, m = _pivot(fan, a)
        sigma = set(fan.cones[ci])
        out = {}
        base = _shift(a, rho)
        mpoly = Polynomial.linear(m)
        for t, p in _squarefree_form(fan, base).items():
            out[t] = out.get(t, Polynomial._raw(fan.dim, {})) + p * mpoly
        for r in sorted(fan.neighbours[face]):
            if r in sigma:
                continue
            c = dot(m, fan.rays[r])
            if c:
                for t, p in _squarefree_form(fan, _shift(a, rho, r)).items():
                    out[t] = out.get(t, Polynomial._raw(fan.dim, {})) - p * c
        out = {t: p for t, p in out.items() if p}
    memo[a] = out
    return out


def _check_push(f: PiecewisePolynomial, target: Fan):
    f.fan.require_smooth()
    target.require_smooth()
    if f.fan.dim != target.dim or not refines(f.fan, target):
        raise NotARefinement("source fan does not refine the target")


def pushforward(f: PiecewisePolynomial, target: Fan, method: str = "sr") -> PiecewisePolynomial:
    """Push a piecewise polynomial on a refinement down to the coarser fan ``target``."""
    if f.fan == target:
        return f
    _check_push(f, target)
    if method == "brion":
        return _push_brion(f, target)
    if method != "sr":
        raise ValueError(f"unknown method {method}")
    fine = f.fan
    gathered: dict[frozenset, Polynomial] = {}
    for a, c in sr_expand(f).items():
        for t, p in _squarefree_form(fine, a).items():
            gathered[t] = gathered.get(t, Polynomial._raw(fine.dim, {})) + p * c
    images: dict[frozenset, Polynomial] = {}
    for t, p in gathered.items():
        if not p:
            continue
        if t:
            centre = [sum(fine.rays[r][k] for r in t) for k in range(fine.dim)]
            coarse = target.minimal_face(centre)
            if len(coarse) != len(t):
                continue
            coarse = frozenset(coarse)
        else:
            coarse = frozenset()
        images[coarse] = images.get(coarse, Polynomial._raw(fine.dim, {})) + p
    parts = []
    for ci, c in enumerate(target.cones):
        cs = set(c)
        total = Polynomial._raw(target.dim, {})
        for t, p in images.items():
            if t <= cs:
                term = p
                for r in sorted(t):
                    term = term * Polynomial.linear(_dual_form(target, ci, r))
                total = total + term
        parts.append(total)
    return PiecewisePolynomial(target, parts, check=False)


def _normalized_form(v: Sequence[Fraction]) -> tuple[tuple[int, ...], Fraction]:
    """Primitive integer form with positive leading entry, and the scale factor."""
    p = primitive(v)
    if next(x for x in p if x) < 0:
        p = tuple(-x for x in p)
    k = next(i for i, x in enumerate(p) if x)
    return p, Fraction(v[k]) / p[k]


def _push_brion(f: PiecewisePolynomial, target: Fan) -> PiecewisePolynomial:
    """Cone-by-cone sum of f/phi over fine cones, over a common denominator."""
    fine = f.fan
    n = target.dim
    members: dict[int, list[int]] = {}
    for ci in range(len(fine.cones)):
        members.setdefault(containing_cone(fine, ci, target), []).append(ci)
    parts = []
    for si in range(len(target.cones)):
        fine_cones = members.get(si, [])
        if not any(f.parts[ci] for ci in fine_cones):
            parts.append(Polynomial._raw(n, {}))
            continue
        denoms = {}
        forms = set()
        for ci in fine_cones:
            scale = Fraction(1)
            keys = []
            for row in fine.dual_forms[ci]:
                p, s = _normalized_form(row)
                scale *= s
                keys.append(p)
                forms.add(p)
            denoms[ci] = (scale, keys)
        forms = sorted(forms)
        lin = {p: Polynomial.linear(p) for p in forms}
        common = Polynomial.const(n, 1)
        for p in forms:
            common = common * lin[p]
        numer = Polynomial._raw(n, {})
        for ci in fine_cones:
            if not f.parts[ci]:
                continue
            scale, keys = denoms[ci]
            cofactor = Polynomial.const(n, 1)
            for p in forms:
                if p not in keys:
                    cofactor = cofactor * lin[p]
            numer = numer + f.parts[ci] * cofactor * (1 / scale)
        phi = Polynomial.const(n, 1)
        for row in target.dual_forms[si]:
            phi = phi * Polynomial.linear(row)
        parts.append(poly_divide_exact(phi * numer, common))
    return PiecewisePolynomial(target, parts, check=False)


# ---------------------------------------------------------------------------
# Chow classes
# ---------------------------------------------------------------------------

class ChowClass:
    """Graded class on a smooth complete fan: components of degree 0..n.

    Components are representatives; equality is tested modulo global linear
    functions.
    """

    __slots__ = ("fan", "components")

    def __init__(self, fan: Fan, components: Sequence[PiecewisePolynomial]):
        fan.require_smooth()
        comps = list(components)[: fan.dim + 1]
        while len(comps) < fan.dim + 1:
            comps.append(PiecewisePolynomial.zero(fan))
        for d, c in enumerate(comps):
            if c.fan != fan:
                raise FanMismatch("component on a different fan")
            if not c.is_zero() and c.degree != d:
                raise DegreeMismatch(f"component {d} has degree {c.degree}")
        self.fan = fan
        self.components = tuple(comps)

    @classmethod
    def from_function(cls, f: PiecewisePolynomial) -> "ChowClass":
        return cls(f.fan, [f.homogeneous_part(d) for d in range(f.fan.dim + 1)])

    @classmethod
    def unit(cls, fan: Fan) -> "ChowClass":
        return cls(fan, [PiecewisePolynomial.constant(fan, 1)])

    def total(self) -> PiecewisePolynomial:
        out = self.components[0]
        for c in self.components[1:]:
            out = out + c
        return out

    def __add__(self, other: "ChowClass") -> "ChowClass":
        return ChowClass(self.fan, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "ChowClass") -> "ChowClass":
        return ChowClass(self.fan, [a - b for a, b in zip(self.components, other.components)])

    def __mul__(self, other):
        if not isinstance(other, ChowClass):
            c = Q(other)
            return ChowClass(self.fan, [p * c for p in self.components])
        if other.fan != self.fan:
            raise FanMismatch("classes on different fans")
        n = self.fan.dim
        out = []
        for d in range(n + 1):
            acc = PiecewisePolynomial.zero(self.fan)
            for i in range(d + 1):
                a, b = self.components[i], other.components[d - i]
                if not a.is_zero() and not b.is_zero():
                    acc = acc + a * b
            out.append(acc)
        return ChowClass(self.fan, out)

    __rmul__ = __mul__

    def component_is_zero(self, d: int) -> bool:
        return is_zero_mod_linear(self.components[d])

    def is_zero(self) -> bool:
        return all(self.component_is_zero(d) for d in range(self.fan.dim + 1))

    def __eq__(self, other):
        if not isinstance(other, ChowClass):
            return NotImplemented
        return self.fan == other.fan and (self - other).is_zero()

    def degree(self) -> Fraction:
        return degree_functional(self.components[-1])

    def pushforward(self, target: Fan) -> "ChowClass":
        return ChowClass(target, [pushforward(c, target) for c in self.components])

    def reduced(self) -> "ChowClass":
        return ChowClass(self.fan, [reduce_mod_linear(c) for c in self.components])

    def to_json(self) -> dict:
        return {"fan": self.fan.to_json(),
                "components": [c.to_json() for c in self.reduced().components]}

    @classmethod
    def from_json(cls, data: Mapping) -> "ChowClass":
        fan = Fan.from_json(data["fan"])
        return cls(fan, [PiecewisePolynomial.from_json(c) for c in data["components"]])

    def __repr__(self):
        return f"ChowClass({list(self.components)})"

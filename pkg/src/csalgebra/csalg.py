"""Formal algebra of convex bodies and its map to Chow classes of smooth fans.

An element is a rational combination of words.  A word is a Minkowski
combination ``m_1 K_1 + ... + m_k K_k`` of registered base bodies with
nonnegative rational multiplicities; the product of two words adds their
multiplicities, which is the relation [K][L] = [K + L].  Base bodies are
translation-normalized so that their support function vanishes on the
standard basis vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .bodies import (SupportOracle, directions_up_to, is_exact_on, linear_part, oracle_from_polytope,
                     outer_approx, refine_until_nef, translated_oracle)
from .exactgeom import Polynomial, Q, fmt_q
from .fan import DimensionMismatch, Fan, common_refinement, cube_fan, resolve
from .polytope import Polytope, box, minkowski_sum, mixed_volume, normal_fan, translate
from .ppoly import ChowClass, PiecewisePolynomial


class NotAGenerator(ValueError):
    pass


class NonNilpotentInput(ValueError):
    pass


class LevelOutOfRange(ValueError):
    pass


class NotTopDegree(ValueError):
    pass


class ToleranceNotReached(RuntimeError):
    def __init__(self, message: str, values: list):
        super().__init__(message)
        self.values = values


_BASES: dict = {}

Word = tuple[tuple[object, Fraction], ...]


def _key_order(key) -> str:
    return repr(key)


def _register(h: SupportOracle):
    _BASES.setdefault(h.key, h)
    return h.key


def base(key) -> SupportOracle:
    return _BASES[key]


def _normalize(h: SupportOracle) -> SupportOracle:
    """Translate so the support function vanishes on the standard basis."""
    if h.is_polytope:
        p = h.polytope
        lows = [min(v[i] for v in p.vertices) for i in range(p.dim)]
        return oracle_from_polytope(translate(p, [-x for x in lows]))
    shift = linear_part(h)
    if not any(shift):
        return h
    return translated_oracle(h, [-x for x in shift])


def _word_mul(a: Word, b: Word) -> Word:
    d = dict(a)
    for k, m in b:
        d[k] = d.get(k, 0) + m
    return tuple(sorted(d.items(), key=lambda kv: _key_order(kv[0])))


def _word_scale(a: Word, r) -> Word:
    return tuple((k, m * r) for k, m in a) if r else ()


class AlgebraElement:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Word, object] | None = None):
        self.n = n
        self.terms = {w: Q(c) for w, c in (terms or {}).items() if Q(c)}

    @classmethod
    def one(cls, n: int) -> "AlgebraElement":
        return cls(n, {(): 1})

    @classmethod
    def zero(cls, n: int) -> "AlgebraElement":
        return cls(n)

    def _check(self, other: "AlgebraElement"):
        if not isinstance(other, AlgebraElement):
            other = AlgebraElement.one(self.n) * Q(other)
        if other.n != self.n:
            raise DimensionMismatch("elements of different dimension")
        return other

    def __add__(self, other):
        other = self._check(other)
        t = dict(self.terms)
        for w, c in other.terms.items():
            t[w] = t.get(w, 0) + c
        return AlgebraElement(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.n, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            c = Q(other)
            return AlgebraElement(self.n, {w: v * c for w, v in self.terms.items()})
        other = self._check(other)
        t: dict = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = _word_mul(w1, w2)
                t[w] = t.get(w, 0) + c1 * c2
        return AlgebraElement(self.n, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = AlgebraElement.one(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        return isinstance(other, AlgebraElement) and self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def bases(self) -> list:
        keys = {k for w in self.terms for k, _ in w}
        return sorted(keys, key=_key_order)

    def is_generator(self) -> bool:
        return len(self.terms) == 1 and next(iter(self.terms.values())) == 1

    def constant_part(self) -> Fraction:
        """Degree-0 part: every class [K] starts with 1."""
        return sum(self.terms.values(), Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for w, c in sorted(self.terms.items(), key=lambda kv: repr(kv[0])):
            body = "+".join(f"{fmt_q(m)}*{_short(k)}" for k, m in w) or "pt"
            out.append(f"{fmt_q(c)}[{body}]")
        return " + ".join(out)


def _short(key) -> str:
    if isinstance(key, tuple) and key and key[0] == "P":
        return "conv(" + ",".join("(" + ",".join(fmt_q(x) for x in v) + ")" for v in key[1]) + ")"
    return repr(key)


def cls(body, n: int | None = None) -> AlgebraElement:
    """Generator class of a polytope or support oracle (the empty polytope gives 0)."""
    if isinstance(body, Polytope):
        if body.is_empty:
            return AlgebraElement.zero(body.dim)
        if len(body.vertices) == 1:
            return AlgebraElement.one(body.dim)
        h = oracle_from_polytope(body)
    elif isinstance(body, SupportOracle):
        h = body
        if h.is_polytope:
            return cls(h.polytope)
    else:
        raise TypeError("cls expects a Polytope or SupportOracle")
    h = _normalize(h)
    return AlgebraElement(h.dim, {((_register(h), Fraction(1)),): 1})


def log_class(a: AlgebraElement) -> AlgebraElement:
    """Truncated logarithm sum_{r=1}^{n} (-1)^(r+1)/r ([K]-1)^r of a generator."""
    if not a.is_generator():
        raise NotAGenerator("log is defined on generator classes [K]")
    x = a - 1
    out = AlgebraElement.zero(a.n)
    power = AlgebraElement.one(a.n)
    for r in range(1, a.n + 1):
        power = power * x
        out = out + power * Fraction((-1) ** (r + 1), r)
    return out


def exp_class(a: AlgebraElement) -> AlgebraElement:
    """Truncated exponential sum_{r=0}^{n} a^r / r!."""
    if a.constant_part() != 0:
        raise NonNilpotentInput("exp needs an element with vanishing degree-0 part")
    out = AlgebraElement.one(a.n)
    power = AlgebraElement.one(a.n)
    for r in range(1, a.n + 1):
        power = power * a
        out = out + power * Fraction(1, math.factorial(r))
    return out


def _word_class(w: Word, n: int) -> AlgebraElement:
    return AlgebraElement(n, {w: 1})


def graded_component(a: AlgebraElement, level: int) -> AlgebraElement:
    """Level part: each word [K_w] contributes (log[K_w])^level / level!."""
    if not 0 <= level <= a.n:
        raise LevelOutOfRange(f"level must lie in 0..{a.n}")
    out = AlgebraElement.zero(a.n)
    for w, c in a.terms.items():
        if not w:
            if level == 0:
                out = out + c
            continue
        lg = log_class(_word_class(w, a.n))
        out = out + (lg ** level) * (c / math.factorial(level))
    return out


# ---------------------------------------------------------------------------
# iota: classes on smooth fans
# ---------------------------------------------------------------------------

def body_fan(h: SupportOracle) -> Fan | None:
    """A complete fan on whose cones a polytope's support function is linear."""
    if not h.is_polytope:
        return None
    p = h.polytope
    if p.is_full_dimensional:
        return normal_fan(p)
    return normal_fan(minkowski_sum(p, box([1] * p.dim)))


def working_fan(keys: Iterable, target: Fan, depth_limit: int = 8) -> Fan:
    """Smooth refinement of ``target`` on which every base body is nef (and exact if polyhedral)."""
    memo = target.memo.setdefault("working", {})
    keys = tuple(sorted(keys, key=_key_order))
    if keys in memo:
        return memo[keys]
    f = target
    for k in keys:
        bf = body_fan(base(k))
        if bf is not None:
            f = common_refinement(f, bf)
    f = resolve(f)
    for k in keys:
        if not base(k).is_polytope:
            f = refine_until_nef(base(k), f, depth_limit)[0]
    memo[keys] = f
    return f


def _divisor_function(fan: Fan, w: Word) -> PiecewisePolynomial:
    """PL function of the divisor with coefficients -h_w on rays, translation-normalized."""
    vals = []
    bs = [(base(k), m) for k, m in w]
    for r in fan.rays:
        vals.append(-sum((m * h(r) for h, m in bs), Fraction(0)))
    return PiecewisePolynomial.from_ray_values(fan, vals)


def iota(a: AlgebraElement, target: Fan, depth_limit: int = 8, working: Fan | None = None,
         method: str = "log") -> ChowClass:
    """Image of ``a`` as a graded class on the smooth complete fan ``target``.

    The default route evaluates the log-coordinate expansion of ``a`` at the
    base divisor functions; ``method="words"`` sums exp(D_w) word by word.
    """
    if a.n != target.dim:
        raise DimensionMismatch("element and fan of different dimension")
    target.require_smooth()
    fine = working if working is not None else working_fan(a.bases(), target, depth_limit)
    if method == "log":
        comps = _iota_log(a, fine)
    elif method == "words":
        comps = _iota_words(a, fine)
    else:
        raise ValueError(f"unknown method {method}")
    cc = ChowClass(fine, comps)
    if fine != target:
        cc = cc.pushforward(target)
    return cc


def _iota_words(a: AlgebraElement, fine: Fan) -> list[PiecewisePolynomial]:
    n = a.n
    comps = [PiecewisePolynomial.zero(fine) for _ in range(n + 1)]
    for w, c in a.terms.items():
        if not w:
            comps[0] = comps[0] + c
            continue
        g = _divisor_function(fine, w)
        term = PiecewisePolynomial.constant(fine, c)
        comps[0] = comps[0] + term
        for k in range(1, n + 1):
            term = term * g * Fraction(1, k)
            comps[k] = comps[k] + term
    return comps


def _iota_log(a: AlgebraElement, fine: Fan) -> list[PiecewisePolynomial]:
    parts, keys = _log_coordinates(a)
    divisors = [_divisor_function(fine, ((k, 1),)) for k in keys]
    powers: dict = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = divisors[i] if k == 1 else power(i, k - 1) * divisors[i]
        return powers[(i, k)]

    comps = []
    for part in parts:
        total = PiecewisePolynomial.zero(fine)
        for e, c in part.terms.items():
            term = None
            for i, k in enumerate(e):
                if k:
                    term = power(i, k) if term is None else term * power(i, k)
            total = total + (PiecewisePolynomial.constant(fine, c) if term is None else term * c)
        comps.append(total)
    return comps


def probe_fan(n: int) -> Fan:
    return cube_fan(n)


def is_top_level(a: AlgebraElement, fan: Fan | None = None) -> bool:
    """Lower components vanish, syntactically in log coordinates or else under iota."""
    P, keys = _log_coordinates(a)
    if all(not P[l] for l in range(a.n)):
        return True
    cc = iota(a, fan or probe_fan(a.n))
    return all(cc.component_is_zero(d) for d in range(a.n))


# ---------------------------------------------------------------------------
# degrees
# ---------------------------------------------------------------------------

def _log_coordinates(a: AlgebraElement):
    """Homogeneous parts of sum_w c_w exp(m_w . beta), one variable beta_i per base."""
    keys = a.bases()
    idx = {k: i for i, k in enumerate(keys)}
    nv = len(keys)
    parts = [Polynomial._raw(nv, {}) for _ in range(a.n + 1)]
    for w, c in a.terms.items():
        coeffs = [Fraction(0)] * nv
        for k, m in w:
            coeffs[idx[k]] += m
        lin = Polynomial.linear(coeffs) if nv else None
        term = Polynomial.const(nv, c)
        parts[0] = parts[0] + term
        for l in range(1, a.n + 1):
            if lin is None:
                break
            term = term * lin * Fraction(1, l)
            parts[l] = parts[l] + term
    return parts, keys


@dataclass(frozen=True)
class LimitDegree:
    value: Fraction
    previous: Fraction
    lower: Fraction
    upper: Fraction
    levels: tuple[int, ...]
    values: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"value": fmt_q(self.value), "previous": fmt_q(self.previous),
                "interval": [fmt_q(self.lower), fmt_q(self.upper)],
                "value_float": float(self.value), "levels": list(self.levels),
                "values": [fmt_q(v) for v in self.values]}


def _degree_from_bodies(top: Polynomial, polys: Sequence[Polytope], n: int) -> Fraction:
    """Degree of sum c_alpha beta^alpha where beta_i = log[K_i]: c_alpha * MV(K^alpha)."""
    cache: dict = {}
    total = Fraction(0)
    for e, c in top.terms.items():
        bodies = tuple(i for i, k in enumerate(e) for _ in range(k))
        if bodies not in cache:
            cache[bodies] = mixed_volume([polys[i] for i in bodies])
        total += c * cache[bodies]
    return total


DEFAULT_SCHEDULE = (1, 2, 4, 8, 16)


def deg_top(a: AlgebraElement, mode: str = "exact", tolerance=Fraction(1, 1000),
            schedule: Sequence[int] = DEFAULT_SCHEDULE, check: bool = True):
    """Degree of a top-level element.

    In exact mode every base must be polyhedral and the result is a rational
    number.  In limit mode curved bases are replaced by outer approximations
    along all primitive directions of sup-norm <= d, for d in ``schedule``,
    until two successive values differ by less than ``tolerance``.
    """
    n = a.n
    parts, keys = _log_coordinates(a)
    if check and not all(not parts[l] for l in range(n)):
        if mode == "exact" and not is_top_level(a):
            raise NotTopDegree("element has nonzero lower-level components")
        if mode != "exact":
            raise NotTopDegree("limit mode needs an element that is top-level in log coordinates")
    top = parts[n]
    hs = [base(k) for k in keys]
    if mode == "exact":
        curved = [h for h in hs if not h.is_polytope]
        if curved:
            raise ValueError("exact mode needs polyhedral bodies; use mode='limit'")
        return _degree_from_bodies(top, [h.polytope for h in hs], n)
    if mode != "limit":
        raise ValueError(f"unknown mode {mode}")
    tol = Q(tolerance)
    values, levels = [], []
    for d in schedule:
        dirs = directions_up_to(n, d)
        polys = [h.polytope if h.is_polytope else outer_approx(h, dirs) for h in hs]
        values.append(_degree_from_bodies(top, polys, n))
        levels.append(d)
        if len(values) >= 2 and abs(values[-1] - values[-2]) < tol:
            v, prev = values[-1], values[-2]
            delta = abs(v - prev)
            return LimitDegree(v, prev, v - delta, v + delta, tuple(levels), tuple(values))
        if all(h.is_polytope for h in hs):
            v = values[-1]
            return LimitDegree(v, v, v, v, tuple(levels), tuple(values))
    raise ToleranceNotReached("schedule exhausted before the tolerance was met", values)


# ---------------------------------------------------------------------------
# equality at a fan
# ---------------------------------------------------------------------------

def equal_at(a: AlgebraElement, b: AlgebraElement, fan: Fan) -> tuple[bool, str]:
    """Compare iota images on ``fan``.

    The certificate is ``"exact"`` when every base is polyhedral and its
    support function is linear on each cone of ``fan``, and
    ``"necessary-condition only"`` otherwise.
    """

    if a.n != b.n:
        raise DimensionMismatch("elements of different dimension")
    diff = a - b
    keys = set(a.bases()) | set(b.bases())
    exact = all(base(k).is_polytope and is_exact_on(base(k), fan) for k in keys)
    same = iota(diff, fan).is_zero()
    return same, "exact" if exact else "necessary-condition only"

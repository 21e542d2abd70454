"""Exact rational arithmetic: linear systems, multivariate polynomials and
rational functions over the rationals.

Everything here is immutable and uses Python's arbitrary-precision integers
through :class:`fractions.Fraction`; nothing ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence


class NonExactDivision(ArithmeticError):
    """Raised when a polynomial division leaves a nonzero remainder."""


# ---------------------------------------------------------------------------
# Rationals
# ---------------------------------------------------------------------------

def Q(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic")
    return Fraction(x)


def _int_poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def fmt_q(x: Fraction) -> str:
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def primitive(v: Sequence) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector on its ray."""
    if all(type(c) is int for c in v):
        g = reduce(gcd, v, 0)
        if g == 0:
            raise ValueError("zero vector has no primitive representative")
        return tuple(c // g for c in v)
    v = [Q(c) for c in v]
    den = reduce(lcm, (c.denominator for c in v), 1)
    ints = [int(c * den) for c in v]
    g = reduce(gcd, ints, 0)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(c // g for c in ints)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    den = reduce(lcm, (Q(c).denominator for r in rows for c in r), 1)
    m = [[int(Q(c) * den) for c in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return Fraction(sign * m[n - 1][n - 1], den ** n)


def inverse(rows: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(rows)
    cols = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    out = []
    for e in cols:
        sol = solve_linear(rows, e)
        if sol.solution is None or sol.kernel:
            raise ZeroDivisionError("singular matrix")
        out.append(sol.solution)
    # columns of the inverse were solved one at a time
    return tuple(tuple(out[j][i] for j in range(n)) for i in range(n))


def mat_vec(m: Sequence[Sequence], v: Sequence) -> tuple[Fraction, ...]:
    return tuple(dot(row, v) for row in m)


@dataclass(frozen=True)
class LinearSolution:
    """Result of :func:`solve_linear`.

    ``solution`` is a particular solution (free variables set to zero) or
    ``None`` when the system is inconsistent. ``kernel`` is a basis of the
    null space. ``certificate`` is a row vector ``y`` with ``y A = 0`` and
    ``y b != 0`` witnessing inconsistency.
    """

    solution: tuple[Fraction, ...] | None
    kernel: tuple[tuple[Fraction, ...], ...]
    certificate: tuple[Fraction, ...] | None = None

    @property
    def consistent(self) -> bool:
        return self.solution is not None


def _row_echelon(m: list[list[int]], ncols: int):
    """In-place fraction-free elimination of the first ``ncols`` columns.

    Returns the pivot columns. Rows are integer lists; extra columns beyond
    ``ncols`` are carried along.
    """
    nrows = len(m)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        width = len(m[r])
        for i in range(r + 1, nrows):
            a = m[i][c]
            if a == 0:
                row = m[i]
                m[i] = [(x * piv) // prev for x in row]
                continue
            top = m[r]
            row = m[i]
            m[i] = [(row[j] * piv - a * top[j]) // prev for j in range(width)]
        prev = piv
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return pivots


def solve_linear(system: Sequence[Sequence], rhs: Sequence) -> LinearSolution:
    """Solve ``system @ x = rhs`` exactly.

    Uses Bareiss elimination on an integer-scaled augmented matrix that also
    tracks the row operations, so an inconsistent system comes back with a
    certificate instead of raising.
    """
    nrows = len(system)
    if nrows != len(rhs):
        raise ValueError("row count of system and rhs differ")
    ncols = len(system[0]) if nrows else 0
    if any(len(r) != ncols for r in system):
        raise ValueError("matrix rows have unequal length")
    m = []
    for i, (row, b) in enumerate(zip(system, rhs)):
        vals = [Q(c) for c in row] + [Q(b)]
        den = reduce(lcm, (v.denominator for v in vals), 1)
        ints = [int(v * den) for v in vals]
        ident = [0] * nrows
        ident[i] = den
        m.append(ints + ident)
    pivots = _row_echelon(m, ncols)
    rank = len(pivots)
    for i in range(rank, nrows):
        if m[i][ncols] != 0:
            cert = tuple(Fraction(x) for x in m[i][ncols + 1:])
            g = reduce(gcd, (abs(x.numerator) for x in cert), 0) or 1
            cert = tuple(x / g for x in cert)
            return LinearSolution(None, _kernel(m, pivots, ncols), cert)
    x = [Fraction(0)] * ncols
    for i in range(rank - 1, -1, -1):
        c = pivots[i]
        s = Fraction(m[i][ncols])
        for j in range(c + 1, ncols):
            if m[i][j] and x[j]:
                s -= m[i][j] * x[j]
        x[c] = s / m[i][c]
    return LinearSolution(tuple(x), _kernel(m, pivots, ncols))


def _kernel(m, pivots, ncols):
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            c = pivots[i]
            s = Fraction(0)
            for j in range(c + 1, ncols):
                if m[i][j] and x[j]:
                    s -= m[i][j] * x[j]
            x[c] = s / m[i][c]
        basis.append(tuple(x))
    return tuple(basis)


def nullspace(system: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    return solve_linear(system, [0] * len(system)).kernel


def rank(system: Sequence[Sequence]) -> int:
    if not system:
        return 0
    ncols = len(system[0])
    return ncols - len(nullspace(system))


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

Exponent = tuple[int, ...]


def _grlex_key(e: Exponent):
    return (sum(e), e)


class Polynomial:
    """Multivariate polynomial over Q in ``nvars`` variables.

    Terms map exponent tuples to nonzero Fractions. Instances are immutable
    and hashable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                c = Q(c)
                if c:
                    e = tuple(e)
                    if len(e) != nvars:
                        raise ValueError("exponent length does not match nvars")
                    clean[e] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, nvars: int, c=1) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): Fraction(1)})

    @classmethod
    def linear(cls, coeffs: Sequence) -> "Polynomial":
        """The linear form ``sum coeffs[i] * x_i``."""
        n = len(coeffs)
        terms = {}
        for i, c in enumerate(coeffs):
            c = Q(c)
            if c:
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return cls._raw(n, terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self, d: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        return len(degs) == 1 and (d is None or degs == {d})

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def leading(self) -> tuple[Exponent, Fraction]:
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def constant_value(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different rings")
            return other
        return Polynomial.const(self.nvars, Q(other))

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return Polynomial._raw(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = Q(other)
            if not c:
                return Polynomial._raw(self.nvars, {})
            return Polynomial._raw(self.nvars, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        t: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Polynomial._raw(self.nvars, {e: c for e, c in t.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            return poly_divide_exact(self, other)
        c = Q(other)
        return Polynomial._raw(self.nvars, {e: v / c for e, v in self.terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = Polynomial.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            return self == Polynomial.const(self.nvars, Q(other))
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # evaluation and substitution -----------------------------------------
    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = point[0]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= x ** k
            total += v
        return total

    def compose_linear(self, rows: Sequence[Sequence]) -> "Polynomial":
        """Substitute ``x_i -> sum_j rows[i][j] * y_j``.

        ``rows`` has one row per variable of ``self``; the result lives in
        ``len(rows[0])`` variables.
        """
        m = len(rows[0]) if rows else 0
        if all(type(x) is int for r in rows for x in r):
            return self._compose_integer(rows, m)
        images = [Polynomial.linear(r) for r in rows]
        cache: dict[tuple[int, int], Polynomial] = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = images[i] ** k
            return cache[key]

        total = Polynomial._raw(m, {})
        for e, c in self.terms.items():
            term = Polynomial.const(m, c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
            total = total + term
        return total

    def _compose_integer(self, rows: Sequence[Sequence[int]], m: int) -> "Polynomial":
        """compose_linear for integer rows, expanding with int coefficients."""
        unit = (0,) * m
        images = []
        for r in rows:
            t = {}
            for j, x in enumerate(r):
                if x:
                    e = [0] * m
                    e[j] = 1
                    t[tuple(e)] = x
            images.append(t)
        cache: dict = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = {unit: 1} if k == 0 else _int_poly_mul(power(i, k - 1), images[i])
            return cache[key]

        expanded: dict = {}
        for e, c in self.terms.items():
            term = {unit: 1}
            for i, k in enumerate(e):
                if k:
                    term = _int_poly_mul(term, power(i, k))
            expanded.setdefault(e, term)
        total: dict = {}
        for e, c in self.terms.items():
            for f, v in expanded[e].items():
                total[f] = total.get(f, 0) + c * v
        return Polynomial._raw(m, {e: Q(c) for e, c in total.items() if c})

    def to_json(self) -> dict:
        keys = sorted(self.terms, key=_grlex_key)
        return {",".join(map(str, e)): fmt_q(self.terms[e]) for e in keys}

    @classmethod
    def from_json(cls, nvars: int, data: Mapping[str, str]) -> "Polynomial":
        terms = {}
        for k, v in data.items():
            e = tuple(int(x) for x in k.split(",")) if k else ()
            terms[e] = Q(v)
        return cls(nvars, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[e]
            mon = "*".join(f"u{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            if not mon:
                parts.append(fmt_q(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{fmt_q(c)}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_divmod(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Multivariate division with respect to graded-lex order."""
    if den.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    n = num.nvars
    le, lc = den.leading()
    rem = dict(num.terms)
    quot: dict = {}
    out_rem: dict = {}
    while rem:
        e = max(rem, key=_grlex_key)
        c = rem[e]
        if all(a >= b for a, b in zip(e, le)):
            qe = tuple(a - b for a, b in zip(e, le))
            qc = c / lc
            quot[qe] = quot.get(qe, 0) + qc
            for de, dc in den.terms.items():
                t = tuple(a + b for a, b in zip(qe, de))
                v = rem.get(t, 0) - qc * dc
                if v:
                    rem[t] = v
                else:
                    rem.pop(t, None)
        else:
            out_rem[e] = c
            del rem[e]
    return Polynomial(n, quot), Polynomial._raw(n, out_rem)


def poly_divide_exact(num: Polynomial, den: Polynomial) -> Polynomial:
    q, r = poly_divmod(num, den)
    if not r.is_zero():
        raise NonExactDivision(f"({num}) is not divisible by ({den})")
    return q


# multivariate gcd ----------------------------------------------------------

def _as_univariate(p: Polynomial, k: int) -> dict[int, Polynomial]:
    """Split ``p`` by powers of variable ``k``; coefficients drop that variable."""
    out: dict[int, dict] = {}
    for e, c in p.terms.items():
        d = e[k]
        e2 = e[:k] + (0,) + e[k + 1:]
        out.setdefault(d, {})[e2] = c
    return {d: Polynomial._raw(p.nvars, t) for d, t in out.items()}


def _from_univariate(coeffs: Mapping[int, Polynomial], k: int, nvars: int) -> Polynomial:
    t = {}
    for d, c in coeffs.items():
        for e, v in c.terms.items():
            t[e[:k] + (d,) + e[k + 1:]] = v
    return Polynomial._raw(nvars, t)


def _monic(p: Polynomial) -> Polynomial:
    if p.is_zero():
        return p
    return p * (1 / p.leading()[1])


def _content(p: Polynomial, k: int) -> Polynomial:
    g = Polynomial._raw(p.nvars, {})
    for c in _as_univariate(p, k).values():
        g = _gcd(g, c, k)
        if g.degree() == 0:
            break
    return g


def _gcd(a: Polynomial, b: Polynomial, k: int) -> Polynomial:
    """gcd of polynomials involving only variables ``0..k-1``."""
    n = a.nvars
    if a.is_zero():
        return _monic(b)
    if b.is_zero():
        return _monic(a)
    if k == 0 or (a.degree() == 0 or b.degree() == 0):
        return Polynomial.const(n, 1)
    v = k - 1
    if all(e[v] == 0 for e in a.terms) and all(e[v] == 0 for e in b.terms):
        return _gcd(a, b, v)
    ca, cb = _content(a, v), _content(b, v)
    pa, pb = poly_divide_exact(a, ca), poly_divide_exact(b, cb)
    cont = _gcd(ca, cb, v)
    # primitive PRS in variable v over Q[x_0..x_{v-1}]
    f, g = pa, pb
    if _deg_in(f, v) < _deg_in(g, v):
        f, g = g, f
    while not g.is_zero() and _deg_in(g, v) > 0:
        r = _prem(f, g, v)
        f = g
        if r.is_zero():
            g = r
            break
        g = poly_divide_exact(r, _content(r, v))
    if not g.is_zero():
        # nonzero remainder free of v: primitive parts are coprime in v
        f = Polynomial.const(n, 1)
    else:
        f = poly_divide_exact(f, _content(f, v))
    return _monic(cont * f)


def _deg_in(p: Polynomial, v: int) -> int:
    return max((e[v] for e in p.terms), default=-1)


def _prem(f: Polynomial, g: Polynomial, v: int) -> Polynomial:
    n = f.nvars
    df, dg = _deg_in(f, v), _deg_in(g, v)
    gu = _as_univariate(g, v)
    lc = gu[dg]
    rem = _as_univariate(f, v)
    for d in range(df, dg - 1, -1):
        c = rem.pop(d, None)
        rem = {k: x * lc for k, x in rem.items()}
        if c is None:
            continue
        for gd, gc in gu.items():
            if gd == dg:
                continue
            k = gd + d - dg
            rem[k] = rem.get(k, Polynomial._raw(n, {})) - c * gc
    rem = {k: x for k, x in rem.items() if not x.is_zero()}
    return _from_univariate(rem, v, n)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic (graded-lex leading coefficient 1) gcd over Q."""
    return _gcd(a, b, a.nvars)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------

class RationalFunction:
    """Quotient of polynomials kept reduced, with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None, *, reduce: bool = True):
        if den is None:
            den = Polynomial.const(num.nvars, 1)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if reduce:
            num, den = _reduce_pair(num, den)
        self.num = num
        self.den = den

    @property
    def nvars(self):
        return self.num.nvars

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        other = _as_rf(other, self.nvars)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        return self + (-_as_rf(other, self.nvars))

    def __mul__(self, other):
        other = _as_rf(other, self.nvars)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_rf(other, self.nvars)
        return RationalFunction(self.num * other.den, self.den * other.num)

    def as_polynomial(self) -> Polynomial:
        return poly_divide_exact(self.num, self.den)

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            other = _as_rf(other, self.nvars)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"({self.num}) / ({self.den})"


def _as_rf(x, nvars) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction(x, reduce=False)
    return RationalFunction(Polynomial.const(nvars, Q(x)), reduce=False)


def _reduce_pair(num: Polynomial, den: Polynomial):
    n = num.nvars
    if num.is_zero():
        return num, Polynomial.const(n, 1)
    g = poly_gcd(num, den)
    if g.degree() > 0:
        num, den = poly_divide_exact(num, g), poly_divide_exact(den, g)
    lc = den.leading()[1]
    return num * (1 / lc), den * (1 / lc)


def rf_add(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return a + b


def rf_mul(a: RationalFunction, b: RationalFunction) -> RationalFunction:
    return a * b


def rf_reduce(a: RationalFunction) -> RationalFunction:
    return RationalFunction(a.num, a.den)


def sum_rationals(values: Iterable[Fraction]) -> Fraction:
    return sum(values, Fraction(0))

"""Exact verification of mixed-degree inequalities and structural identities."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .bodies import SupportOracle, minkowski_oracle, oracle_from_polytope
from .csalg import AlgebraElement, LimitDegree, cls, deg_top, equal_at, iota, log_class
from .exactgeom import Q, fmt_q
from .fan import Fan
from .polytope import Polytope, hull, intersection, volume
from .ppoly import PiecewisePolynomial, degree_functional, pullback, pushforward


class NonPositiveDegree(ValueError):
    pass


PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


# ---------------------------------------------------------------------------
# exact roots
# ---------------------------------------------------------------------------

def iroot(x: int, n: int) -> int:
    """Largest integer r with r**n <= x."""
    if x < 0:
        raise ValueError("negative radicand")
    if x < 2:
        return x
    r = 1 << ((x.bit_length() + n - 1) // n)
    while True:
        s = ((n - 1) * r + x // r ** (n - 1)) // n
        if s >= r:
            break
        r = s
    while r ** n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


def rational_root(q: Fraction, n: int) -> Fraction | None:
    """Exact nonnegative n-th root of q when it is rational."""
    q = Fraction(q)
    if q < 0:
        return None
    a, b = iroot(q.numerator, n), iroot(q.denominator, n)
    if a ** n == q.numerator and b ** n == q.denominator:
        return Fraction(a, b)
    return None


def root_bounds(q: Fraction, n: int, bits: int) -> tuple[Fraction, Fraction]:
    """Rational lower and upper bounds on q^(1/n) of width 2^-bits."""
    scale = 1 << bits
    lo = iroot(int(Fraction(q) * scale ** n), n)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def compare_root_sum(a, b, c, n: int) -> int:
    """Sign of a^(1/n) - (b^(1/n) + c^(1/n)) for nonnegative rationals, computed exactly.

    Equality is decided by grouping radicals whose ratio is a rational n-th
    power (positive radicals from different groups are linearly independent
    over the rationals); otherwise bounds are refined until they separate.
    """
    a, b, c = Q(a), Q(b), Q(c)
    if min(a, b, c) < 0:
        raise ValueError("negative argument")
    if n == 1:
        s = a - b - c
        return (s > 0) - (s < 0)
    if b == 0 or c == 0:
        s = a - b - c
        return (s > 0) - (s < 0)
    if a == 0:
        return -1
    # equality test
    q = rational_root(b / c, n)
    if q is not None:
        r = rational_root(a / c, n)
        if r is not None and r == q + 1:
            return 0
    bits = 16
    while True:
        alo, ahi = root_bounds(a, n, bits)
        blo, bhi = root_bounds(b, n, bits)
        clo, chi = root_bounds(c, n, bits)
        if alo > bhi + chi:
            return 1
        if ahi < blo + clo:
            return -1
        bits *= 2


# ---------------------------------------------------------------------------
# degrees of products of log classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Deg:
    """An exact degree, or an interval from limit mode."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def value(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def show(self) -> str:
        return fmt_q(self.lo) if self.exact else f"[{fmt_q(self.lo)}, {fmt_q(self.hi)}]"


class DegreeTable:
    """deg(prod log[K_i]) for multisets of bodies, memoized."""

    def __init__(self, n: int, tolerance=Fraction(1, 1000)):
        self.n = n
        self.tolerance = tolerance
        self._cache: dict = {}

    def __call__(self, bodies: Sequence[SupportOracle]) -> Deg:
        if len(bodies) != self.n:
            raise ValueError(f"need {self.n} bodies")
        key = tuple(sorted((b.key for b in bodies), key=repr))
        if key not in self._cache:
            elt = AlgebraElement.one(self.n)
            for b in bodies:
                elt = elt * log_class(cls(b))
            if all(b.is_polytope for b in bodies):
                v = deg_top(elt, "exact", check=False)
                self._cache[key] = Deg(v, v)
            else:
                r: LimitDegree = deg_top(elt, "limit", tolerance=self.tolerance, check=False)
                self._cache[key] = Deg(max(r.lower, Fraction(0)), r.upper)
        return self._cache[key]


def _power(d: Deg, k) -> tuple[Fraction, Fraction]:
    return d.lo ** k, d.hi ** k


def _product(pairs: Sequence[tuple[Fraction, Fraction]]) -> tuple[Fraction, Fraction]:
    lo, hi = Fraction(1), Fraction(1)
    for a, b in pairs:
        lo, hi = lo * a, hi * b
    return lo, hi


def _verdict(lhs: tuple[Fraction, Fraction], rhs: tuple[Fraction, Fraction]) -> str:
    if lhs[0] >= rhs[1]:
        return PASS
    if lhs[1] >= rhs[0]:
        return INCONCLUSIVE
    return FAIL


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass
class InequalityReport:
    name: str
    samples: list = field(default_factory=list)
    seed: int | None = None

    @property
    def instances(self) -> int:
        return len(self.samples)

    @property
    def verdict(self) -> str:
        vs = {s["verdict"] for s in self.samples}
        if FAIL in vs:
            return FAIL
        if INCONCLUSIVE in vs:
            return INCONCLUSIVE
        return PASS

    @property
    def worst_margin(self) -> float | None:
        ms = [s["margin"] for s in self.samples if s.get("margin") is not None]
        return min(ms) if ms else None

    def add(self, label: str, lhs, rhs, verdict: str, margin=None):
        self.samples.append({"label": label, "lhs": lhs, "rhs": rhs, "verdict": verdict,
                             "margin": None if margin is None else float(margin)})

    def add_bounds(self, label: str, lhs: tuple, rhs: tuple):
        v = _verdict(lhs, rhs)
        show = lambda t: fmt_q(t[0]) if t[0] == t[1] else [fmt_q(t[0]), fmt_q(t[1])]
        self.add(label, show(lhs), show(rhs), v, lhs[0] - rhs[1])

    def merge(self, other: "InequalityReport", prefix: str = ""):
        for s in other.samples:
            self.samples.append(dict(s, label=prefix + s["label"]))

    def to_json(self) -> dict:
        return {"name": self.name, "seed": self.seed, "instances": self.instances,
                "verdict": self.verdict, "worst_margin": self.worst_margin, "samples": self.samples}


def _as_oracle(b) -> SupportOracle:
    return oracle_from_polytope(b) if isinstance(b, Polytope) else b


# ---------------------------------------------------------------------------
# inequality checks
# ---------------------------------------------------------------------------

def check_af(bodies: Sequence, table: DegreeTable | None = None) -> InequalityReport:
    """deg(k1 k2 k3..kn)^2 >= deg(k1 k1 k3..kn) * deg(k2 k2 k3..kn)."""
    ks = [_as_oracle(b) for b in bodies]
    n = len(ks)
    deg = table or DegreeTable(n)
    rest = ks[2:]
    a = deg(ks)
    b = deg([ks[0], ks[0]] + rest)
    c = deg([ks[1], ks[1]] + rest)
    rep = InequalityReport("af")
    rep.add_bounds("af", _power(a, 2), _product([_power(b, 1), _power(c, 1)]))
    return rep


def check_gen_hodge(k_bodies: Sequence, l_bodies: Sequence, table: DegreeTable | None = None) -> InequalityReport:
    """deg(k1..kp l..)^p >= prod_i deg(ki^p l..)."""
    ks = [_as_oracle(b) for b in k_bodies]
    ls = [_as_oracle(b) for b in l_bodies]
    p = len(ks)
    n = p + len(ls)
    if p < 1:
        raise ValueError("need at least one k body")
    deg = table or DegreeTable(n)
    lhs = _power(deg(ks + ls), p)
    rhs = _product([_power(deg([k] * p + ls), 1) for k in ks])
    rep = InequalityReport("hodge")
    rep.add_bounds(f"hodge p={p}", lhs, rhs)
    return rep


def _mixed(deg: DegreeTable, k, l, i: int) -> Deg:
    return deg([k] * i + [l] * (deg.n - i))


def check_corollary_items(k, l, q: int, p: int, n: int | None = None,
                          table: DegreeTable | None = None) -> InequalityReport:
    k, l = _as_oracle(k), _as_oracle(l)
    n = n or k.dim
    if not 1 <= q <= p <= n:
        raise ValueError("need 1 <= q <= p <= n")
    deg = table or DegreeTable(n)
    rep = InequalityReport("corollary")
    # item 1
    lhs = _power(_mixed(deg, k, l, q), p)
    rhs = _product([_power(_mixed(deg, k, l, p), q), _power(_mixed(deg, k, l, 0), p - q)])
    rep.add_bounds(f"item1 q={q} p={p}", lhs, rhs)
    # item 2
    for i in range(n + 1):
        lhs = _power(_mixed(deg, k, l, i), n)
        rhs = _product([_power(_mixed(deg, k, l, n), i), _power(_mixed(deg, k, l, 0), n - i)])
        rep.add_bounds(f"item2 i={i}", lhs, rhs)
    # item 3: deg((k+l)^n)^(1/n) >= deg(k^n)^(1/n) + deg(l^n)^(1/n)
    s = minkowski_oracle(k, l)
    a, b, c = deg([s] * n), _mixed(deg, k, l, n), _mixed(deg, k, l, 0)
    if a.exact and b.exact and c.exact:
        sign = compare_root_sum(a.lo, b.lo, c.lo, n)
        verdict = PASS if sign >= 0 else FAIL
    else:
        pess = compare_root_sum(a.lo, b.hi, c.hi, n)
        opt = compare_root_sum(a.hi, b.lo, c.lo, n)
        verdict = PASS if pess >= 0 else (INCONCLUSIVE if opt >= 0 else FAIL)
    margin = float(a.lo) ** (1 / n) - float(b.hi) ** (1 / n) - float(c.hi) ** (1 / n)
    rep.add("item3", a.show(), f"({b.show()})^(1/{n}) + ({c.show()})^(1/{n})", verdict, margin)
    return rep


def b_sequence(k, l, n: int | None = None, table: DegreeTable | None = None) -> list[Deg]:
    """deg(k^j l^(n-j)) for j = 0..n; b_j is the logarithm of the j-th entry."""
    k, l = _as_oracle(k), _as_oracle(l)
    n = n or k.dim
    deg = table or DegreeTable(n)
    return [_mixed(deg, k, l, j) for j in range(n + 1)]


def check_bj_concavity(k, l, n: int | None = None, table: DegreeTable | None = None) -> InequalityReport:
    """b_(j-1) + b_(j+1) <= 2 b_j, checked multiplicatively."""
    seq = b_sequence(k, l, n, table)
    if any(d.lo <= 0 for d in seq):
        raise NonPositiveDegree("b_j needs positive degrees")
    rep = InequalityReport("bj")
    for j in range(1, len(seq) - 1):
        rep.add_bounds(f"j={j}", _power(seq[j], 2), _product([_power(seq[j - 1], 1), _power(seq[j + 1], 1)]))
    return rep


def check_hodge_index_2d(k, l, table: DegreeTable | None = None) -> InequalityReport:
    """If deg(k l) = 0 and deg(k^2) > 0 then deg(l^2) = 0."""
    k, l = _as_oracle(k), _as_oracle(l)
    if k.dim != 2:
        raise ValueError("the Hodge index check is two-dimensional")
    deg = table or DegreeTable(2)
    kl, kk, ll = deg([k, l]), deg([k, k]), deg([l, l])
    rep = InequalityReport("hodge-index")
    if not (kl.exact and kk.exact and ll.exact):
        rep.add("premise", kl.show(), kk.show(), INCONCLUSIVE)
        return rep
    premise = kl.lo == 0 and kk.lo > 0
    verdict = PASS if (not premise or ll.lo == 0) else FAIL
    rep.add("vacuous" if not premise else "premise holds", kl.show(), ll.show(), verdict)
    return rep


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

def check_nilpotency(p, fans: Sequence[Fan]) -> InequalityReport:
    """All components of iota((cls(P) - 1)^(n+1)) vanish at each fan."""
    k = _as_oracle(p)
    n = k.dim
    elt = (cls(k) - 1) ** (n + 1)
    rep = InequalityReport("nilpotency")
    for i, f in enumerate(fans):
        cc = iota(elt, f)
        zero = [cc.component_is_zero(d) for d in range(n + 1)]
        rep.add(f"fan {i}", [int(z) for z in zero], [1] * (n + 1), PASS if all(zero) else FAIL)
    return rep


def convex_union(a: Polytope, b: Polytope) -> bool:
    """True iff the union of two full-dimensional polytopes is convex."""
    u = hull(list(a.vertices) + list(b.vertices))
    inter = intersection(a, b)
    vi = volume(inter) if not inter.is_empty else Fraction(0)
    return volume(u) == volume(a) + volume(b) - vi


def check_valuation(a: Polytope, b: Polytope, fan: Fan) -> InequalityReport:
    """[A] + [B] = [A u B] + [A n B] under iota at ``fan`` for a convex union."""
    rep = InequalityReport("valuation")
    if not convex_union(a, b):
        raise ValueError("the union is not convex")
    inter = intersection(a, b)
    lhs = cls(a) + cls(b)
    rhs = cls(hull(list(a.vertices) + list(b.vertices))) + cls(inter)
    same, cert = equal_at(lhs, rhs, fan)
    rep.add("valuation", cert, "exact", PASS if same else FAIL)
    return rep


def check_pushforward_axioms(fine: Fan, coarse: Fan, middle: Fan | None = None,
                             seed: int = 0) -> InequalityReport:
    """Unit, projection formula, degree preservation and composition for one chain."""
    rng = random.Random(seed)
    rep = InequalityReport("pushforward-axioms", seed=seed)
    one = PiecewisePolynomial.constant(fine, 1)
    ok = pushforward(one, coarse) == PiecewisePolynomial.constant(coarse, 1)
    rep.add("unit", "pi(1)", "1", PASS if ok else FAIL)
    n = fine.dim

    def rand_pl(f: Fan) -> PiecewisePolynomial:
        return PiecewisePolynomial.from_ray_values(f, [rng.randint(-3, 3) for _ in f.rays])

    for t in range(3):
        g = rand_pl(coarse)
        f = rand_pl(fine) * rand_pl(fine)
        lhs = pushforward(pullback(g, fine) * f, coarse)
        rhs = g * pushforward(f, coarse)
        rep.add(f"projection {t}", "pi(g*f)", "g*pi(f)", PASS if lhs == rhs else FAIL)
        for d in range(n + 2):
            part = f.homogeneous_part(d)
            img = pushforward(part, coarse)
            good = img.is_zero() or img.degree == d
            rep.add(f"degree {t}/{d}", d, img.degree, PASS if good else FAIL)
        top = rand_pl(fine)
        for _ in range(n - 1):
            top = top * rand_pl(fine)
        same = degree_functional(top) == degree_functional(pushforward(top, coarse))
        rep.add(f"chow {t}", "deg f", "deg pi(f)", PASS if same else FAIL)
    if middle is not None:
        for t in range(3):
            f = rand_pl(fine) * rand_pl(fine)
            two = pushforward(pushforward(f, middle), coarse)
            rep.add(f"composition {t}", "pi pi", "pi", PASS if two == pushforward(f, coarse) else FAIL)
    return rep


# ---------------------------------------------------------------------------
# randomized campaigns
# ---------------------------------------------------------------------------

def random_polytope(rng: random.Random, n: int, full: bool = True) -> Polytope:
    bound = 5 if n == 2 else 3
    while True:
        pts = [tuple(rng.randint(-bound, bound) for _ in range(n)) for _ in range(rng.randint(n + 1, n + 4))]
        p = hull(pts)
        if not full or p.is_full_dimensional:
            return p


def campaign(n: int, count: int, seed: int = 0) -> dict[str, InequalityReport]:
    """All inequality checks on ``count`` seeded random instances in dimension ``n``."""
    rng = random.Random(seed)
    names = ["af", "hodge", "corollary", "bj"] + (["hodge-index"] if n == 2 else [])
    reports = {name: InequalityReport(name, seed=seed) for name in names}
    for i in range(count):
        bodies = [oracle_from_polytope(random_polytope(rng, n)) for _ in range(n)]
        table = DegreeTable(n)
        reports["af"].merge(check_af(bodies, table), f"#{i} ")
        for p in range(1, n + 1):
            reports["hodge"].merge(check_gen_hodge(bodies[:p], bodies[p:], table), f"#{i} ")
        k, l = bodies[0], bodies[1]
        for p in range(1, n + 1):
            for q in range(1, p + 1):
                reports["corollary"].merge(check_corollary_items(k, l, q, p, n, table), f"#{i} ")
        reports["bj"].merge(check_bj_concavity(k, l, n, table), f"#{i} ")
        if n == 2:
            if i % 4 == 0:
                l = oracle_from_polytope(hull([tuple(rng.randint(-5, 5) for _ in range(2))]))
            elif i % 4 == 1:
                a = tuple(rng.randint(-5, 5) for _ in range(2))
                d = (rng.randint(-3, 3), rng.randint(-3, 3))
                k = oracle_from_polytope(hull([a, (a[0] + d[0], a[1] + d[1])]))
                l = oracle_from_polytope(hull([(0, 0), (2 * d[0], 2 * d[1])]))
            reports["hodge-index"].merge(check_hodge_index_2d(k, l, table), f"#{i} ")
    return reports

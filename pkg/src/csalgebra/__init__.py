"""Exact convex-set algebra over rational polytopes and toric fans."""

from .exactgeom import Polynomial, RationalFunction, fmt_q, poly_divide_exact, poly_gcd, solve_linear
from .polytope import Polytope, hull, minkowski_sum, mixed_volume, normal_fan, support_value, volume
from .fan import Fan, common_refinement, is_complete, refines, resolve
from .ppoly import ChowClass, PiecewisePolynomial, degree_functional, pushforward, reduce_mod_linear
from .bodies import SupportOracle, builtin, oracle_from_polytope, outer_approx, refine_until_nef
from .csalg import AlgebraElement, cls, deg_top, equal_at, exp_class, iota, log_class
from .checks import InequalityReport, campaign

__all__ = [
    "AlgebraElement", "ChowClass", "Fan", "InequalityReport", "PiecewisePolynomial", "Polynomial",
    "Polytope", "RationalFunction", "SupportOracle", "builtin", "campaign", "cls", "common_refinement",
    "deg_top", "degree_functional", "equal_at", "exp_class", "fmt_q", "hull", "iota", "is_complete",
    "log_class", "minkowski_sum", "mixed_volume", "normal_fan", "oracle_from_polytope", "outer_approx",
    "poly_divide_exact", "poly_gcd", "pushforward", "reduce_mod_linear", "refine_until_nef", "refines",
    "resolve", "solve_linear", "support_value", "volume",
]

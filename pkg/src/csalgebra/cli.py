"""Command-line interface; every command prints JSON on standard output.

Exit codes: 0 success or passing check, 1 usage or input error, 2 failed
check, 3 inconclusive result or unmet tolerance.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import bodies, checks, csalg, fan as fanmod, polytope, ppoly
from .exactgeom import Q, fmt_q

CONFIG_ENV = "CSALGEBRA_CONFIG"


class UsageError(Exception):
    def __init__(self, code: str, message: str, exit_code: int = 1, extra: dict | None = None):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code
        self.extra = extra or {}


@dataclass
class Config:
    tolerance: Fraction = Fraction(1, 1000)
    depth_schedule: tuple[int, ...] = (1, 2, 4, 8, 16)
    resolution_limit: int = 64
    seed: int = 0

    def validate(self):
        if self.tolerance <= 0:
            raise UsageError("E_CONFIG", "tolerance must be positive")
        s = self.depth_schedule
        if not s or any(b <= a for a, b in zip(s, s[1:])):
            raise UsageError("E_CONFIG", "depth schedule must be strictly increasing")
        return self


def load_config(args) -> Config:
    cfg = Config()
    try:
        path = os.environ.get(CONFIG_ENV)
        if path:
            with open(path) as fh:
                data = json.load(fh)
            if "tolerance" in data:
                cfg.tolerance = Q(str(data["tolerance"])) if not isinstance(data["tolerance"], float) \
                    else Fraction(str(data["tolerance"]))
            if "depth_schedule" in data:
                cfg.depth_schedule = tuple(int(x) for x in data["depth_schedule"])
            if "resolution_limit" in data:
                cfg.resolution_limit = int(data["resolution_limit"])
            if "seed" in data:
                cfg.seed = int(data["seed"])
        if getattr(args, "tolerance", None) is not None:
            cfg.tolerance = Fraction(args.tolerance)
        if getattr(args, "depth_schedule", None):
            cfg.depth_schedule = tuple(int(x) for x in args.depth_schedule.split(","))
        if getattr(args, "resolution_limit", None) is not None:
            cfg.resolution_limit = args.resolution_limit
        if getattr(args, "seed", None) is not None:
            cfg.seed = args.seed
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError("E_CONFIG", str(exc)) from None
    return cfg.validate()


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError("E_PARSE", f"{path}: {exc}") from None


def parse_polytope(data) -> polytope.Polytope:
    try:
        return polytope.Polytope.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError("E_PARSE", f"bad polytope: {exc}") from None


def parse_fan(data) -> fanmod.Fan:
    try:
        return fanmod.Fan.from_json(data)
    except fanmod.DimensionMismatch as exc:
        raise UsageError("E_DIM", str(exc)) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError("E_PARSE", f"bad fan: {exc}") from None


def parse_body(data) -> bodies.SupportOracle:
    if "builtin" in data:
        try:
            return bodies.builtin(data["builtin"])
        except ValueError as exc:
            raise UsageError("E_PARSE", str(exc)) from None
    if "values" in data:
        return bodies.parse_table(data)
    return bodies.oracle_from_polytope(parse_polytope(data))


def parse_expression(data) -> csalg.AlgebraElement:
    """{"dim", "terms": [{"coeff", "body", "op"}], "product": [indices]}.

    With ``product`` the listed terms are multiplied (repeats allowed);
    without it the terms are added.
    """
    try:
        n = int(data["dim"])
        terms = []
        for t in data["terms"]:
            body = parse_body(t["body"])
            if body.dim != n:
                raise UsageError("E_DIM", "body dimension differs from the expression's")
            c = csalg.cls(body)
            op = t.get("op", "cls")
            if op == "log":
                c = csalg.log_class(c)
            elif op != "cls":
                raise UsageError("E_PARSE", f"unknown op {op!r}")
            terms.append(c * Q(t.get("coeff", "1")))
        if "product" in data:
            out = csalg.AlgebraElement.one(n)
            for i in data["product"]:
                out = out * terms[i]
            return out
        out = csalg.AlgebraElement.zero(n)
        for t in terms:
            out = out + t
        return out
    except (KeyError, TypeError, IndexError) as exc:
        raise UsageError("E_PARSE", f"bad expression: {exc!r}") from None


def parse_class(data) -> ppoly.ChowClass:
    try:
        if "components" in data:
            return ppoly.ChowClass.from_json(data)
        return ppoly.ChowClass.from_function(ppoly.PiecewisePolynomial.from_json(data))
    except fanmod.NotSmooth as exc:
        raise UsageError("E_NOT_SMOOTH", str(exc)) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError("E_PARSE", f"bad class: {exc}") from None


def require_complete(f: fanmod.Fan):
    if not f.is_complete():
        raise UsageError("E_NOT_COMPLETE", "fan is not complete")


def require_smooth(f: fanmod.Fan):
    require_complete(f)
    if not f.is_smooth():
        raise UsageError("E_NOT_SMOOTH", "fan is not smooth")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_volume(args, cfg):
    return fmt_q(polytope.volume(parse_polytope(read_json(args.polytope)))), 0


def cmd_mixed_volume(args, cfg):
    ps = [parse_polytope(read_json(p)) for p in args.polytopes]
    try:
        return fmt_q(polytope.mixed_volume(ps)), 0
    except (polytope.ArityMismatch, fanmod.DimensionMismatch) as exc:
        raise UsageError("E_DIM", str(exc)) from None


def cmd_normal_fan(args, cfg):
    p = parse_polytope(read_json(args.polytope))
    try:
        return polytope.normal_fan(p).to_json(), 0
    except fanmod.DegenerateFan as exc:
        raise UsageError("E_DEGENERATE", str(exc)) from None


def cmd_refine(args, cfg):
    a, b = parse_fan(read_json(args.a)), parse_fan(read_json(args.b))
    if a.dim != b.dim:
        raise UsageError("E_DIM", "fans of different dimension")
    require_complete(a)
    require_complete(b)
    return fanmod.common_refinement(a, b).to_json(), 0


def cmd_resolve(args, cfg):
    f = parse_fan(read_json(args.fan))
    require_complete(f)
    try:
        return fanmod.resolve(f, cfg.resolution_limit).to_json(), 0
    except fanmod.ResolutionLimit as exc:
        raise UsageError("E_DEPTH", str(exc), 3) from None


def cmd_degree(args, cfg):
    elt = parse_expression(read_json(args.expression))
    try:
        if args.mode == "exact":
            return fmt_q(csalg.deg_top(elt, "exact")), 0
        res = csalg.deg_top(elt, "limit", tolerance=cfg.tolerance, schedule=cfg.depth_schedule)
        return res.to_json(), 0
    except csalg.NotTopDegree as exc:
        raise UsageError("E_NOT_TOP", str(exc), 3) from None
    except csalg.ToleranceNotReached as exc:
        raise UsageError("E_TOL", str(exc), 3, {"values": [fmt_q(v) for v in exc.values]}) from None


def cmd_class(args, cfg):
    elt = parse_expression(read_json(args.expression))
    f = parse_fan(read_json(args.fan))
    require_smooth(f)
    try:
        return csalg.iota(elt, f).to_json(), 0
    except bodies.DepthExceeded as exc:
        raise UsageError("E_DEPTH", str(exc), 3) from None


def cmd_push(args, cfg):
    c = parse_class(read_json(args.cls))
    target = parse_fan(read_json(args.to))
    require_smooth(target)
    if not fanmod.refines(c.fan, target):
        raise UsageError("E_NOT_REFINEMENT", "class fan does not refine the target fan")
    return c.pushforward(target).to_json(), 0


def _bodies_from(paths):
    return [parse_body(read_json(p)) for p in paths]


def cmd_check(args, cfg):
    name = args.name
    ins = args.inputs
    try:
        if name == "af":
            rep = checks.check_af(_bodies_from(ins))
        elif name == "hodge":
            bs = _bodies_from(ins)
            p = args.p if args.p is not None else len(bs)
            rep = checks.check_gen_hodge(bs[:p], bs[p:])
        elif name == "corollary":
            k, l = _bodies_from(ins)
            n = k.dim
            rep = checks.InequalityReport("corollary")
            qs = [(args.q, args.p)] if args.q and args.p else \
                [(q, p) for p in range(1, n + 1) for q in range(1, p + 1)]
            table = checks.DegreeTable(n, cfg.tolerance)
            for q, p in qs:
                rep.merge(checks.check_corollary_items(k, l, q, p, n, table), f"q={q} p={p} ")
        elif name == "bj":
            k, l = _bodies_from(ins)
            rep = checks.check_bj_concavity(k, l)
        elif name == "hodge-index":
            k, l = _bodies_from(ins)
            rep = checks.check_hodge_index_2d(k, l)
        elif name == "nilpotency":
            p = parse_polytope(read_json(ins[0]))
            fans = [parse_fan(read_json(x)) for x in ins[1:]] or \
                [fanmod.cube_fan(p.dim), fanmod.projective_space_fan(p.dim)]
            for f in fans:
                require_smooth(f)
            rep = checks.check_nilpotency(p, fans)
        elif name == "valuation":
            a, b = (parse_polytope(read_json(x)) for x in ins[:2])
            if len(ins) > 2:
                f = parse_fan(read_json(ins[2]))
                require_smooth(f)
            else:
                f = fanmod.resolve(fanmod.common_refinement(polytope.normal_fan(a), polytope.normal_fan(b)))
                f = fanmod.resolve(fanmod.common_refinement(
                    f, polytope.normal_fan(polytope.hull(list(a.vertices) + list(b.vertices)))))
            rep = checks.check_valuation(a, b, f)
        elif name == "pushforward-axioms":
            fine, coarse = (parse_fan(read_json(x)) for x in ins[:2])
            middle = parse_fan(read_json(ins[2])) if len(ins) > 2 else None
            for f in (fine, coarse) + ((middle,) if middle else ()):
                require_smooth(f)
            if not fanmod.refines(fine, coarse):
                raise UsageError("E_NOT_REFINEMENT", "first fan does not refine the second")
            rep = checks.check_pushforward_axioms(fine, coarse, middle, seed=cfg.seed)
        else:
            raise UsageError("E_USAGE", f"unknown check {name!r}")
    except (ValueError, IndexError) as exc:
        raise UsageError("E_INPUT", str(exc) or "missing inputs") from None
    except csalg.ToleranceNotReached as exc:
        raise UsageError("E_TOL", str(exc), 3) from None
    if rep.seed is None:
        rep.seed = cfg.seed
    code = {checks.PASS: 0, checks.FAIL: 2, checks.INCONCLUSIVE: 3}[rep.verdict]
    return rep.to_json(), code


CHECK_NAMES = ["af", "hodge", "corollary", "bj", "hodge-index", "nilpotency", "valuation",
               "pushforward-axioms"]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="csalgebra", description=__doc__.splitlines()[0])
    ap.add_argument("--tolerance", type=str, default=None, help="limit-mode tolerance (rational)")
    ap.add_argument("--depth-schedule", default=None, help="comma-separated sup-norm levels")
    ap.add_argument("--resolution-limit", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--output", default=None, help="write JSON here instead of standard output")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("volume")
    p.add_argument("polytope")
    p.set_defaults(func=cmd_volume)
    p = sub.add_parser("mixed-volume")
    p.add_argument("polytopes", nargs="+")
    p.set_defaults(func=cmd_mixed_volume)
    p = sub.add_parser("normal-fan")
    p.add_argument("polytope")
    p.set_defaults(func=cmd_normal_fan)
    p = sub.add_parser("refine")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_refine)
    p = sub.add_parser("resolve")
    p.add_argument("fan")
    p.set_defaults(func=cmd_resolve)
    p = sub.add_parser("degree")
    p.add_argument("expression")
    p.add_argument("--mode", choices=["exact", "limit"], default="exact")
    p.set_defaults(func=cmd_degree)
    p = sub.add_parser("class")
    p.add_argument("expression")
    p.add_argument("--fan", required=True)
    p.set_defaults(func=cmd_class)
    p = sub.add_parser("push")
    p.add_argument("cls", metavar="class")
    p.add_argument("--to", required=True)
    p.set_defaults(func=cmd_push)
    p = sub.add_parser("check")
    p.add_argument("name")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--p", type=int, default=None)
    p.add_argument("--q", type=int, default=None)
    p.set_defaults(func=cmd_check)
    for sp in sub.choices.values():
        sp.add_argument("--tolerance", type=str, default=argparse.SUPPRESS)
        sp.add_argument("--depth-schedule", default=argparse.SUPPRESS)
        sp.add_argument("--resolution-limit", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        sp.add_argument("--output", default=argparse.SUPPRESS)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        cfg = load_config(args)
        result, code = args.func(args, cfg)
    except UsageError as exc:
        print(json.dumps({"error": exc.code, "message": str(exc), **exc.extra}), file=sys.stderr)
        return exc.exit_code
    except (fanmod.FanError, polytope.EmptyInput, ppoly.FanMismatch, ppoly.DegreeMismatch,
            ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    text = json.dumps(result, indent=None, sort_keys=False)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())

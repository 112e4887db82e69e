"""Command-line surface: solve, classify, sweep, verify, render, dynamics.

Single-file JSON in/out for reproducibility; figures are SVG paths built from
boundary samples; grids export to PNG/PPM.  Exit codes: 0 success, 2 solver
non-convergence, 3 verification failure, 4 input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import classical, conformal, lqd, numcheck, pqd, schwarzdyn
from .errors import InputError, NoConvergence, QuadlabError
from .maps import EXTERIOR, INTERIOR, MapSpec
from .ratfun import RationalFn

EXIT_OK = 0
EXIT_NOCONV = 2
EXIT_VERIFY = 3
EXIT_INPUT = 4

VERIFY_TOL = 1e-7


def parse_complex(s):
    try:
        return complex(str(s).replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise InputError(f"cannot parse complex number {s!r}") from exc


def load_json_arg(s):
    """Inline JSON or a path to a JSON file."""
    s = s.strip()
    if s.startswith("{") or s.startswith("["):
        return json.loads(s)
    if not os.path.exists(s):
        raise InputError(f"no such file: {s}")
    with open(s) as fh:
        return json.load(fh)


def default_nodes():
    return int(os.environ.get("QUADLAB_NODES", numcheck.DEFAULT_NODES))


def emit(obj, out=None):
    text = json.dumps(obj, indent=2, default=_json_default)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _json_default(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, (np.floating, np.integer)):
        return float(v)
    raise TypeError(f"not serializable: {type(v)}")


def _problem_from_args(a, h_obj, bounded):
    h = RationalFn.from_json_obj(h_obj) if isinstance(h_obj, dict) \
        else RationalFn.from_json_obj({"num": h_obj, "den": [[1.0, 0.0]]})
    if a == 0:
        return lqd.LQDProblem(h, bounded)
    if a == 1:
        return classical.QuadSpec(h, bounded)
    return pqd.PQDProblem(a, h, bounded)


def _spec_weight(obj):
    return float(obj.get("a", 1.0))


def _verify_map(m, a, h, nodes):
    report = numcheck.verify_quadrature_identity(m, a, h, nodes=nodes)
    payload = {
        "maxRel": report.max_rel,
        "nodes": report.nodes,
        "orientation": report.orientation_used,
        "perTest": [
            {"test": label, "lhs": lhs, "rhs": rhs, "absErr": abs_err,
             "relErr": rel}
            for label, lhs, rhs, abs_err, rel in report.per_test
        ],
    }
    return report, payload


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(args):
    rep = classical.classify_one_point(parse_complex(args.alpha),
                                       parse_complex(args.w0))
    emit({"exists": rep.exists, "boundaryMargin": rep.boundary_margin,
          "regime": rep.regime, "tStar": rep.t_star, "cStar": rep.c_star},
         args.out)
    return EXIT_OK


def cmd_solve_direct(args):
    m = MapSpec.from_json_obj(load_json_arg(args.map))
    a = args.a if args.a is not None else \
        (1.0 if m.kind == "rational" else (0.0 if m.kind == "log" else m.a))
    if m.kind == "rational":
        q = classical.direct_problem(m)
        h, bounded = q.h, q.bounded
    elif m.kind == "power":
        h = pqd.direct_problem_power(m)
        bounded = m.orientation == INTERIOR
    else:
        h = lqd.direct_problem_log(m)
        bounded = m.orientation == INTERIOR
    code = EXIT_OK
    ver_payload = None
    if not args.no_verify:
        report, ver_payload = _verify_map(m, a, h, args.nodes)
        if not report.passed(VERIFY_TOL):
            code = EXIT_VERIFY
    emit({"a": a, "h": h.to_json_obj(), "bounded": bounded,
          "verification": ver_payload}, args.out)
    return code


def cmd_solve_inverse(args):
    a = args.a
    h_obj = load_json_arg(args.h)
    bounded = args.bounded
    problem = _problem_from_args(a, h_obj, bounded)
    w0 = parse_complex(args.w0) if args.w0 is not None else None
    c = args.c
    if a == 0:
        sol = lqd.inverse_problem_log(problem, w0=w0, c=c)
    elif a == 1:
        sol = classical.inverse_problem(problem, w0=w0, c=c)
    else:
        sol = pqd.inverse_problem_power(problem, w0=w0, c=c)
    code = EXIT_OK
    ver_payload = None
    if not args.no_verify:
        h = problem.h
        report, ver_payload = _verify_map(sol.spec, a, h, args.nodes)
        if not report.passed(VERIFY_TOL):
            code = EXIT_VERIFY
    emit({"map": sol.spec.to_json_obj(), "residual": sol.residual,
          "univalence": None if sol.univalence is None else sol.univalence.verdict,
          "warnings": sol.warnings, "verification": ver_payload}, args.out)
    return code


def cmd_verify(args):
    spec_obj = load_json_arg(args.spec)
    m = MapSpec.from_json_obj(load_json_arg(args.map))
    a = _spec_weight(spec_obj)
    h = RationalFn.from_json_obj(spec_obj["h"])
    report, payload = _verify_map(m, a, h, args.nodes)
    emit(payload, args.out)
    return EXIT_OK if report.passed(VERIFY_TOL) else EXIT_VERIFY


def cmd_render(args):
    m = MapSpec.from_json_obj(load_json_arg(args.map))
    curve = m.boundary_curve(args.nodes)
    fmt = args.format or _infer_format(args.out, "svg")
    if fmt == "csv":
        _write_csv(args.out, curve)
    elif fmt == "svg":
        uni = conformal.univalence_check(m)
        _write_svg(args.out, curve, bounded=(m.orientation == INTERIOR),
                   simple=uni.univalent or uni.verdict == "cusped")
    elif fmt == "json":
        emit({"theta": list(curve.theta),
              "w": [[v.real, v.imag] for v in curve.w]}, args.out)
    else:
        raise InputError(f"render cannot produce {fmt!r}")
    return EXIT_OK


@dataclass
class FamilyTrace:
    """Parameter sweep with per-step maps, verdicts and critical events."""

    parameter: str
    values: list = field(default_factory=list)
    specs: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    events: list = field(default_factory=list)

    def to_json_obj(self):
        return {"parameter": self.parameter, "values": self.values,
                "verdicts": self.verdicts,
                "maps": [s.to_json_obj() for s in self.specs],
                "criticalEvents": self.events}


def _sweep_solve(a, problem, c, w0, seed_sol=None):
    if a == 0:
        return lqd.inverse_problem_log(problem, w0=w0, c=c)
    if a == 1:
        return classical.inverse_problem(problem, w0=w0, c=c)
    return pqd.inverse_problem_power(problem, w0=w0, c=c)


def cmd_sweep(args):
    a = args.a
    h_obj = load_json_arg(args.h)
    problem = _problem_from_args(a, h_obj, args.bounded)
    lo, hi, steps = args.range
    if not (lo < hi and steps >= 1):
        raise InputError("range must satisfy lo < hi and steps >= 1")
    values = np.linspace(lo, hi, int(steps))
    trace = FamilyTrace(parameter=args.param)
    w0 = parse_complex(args.w0) if args.w0 is not None else None
    last_verdict = None
    for v in values:
        try:
            sol = _sweep_solve(a, problem, float(v), w0)
            verdict = sol.univalence.verdict if sol.univalence else "unknown"
            trace.values.append(float(v))
            trace.specs.append(sol.spec)
            trace.verdicts.append(verdict)
        except QuadlabError as exc:
            trace.values.append(float(v))
            trace.specs.append(None)
            trace.verdicts.append(f"failed:{type(exc).__name__}")
            verdict = "failed"
        if last_verdict is not None and verdict != last_verdict:
            trace.events.append({"between": [trace.values[-2], trace.values[-1]],
                                 "from": last_verdict, "to": verdict})
        last_verdict = verdict
    fmt = args.format or _infer_format(args.out, "json")
    if fmt == "json":
        emit(trace.to_json_obj(), args.out)
    elif fmt == "csv":
        lines = ["param,verdict"]
        lines += [f"{v},{verdict}" for v, verdict in
                  zip(trace.values, trace.verdicts)]
        _write_text(args.out, "\n".join(lines) + "\n")
    elif fmt == "svg":
        curves = [s.boundary_curve(args.nodes) for s in trace.specs if s is not None]
        _write_svg_multi(args.out, curves)
    else:
        raise InputError(f"sweep cannot produce {fmt!r}")
    return EXIT_OK


def cmd_dynamics(args):
    region = [float(x) for x in args.region.split(",")]
    if len(region) != 4:
        raise InputError("region must be x0,y0,x1,y1")
    if args.map == "teardrop":
        grid = schwarzdyn.escape_grid(schwarzdyn.teardrop_map(), region,
                                      args.res, args.max_iter)
    elif args.map == "exp":
        grid = schwarzdyn.antiholo_exp_julia(region, args.res, args.max_iter)
    else:
        m = MapSpec.from_json_obj(load_json_arg(args.map))
        grid = schwarzdyn.escape_grid(m, region, args.res, args.max_iter)
    out = args.out or "escape.png"
    if out.endswith(".ppm"):
        grid.to_ppm(out)
    else:
        grid.to_png(out)
    print(json.dumps({"escapeFraction": grid.escape_fraction(),
                      "maxIter": grid.max_iter, "out": out}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def _infer_format(out, default):
    if out:
        ext = os.path.splitext(out)[1].lstrip(".").lower()
        if ext:
            return ext
    return default


def _write_text(out, text):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(out, curve):
    lines = ["theta,re,im"]
    lines += [f"{t:.16g},{w.real:.16g},{w.imag:.16g}"
              for t, w in zip(curve.theta, curve.w)]
    _write_text(out, "\n".join(lines) + "\n")


def _svg_path(curve):
    pts = np.c_[curve.w.real, -curve.w.imag]
    d = "M " + " L ".join(f"{x:.6g} {y:.6g}" for x, y in pts) + " Z"
    return d


def _svg_frame(curves):
    allw = np.concatenate([c.w for c in curves])
    x0, x1 = float(allw.real.min()), float(allw.real.max())
    y0, y1 = float(-allw.imag.max()), float(-allw.imag.min())
    pad = 0.1 * max(x1 - x0, y1 - y0, 1e-9)
    return x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad


def _write_svg(out, curve, bounded=True, simple=True):
    x, y, w, h = _svg_frame([curve])
    fill = "#9ecae1" if bounded else "#fee0b6"
    rule = 'fill-rule="evenodd"' if simple else 'fill="none"'
    body = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x:.6g} {y:.6g} '
            f'{w:.6g} {h:.6g}">'
            f'<path d="{_svg_path(curve)}" fill="{fill}" {rule} '
            f'stroke="#333" stroke-width="{0.004 * max(w, h):.6g}"/></svg>\n')
    _write_text(out, body)


def _write_svg_multi(out, curves):
    if not curves:
        raise InputError("no curves to draw")
    x, y, w, h = _svg_frame(curves)
    paths = "".join(
        f'<path d="{_svg_path(c)}" fill="none" stroke="#1f77b4" '
        f'stroke-width="{0.004 * max(w, h):.6g}"/>' for c in curves)
    body = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x:.6g} {y:.6g} '
            f'{w:.6g} {h:.6g}">{paths}</svg>\n')
    _write_text(out, body)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(prog="quadlab",
                                 description="quadrature-domain toolbox")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--nodes", type=int, default=default_nodes())
        p.add_argument("--out")
        p.add_argument("--no-verify", action="store_true")

    p = sub.add_parser("classify", help="one-point existence classification")
    p.add_argument("--alpha", required=True)
    p.add_argument("--w0", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve-direct", help="quadrature function from a map")
    p.add_argument("--map", required=True)
    p.add_argument("--a", type=float)
    add_common(p)
    p.set_defaults(func=cmd_solve_direct)

    p = sub.add_parser("solve-inverse", help="map from a quadrature function")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--bounded", action="store_true")
    p.add_argument("--w0")
    p.add_argument("--c", type=float)
    add_common(p)
    p.set_defaults(func=cmd_solve_inverse)

    p = sub.add_parser("verify", help="quadrature-identity residual report")
    p.add_argument("--spec", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--nodes", type=int, default=default_nodes())
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="family sweep over a parameter")
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--h", required=True)
    p.add_argument("--param", choices=["c", "t"], default="c")
    p.add_argument("--range", type=lambda s: [float(x) for x in s.split(",")],
                   required=True, metavar="LO,HI,STEPS")
    p.add_argument("--bounded", action="store_true")
    p.add_argument("--w0")
    p.add_argument("--format", choices=["svg", "csv", "json"])
    p.add_argument("--nodes", type=int, default=default_nodes())
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dynamics", help="Schwarz-reflection escape grids")
    p.add_argument("--map", default="teardrop")
    p.add_argument("--region", default="-3,-3,3,3")
    p.add_argument("--res", type=int, default=800)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dynamics)

    p = sub.add_parser("render", help="boundary curve to svg/csv/json")
    p.add_argument("--map", required=True)
    p.add_argument("--format", choices=["svg", "csv", "json"])
    p.add_argument("--nodes", type=int, default=default_nodes())
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoConvergence as exc:
        print(f"solver failed to converge: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except QuadlabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV


if __name__ == "__main__":
    sys.exit(main())

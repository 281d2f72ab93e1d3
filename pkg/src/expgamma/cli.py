"""Command line front end: ``expgamma <verb> ...``.

Verbs: eval, verify, sweep, roots, limits, plotdata.  Exit status is 0 on
success, 1 when a property violation was found (the report is still
printed) and 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import gammaratio as gr
from . import hfamily as hf
from . import ineq
from . import specfun as sf
from . import suites
from .errors import ExpGammaError, InputError
from .monocheck import GridSpec

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise UsageError(f"--{name.replace('_', '-')} is required here")
    return v


def _load_input(args):
    path = _need(args, "input")
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("--input", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError("--input", f"{path} is not valid JSON (line {exc.lineno}: {exc.msg})") from None


def _ratio_spec(args):
    spec = gr.RatioSpec.from_json(_load_input(args))
    if args.rho is not None or args.theta is not None:
        spec = gr.RatioSpec(spec.lm, spec.rho if args.rho is None else args.rho,
                            spec.theta if args.theta is None else args.theta)
    return spec


def _matrix(args):
    return ineq.LambdaMatrix.from_json(_load_input(args))


def _tensor(args):
    return ineq.LambdaTensor.from_json(_load_input(args))


def _points(args):
    return np.asarray(_need(args, "t"), dtype=float)


def _k(args, default=0):
    return default if args.k is None else args.k


# name -> (needs, evaluator(args) -> value or array); values are evaluated at every --t
EVAL_FUNCTIONS = {
    "h_alpha": lambda a: hf.h_alpha(_need(a, "alpha"), _points(a)),
    "h_alpha_d1": lambda a: hf.h_alpha_derivs(_need(a, "alpha"), _points(a)).d1,
    "h_alpha_d2": lambda a: hf.h_alpha_derivs(_need(a, "alpha"), _points(a)).d2,
    "log_h_alpha_d2": lambda a: hf.log_h_alpha_d2(_need(a, "alpha"), _points(a)),
    "aux_H1": lambda a: hf.aux_H1_H2(_points(a))[0],
    "aux_H2": lambda a: hf.aux_H1_H2(_points(a))[1],
    "discriminant_D": lambda a: hf.discriminant_D(_points(a)),
    "series_D": lambda a: np.array([hf.series_D(t, a.terms) for t in _points(a)]),
    "logconc_H": lambda a: hf.logconc_H(_points(a)),
    "recip_expm1": lambda a: sf.recip_expm1(_points(a)),
    "ln_gamma": lambda a: sf.ln_gamma(_points(a)),
    "polygamma": lambda a: sf.polygamma(_k(a), _points(a)),
    "q_ln_gamma": lambda a: np.array([sf.q_ln_gamma(_need(a, "q"), t) for t in _points(a)]),
    "bernoulli": lambda a: sf.bernoulli_number(_k(a)),
    "stirling_theta": lambda a: gr.stirling_theta(_points(a)),
    "ln_F": lambda a: gr.ln_F(_points(a), _ratio_spec(a)),
    "ln_F_deriv": lambda a: gr.ln_F_deriv(_points(a), _ratio_spec(a), _k(a, 1)),
    "P": lambda a: gr.P_deriv(_points(a), _ratio_spec(a), _k(a)),
    "lnF_d1_sup": lambda a: gr.lnF_d1_sup(_ratio_spec(a)),
    "find_min_F": lambda a: gr.find_min_F(_ratio_spec(a)),
    "conjecture": lambda a: gr.conjecture_eval(_points(a), _conjecture_spec(a), _k(a)),
    "margin_sum_split": lambda a: ineq.margin_sum_split(_need(a, "x"), _need(a, "lambdas"), _need(a, "alpha"), a.rho),
    "margin_matrix": lambda a: ineq.margin_matrix(_need(a, "x"), _matrix(a), _need(a, "alpha"),
                                                  2.0 if a.rho is None else a.rho),
    "margin_tensor_2to1": lambda a: ineq.margin_tensor_2to1(_need(a, "x"), _tensor(a), _need(a, "alpha"),
                                                            3.0 if a.rho is None else a.rho),
    "margin_tensor_1to2": lambda a: ineq.margin_tensor_1to2(_need(a, "x"), _tensor(a), _need(a, "alpha"),
                                                            3.0 if a.rho is None else a.rho),
}


def _conjecture_spec(args):
    obj = _load_input(args)
    spec = gr.ConjectureSpec.from_json(obj)
    if args.variant is not None:
        spec = gr.ConjectureSpec(spec.lt, spec.rho, spec.theta, args.variant)
    return spec


def _fmt(v):
    return format(float(v), ".17g")


def _jsonable(v):
    if isinstance(v, ineq.Margin):
        return v.to_dict()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def _emit(out, payload, mode, human):
    if mode == "json":
        out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        out.write(human + "\n")


# ---------------------------------------------------------------------------
# verbs


def cmd_eval(args, out):
    if args.fn not in EVAL_FUNCTIONS:
        raise UsageError(f"unknown function {args.fn!r}; available: {', '.join(sorted(EVAL_FUNCTIONS))}")
    value = EVAL_FUNCTIONS[args.fn](args)
    payload = {"fn": args.fn, "value": _jsonable(value)}
    if args.t is not None:
        payload["t"] = list(args.t)
    if args.output == "csv":
        ts = args.t or [math.nan]
        vals = np.broadcast_to(np.asarray(value, dtype=float), (len(ts),))
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["t", args.fn])
        for t, v in zip(ts, vals):
            w.writerow([_fmt(t), _fmt(v)])
        return EXIT_OK
    if isinstance(value, ineq.Margin):
        human = "\n".join(f"{k} = {_fmt(v)}" for k, v in value.to_dict().items())
    elif np.ndim(value) == 0:
        human = _fmt(value)
    else:
        human = "\n".join(_fmt(v) for v in np.ravel(value))
    _emit(out, payload, args.output, human)
    return EXIT_OK


def _suite_params(args):
    params = {}
    for name in ("alpha", "seed", "samples", "m", "n", "count", "points", "eps"):
        v = getattr(args, name, None)
        if v is not None:
            params[name] = v
    if args.alphas:
        params["alphas"] = tuple(args.alphas)
    return params


def cmd_verify(args, out):
    if args.list:
        for name in suites.suite_names():
            out.write(f"{name:28s} {suites.SUITES[name].summary}\n")
        return EXIT_OK
    names = suites.suite_names() if args.suite == "all" else [_need(args, "suite")]
    for name in names:
        if name not in suites.SUITES:
            raise UsageError(f"unknown suite {name!r}; available: {', '.join(suites.suite_names())}")
    params = _suite_params(args)
    results = [suites.run_suite(n, **params) for n in names]
    payload = {"suites": [r.to_dict() for r in results], "passed": all(r.passed for r in results)}
    _emit(out, payload, args.output, "\n".join(str(r) for r in results))
    return EXIT_OK if payload["passed"] else EXIT_VIOLATION


def _dims(args):
    if args.dims:
        return tuple(args.dims)
    rank = ineq.INEQUALITIES[args.ineq][0]
    if rank == 1:
        return (_need(args, "n"),)
    if rank == 2:
        return (_need(args, "m"), _need(args, "n"))
    return (_need(args, "l"), _need(args, "m"), _need(args, "n"))


def cmd_sweep(args, out):
    cfg = ineq.SweepConfig(
        ineq_id=args.ineq,
        dims=_dims(args),
        samples=args.samples,
        seed=0 if args.seed is None else args.seed,
        alpha=1.0 if args.alpha is None else args.alpha,
        rho=args.rho,
        lambda_range=tuple(args.lambda_range),
        x_range=tuple(args.x_range),
        frontier_alphas=tuple(args.frontier_alphas or ()),
        frontier_rhos=tuple(args.frontier_rhos or ()),
    )
    rep = ineq.sweep(cfg)
    if args.output == "json":
        out.write(rep.to_json() + "\n")
    else:
        lines = [
            f"{cfg.ineq_id} dims={cfg.dims} alpha={cfg.alpha:g} rho={cfg.effective_rho:g} "
            f"samples={rep.samples_run} seed={cfg.seed}",
            f"violations: {len(rep.violations)}",
            f"min relative margin: {_fmt(rep.min_relative_margin)} (sample {rep.argmin_index})",
        ]
        for v in rep.violations[:10]:
            lines.append(f"  sample {v['index']}: x={_fmt(v['x'])} relative margin {_fmt(v['margin']['relative_margin'])}")
        for p in rep.frontier_points:
            lines.append(f"  frontier alpha={p['alpha']:g} rho={p['rho']:g}: worst {_fmt(p['worst_relative_margin'])}, "
                         f"flagged {p['flagged']}")
        out.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.passed else EXIT_VIOLATION


def cmd_roots(args, out):
    if args.kind == "minimum":
        spec = _ratio_spec(args)
        t = gr.find_min_F(spec)
        payload = {"kind": "minimum", "t_star": t, "ln_F": float(gr.ln_F(t, spec))}
        _emit(out, payload, args.output, f"minimum of F at t* = {_fmt(t)}, ln F(t*) = {_fmt(payload['ln_F'])}")
        return EXIT_OK
    alpha = _need(args, "alpha")
    grid = GridSpec.default(points=args.points or 10_000)
    if args.kind == "extremum":
        t = hf.extremum_point(alpha, grid)
        payload = {"kind": "extremum", "alpha": alpha, "t_star": t}
        human = "none (h_alpha increasing)" if t is None else f"maximum at t* = {_fmt(t)}"
        _emit(out, payload, args.output, human)
        return EXIT_OK
    try:
        rep = hf.inflection_points(alpha, grid)
    except ExpGammaError as exc:
        if not hasattr(exc, "witnesses"):
            raise
        payload = {"kind": "inflection", "alpha": alpha, "error": str(exc), "brackets": exc.witnesses}
        _emit(out, payload, args.output, f"regime mismatch: {exc}")
        return EXIT_VIOLATION
    human = f"alpha={alpha:g}: regime {rep.regime}, {len(rep.roots)} root(s)" + "".join(
        f"\n  t = {_fmt(r)}" for r in rep.roots)
    _emit(out, {"kind": "inflection", **rep.to_dict()}, args.output, human)
    return EXIT_OK


def cmd_limits(args, out):
    if args.input is not None:
        spec = _ratio_spec(args)
        w, c = spec.weights()
        s1 = math.fsum(c * w ** (spec.theta + 1))
        payload = {
            "d1_at_0+": -sf.EULER_GAMMA * s1,
            "d2_at_0+": gr.lnF_d2_sup(spec),
            "d1(1e-9)": gr.ln_F_deriv(1e-9, spec, 1),
            "d2(1e-9)": gr.ln_F_deriv(1e-9, spec, 2),
            "d1(1e7)": gr.ln_F_deriv(1e7, spec, 1),
        }
        if spec.rho <= 2 and spec.theta >= 0:
            lo, hi = gr.lnF_d1_range(spec)
            payload["d1_range"] = [lo, "unbounded" if hi is gr.UNBOUNDED else hi]
    else:
        alpha = _need(args, "alpha")
        expected_inf = math.inf if alpha > 0 else 1.0 if alpha == 0 else 0.0
        payload = {
            "alpha": alpha,
            "limit_at_0+": 0.0,
            "limit_at_inf": "inf" if expected_inf == math.inf else expected_inf,
            "h(1e-6)": hf.h_alpha(alpha, 1e-6),
            "h(1e6)": hf.h_alpha(alpha, 1e6),
        }
    human = "\n".join(f"{k} = {v if isinstance(v, (str, list)) else _fmt(v)}" for k, v in payload.items())
    _emit(out, payload, args.output, human)
    return EXIT_OK


def _plot_columns(args, t):
    fn = args.fn
    if fn == "h_alpha":
        a = _need(args, "alpha")
        d = hf.h_alpha_derivs(a, t)
        return {"h_alpha": hf.h_alpha(a, t), "d1": d.d1, "d2": d.d2}
    if fn == "log_h_alpha_d2":
        return {fn: hf.log_h_alpha_d2(_need(args, "alpha"), t)}
    if fn == "aux_H1_H2":
        h1, h2 = hf.aux_H1_H2(t)
        return {"H1": h1, "H2": h2}
    if fn == "logconc_H":
        return {fn: hf.logconc_H(t)}
    if fn == "stirling_theta":
        return {fn: gr.stirling_theta(t)}
    if fn == "ln_F":
        spec = _ratio_spec(args)
        cols = {"ln_F": gr.ln_F(t, spec)}
        for k in range(1, (args.derivs or 2) + 1):
            cols[f"d{k}"] = gr.ln_F_deriv(t, spec, k)
        return cols
    if fn == "P":
        spec = _ratio_spec(args)
        return {("P" if k == 0 else f"P_d{k}"): gr.P_deriv(t, spec, k) for k in range((args.derivs or 0) + 1)}
    if fn == "polygamma":
        return {f"psi{_k(args)}": sf.polygamma(_k(args), t)}
    raise UsageError(f"unknown plot function {fn!r}; available: h_alpha, log_h_alpha_d2, aux_H1_H2, "
                     "logconc_H, stirling_theta, ln_F, P, polygamma")


def cmd_plotdata(args, out):
    grid = GridSpec(args.lo, args.hi, args.points, args.spacing)
    t = grid.nodes()
    cols = _plot_columns(args, t)
    if args.output == "json":
        payload = {"t": t.tolist(), **{k: np.asarray(v, dtype=float).tolist() for k, v in cols.items()}}
        _emit(out, payload, "json", "")
        return EXIT_OK
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", *cols])
    arrays = [np.asarray(v, dtype=float) for v in cols.values()]
    for i, ti in enumerate(t):
        w.writerow([_fmt(ti), *(_fmt(a[i]) for a in arrays)])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="JSON spec file (lambda matrix / tensor / ratio spec)")
    common.add_argument("--output", choices=("human", "json", "csv"),
                        help="default: csv for plotdata, human otherwise")
    common.add_argument("--seed", type=int)
    common.add_argument("--alpha", type=float)
    common.add_argument("--rho", type=float)
    common.add_argument("--theta", type=float)

    p = argparse.ArgumentParser(prog="expgamma", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate one function")
    e.add_argument("--fn", required=True)
    e.add_argument("--t", type=float, nargs="+", help="evaluation point(s)")
    e.add_argument("--x", type=float)
    e.add_argument("--k", type=int, help="derivative / polygamma order or Bernoulli index")
    e.add_argument("--q", type=float)
    e.add_argument("--terms", type=int, default=30)
    e.add_argument("--lambdas", type=float, nargs="+")
    e.add_argument("--variant", choices=("L1", "L2", "R1", "R2"))

    v = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    v.add_argument("--suite", help="suite name or 'all'")
    v.add_argument("--list", action="store_true", help="list suites and exit")
    v.add_argument("--alphas", type=float, nargs="+")
    v.add_argument("--samples", type=int)
    v.add_argument("--count", type=int)
    v.add_argument("--points", type=int)
    v.add_argument("--eps", type=float)
    v.add_argument("--m", type=int)
    v.add_argument("--n", type=int)

    s = sub.add_parser("sweep", parents=[common], help="randomized inequality sweep")
    s.add_argument("--ineq", choices=sorted(ineq.INEQUALITIES), default="matrix")
    s.add_argument("--dims", type=int, nargs="+")
    s.add_argument("--l", type=int)
    s.add_argument("--m", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--lambda-range", type=float, nargs=2, default=(1e-3, 1e3))
    s.add_argument("--x-range", type=float, nargs=2, default=(1e-3, 1e3))
    s.add_argument("--frontier-alphas", type=float, nargs="+")
    s.add_argument("--frontier-rhos", type=float, nargs="+")

    r = sub.add_parser("roots", parents=[common], help="inflection points, maximum of h_alpha, minimum of F")
    r.add_argument("--kind", choices=("inflection", "extremum", "minimum"), default="inflection")
    r.add_argument("--points", type=int)

    sub.add_parser("limits", parents=[common], help="boundary limits of h_alpha (--alpha) or ln F (--input)")

    d = sub.add_parser("plotdata", parents=[common], help="tabulate a function on a grid")
    d.add_argument("--fn", required=True)
    d.add_argument("--lo", type=float, default=1e-2)
    d.add_argument("--hi", type=float, default=1e2)
    d.add_argument("--points", type=int, default=200)
    d.add_argument("--spacing", choices=("log", "linear"), default="log")
    d.add_argument("--k", type=int)
    d.add_argument("--derivs", type=int, help="number of derivative columns (ln_F, P)")
    return p


VERBS = {
    "eval": cmd_eval,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "roots": cmd_roots,
    "limits": cmd_limits,
    "plotdata": cmd_plotdata,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    if args.output is None:
        args.output = "csv" if args.verb == "plotdata" else "human"
    try:
        return VERBS[args.verb](args, out)
    except (UsageError, InputError) as exc:
        print(f"expgamma {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ExpGammaError, ValueError) as exc:
        print(f"expgamma {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run(argv) -> tuple[int, str]:
    """Run the CLI in-process; returns (exit status, captured stdout)."""
    buf = io.StringIO()
    code = main(argv, buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

    inspectruin transform --inspection erlang:3,3 --alpha 0.1:1:0.1 --beta 0.25
    inspectruin gamma --inspection exp:1
    inspectruin simulate --inspection lognormal:1,1 --u 5,10,20,40 --runs 10000
    inspectruin fit --mean 1 --variance 0.25:3:0.25
    inspectruin figure --figure 3 --out figs

Every CSV starts with a comment line carrying the sha256 digest of the
resolved run specification and the specification itself, then a header row.
Exit codes: 0 ok, 2 invalid specification, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys

from . import __version__
from .asymptotics import gamma as gamma_of
from .errors import InspectRuinError, ModelError
from .laws import Erlang, Exponential, HyperErlang, Lognormal, parse_law
from .levy import BASE_MODEL, LevyModel
from .montecarlo import SimConfig, crude_killed, is_bankruptcy
from .phasefit import fit_two_moment
from .transforms import pi

COMMANDS = ("transform", "gamma", "simulate", "fit", "figure")
DESK = {"variance": "0.25:3:0.25", "runs": 10_000}
FULL = {"variance": "0.02:3:0.02", "runs": 100_000}
DEFAULT_U = "5,10,20,40"


class SpecError(ModelError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


# -- parsing --------------------------------------------------------------------------

def parse_grid(text) -> list:
    """``start:stop:step`` (stop included), a comma list, or a single number."""
    if isinstance(text, (int, float)):
        return [float(text)]
    if isinstance(text, list):
        return [float(x) for x in text]
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} is not start:stop:step")
        start, stop, step = (float(x) for x in parts)
        if not step > 0 or stop < start:
            raise ValueError(f"grid {text!r} needs step > 0 and stop >= start")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        # rounding keeps e.g. 0.1 * 3 from printing as 0.30000000000000004
        return [float(round(start + i * step, 12)) for i in range(n)]
    return [float(x) for x in text.split(",") if x.strip()]


def parse_model(text) -> LevyModel:
    if isinstance(text, (list, tuple)):
        vals = [float(x) for x in text]
    else:
        vals = [float(x) for x in str(text).split(",")]
    if len(vals) != 4:
        raise ValueError("model needs sigma2,r,lambda,mu")
    return LevyModel(*vals)


def _with_rate(law, omega):
    if isinstance(law, Exponential):
        return Exponential(omega)
    if isinstance(law, Erlang):
        return Erlang(law.k, omega)
    if isinstance(law, HyperErlang):
        return HyperErlang(law.k, law.p, omega)
    raise ModelError(f"--omega cannot set the rate of a {law.family} law")


class _Parser(argparse.ArgumentParser):
    """Usage errors become the same JSON record as other spec errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(json.dumps({"error": "spec", "messages": [message]}) + "\n")
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="inspectruin", description=__doc__.split("\n")[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with any of the options below")
        p.add_argument("--model", help="sigma2,r,lambda,mu (default: 0.02,1.2,2,2)")
        p.add_argument("--out", help="output directory (default: stdout, or . for figure)")
        if name in ("transform", "gamma", "simulate"):
            p.add_argument("--inspection", help="family:params, e.g. erlang:3,3")
        if name in ("transform", "gamma"):
            p.add_argument("--omega", help="grid of inspection rates replacing the law's rate")
        if name in ("transform", "simulate"):
            p.add_argument("--alpha", help="grid")
            p.add_argument("--beta", help="grid")
        if name in ("simulate", "figure"):
            p.add_argument("--u", help="grid of initial surplus levels")
            p.add_argument("--runs", type=int)
            p.add_argument("--seed", type=int)
            p.add_argument("--paper-scale", action="store_true", default=None,
                           help="fine grid (step 0.02) and 1e5 runs")
        if name == "simulate":
            p.add_argument("--mode", choices=("is", "crude-killed"))
        if name in ("fit", "figure"):
            p.add_argument("--mean", help="mean of the inspection law (default 1)")
            p.add_argument("--variance", help="grid")
        if name == "figure":
            p.add_argument("--figure", type=int, choices=(1, 2, 3))
    return ap


def resolve(args: argparse.Namespace) -> dict:
    """Merge config file and flags into a plain, JSON-serialisable run spec."""
    raw = {}
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except (OSError, ValueError) as exc:
            raise SpecError([f"config: {exc}"]) from None
        if not isinstance(raw, dict):
            raise SpecError(["config: top level must be an object"])
    for key, val in vars(args).items():
        if key not in ("config", "command") and val is not None:
            raw[key.replace("-", "_")] = val
    cmd = args.command
    paper_scale = bool(raw.get("paper_scale", False))
    scale = FULL if paper_scale else DESK
    spec = {"command": cmd, "version": __version__}
    problems = []

    def take(key, fn, default=None):
        val = raw.get(key, default)
        if val is None:
            return None
        try:
            return fn(val)
        except (ValueError, TypeError, ModelError) as exc:
            problems.append(f"{key}: {exc}")
            return None

    model = None
    if cmd != "fit":
        model = take("model", parse_model, list(BASE_MODEL.as_tuple()))
    if model is not None:
        spec["model"] = list(model.as_tuple())
    if cmd in ("transform", "gamma", "simulate"):
        law = take("inspection", parse_law, "exp:1")
        if law is not None:
            spec["inspection"] = law.spec()
    if cmd in ("transform", "gamma"):
        spec["omega"] = take("omega", parse_grid)
    if cmd == "transform":
        spec["alpha"] = take("alpha", parse_grid, "0.4")
        spec["beta"] = take("beta", parse_grid, "0.25")
    if cmd == "simulate":
        spec["mode"] = raw.get("mode", "is")
        if spec["mode"] not in ("is", "crude-killed"):
            problems.append(f"mode: unknown mode {spec['mode']!r}")
        if spec["mode"] == "crude-killed":
            spec["alpha"] = take("alpha", parse_grid, "0.4")
            spec["beta"] = take("beta", parse_grid, "0.25")
            spec["u"] = None
        else:
            spec["u"] = take("u", parse_grid, DEFAULT_U)
    if cmd == "figure":
        spec["figure"] = take("figure", int, 3)
        if spec["figure"] not in (1, 2, 3, None):
            problems.append("figure: must be 1, 2 or 3")
        if spec["figure"] in (1, 2):
            spec["u"] = take("u", parse_grid, DEFAULT_U)
    if cmd in ("fit", "figure"):
        spec["mean"] = take("mean", float, 1.0)
        spec["variance"] = take("variance", parse_grid, scale["variance"])
    if cmd in ("simulate", "figure"):
        spec["runs"] = take("runs", int, scale["runs"])
        spec["seed"] = take("seed", int, 20240101)
        spec["paper_scale"] = paper_scale
        if spec["runs"] is not None and spec["runs"] < 2:
            problems.append("runs: must be >= 2")
        if spec["seed"] is not None and not 0 <= spec["seed"] < 2 ** 64:
            problems.append("seed: must be a 64-bit unsigned integer")
    for key in ("alpha", "beta", "omega", "variance", "u"):
        vals = spec.get(key)
        if vals is not None:
            if not vals:
                problems.append(f"{key}: empty grid")
            elif key == "u" and any(not (v >= 0 and math.isfinite(v)) for v in vals):
                problems.append("u: values must be finite and >= 0")
            elif key != "u" and any(not v > 0 for v in vals):
                problems.append(f"{key}: values must be > 0")
    if spec.get("mean") is not None and not spec["mean"] > 0:
        problems.append("mean: must be > 0")
    if problems:
        raise SpecError(problems)
    spec["out"] = raw.get("out")
    return {k: v for k, v in spec.items() if v is not None or k == "out"}


def digest(spec: dict) -> str:
    body = {k: v for k, v in spec.items() if k != "out"}
    return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


# -- output ---------------------------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def render(spec: dict, header, rows) -> str:
    buf = io.StringIO()
    body = {k: v for k, v in spec.items() if k != "out"}
    buf.write(f"# digest={digest(spec)} spec={json.dumps(body, sort_keys=True)}\r\n")
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _emit(spec, name, header, rows, written):
    text = render(spec, header, rows)
    out = spec.get("out")
    if out is None:
        sys.stdout.write(text)
        return
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    written.append(path)


# -- commands -----------------------------------------------------------------------------

def _laws_over_omega(spec):
    law = parse_law(spec["inspection"])
    omegas = spec.get("omega")
    if omegas is None:
        return [law]
    return [_with_rate(law, w) for w in omegas]


def _canonical(law):
    """Single-phase laws are evaluated through the exponential formulas."""
    if isinstance(law, Erlang) and law.k == 1:
        return Exponential(law.rate)
    if isinstance(law, HyperErlang) and tuple(law.reduced()[0]) == (1,):
        return Exponential(law.rate)
    return law


def cmd_transform(spec, written, failures):
    model = LevyModel(*spec["model"])
    rows = []
    for law in _laws_over_omega(spec):
        for a in spec["alpha"]:
            for b in spec["beta"]:
                ev = pi(model, a, b, _canonical(law))
                rows.append([law.spec(), a, b, float(ev.value), float(ev.rho), float(ev.condition)])
    _emit(spec, f"transform_{parse_law(spec['inspection']).family}.csv",
          ["inspection", "alpha", "beta", "pi", "rho", "condition"], rows, written)


def cmd_gamma(spec, written, failures):
    model = LevyModel(*spec["model"])
    rows = []
    for law in _laws_over_omega(spec):
        res = gamma_of(model, law)
        rows.append([law.spec(), law.family, res.theta_star, res.gamma, float(res.condition)])
    _emit(spec, f"gamma_{parse_law(spec['inspection']).family}.csv",
          ["inspection", "family", "theta_star", "gamma", "condition"], rows, written)


def cmd_simulate(spec, written, failures):
    model = LevyModel(*spec["model"])
    law = parse_law(spec["inspection"])
    rows = []
    if spec["mode"] == "crude-killed":
        for a in spec["alpha"]:
            for b in spec["beta"]:
                cfg = SimConfig(model, law, 0.0, spec["runs"], spec["seed"], "crude-killed", a, b)
                est = crude_killed(cfg)
                rows.append([a, b, est.estimate, est.std_err, est.runs, est.capped])
        header = ["alpha", "beta", "estimate", "std_err", "runs", "capped"]
    else:
        for u in spec["u"]:
            est = is_bankruptcy(SimConfig(model, law, u, spec["runs"], spec["seed"]))
            rows.append([u, est.p_hat, est.std_err, est.gamma_u,
                         est.std_err * math.exp(est.theta_star * u), est.max_weight, est.runs])
        header = ["u", "p_hat", "std_err", "gamma_u", "gamma_u_std_err", "max_weight", "runs"]
    _emit(spec, f"simulate_{law.family}.csv", header, rows, written)


def _fit_row(mean, v):
    fit = fit_two_moment(mean, v)
    law = fit.result
    return fit, [mean, v, fit.cv2, fit.branch, law.spec(), law.mean(), law.variance()]


def cmd_fit(spec, written, failures):
    rows = [_fit_row(spec["mean"], v)[1] for v in spec["variance"]]
    _emit(spec, "fit.csv", ["mean", "variance", "cv2", "branch", "law", "fitted_mean",
                            "fitted_variance"], rows, written)


def cmd_figure(spec, written, failures):
    model = LevyModel(*spec["model"])
    fig = spec["figure"]
    mean = spec["mean"]
    if fig == 3:
        rows = []
        for v in spec["variance"]:
            try:
                fit = fit_two_moment(mean, v)
                res = gamma_of(model, fit.result)
                rows.append([v, fit.branch, fit.result.spec(), res.gamma])
            except InspectRuinError as exc:
                failures.append({"figure": 3, "variance": v, "error": type(exc).__name__,
                                 "message": str(exc)})
        _emit(spec, "fig3_fit_inf.csv", ["variance", "branch", "law", "gamma"], rows, written)
        _plot_script(spec, written)
        return
    family = "lognormal" if fig == 1 else "fit"
    for u in spec["u"]:
        rows = []
        for v in spec["variance"]:
            law = Lognormal(mean, v) if fig == 1 else fit_two_moment(mean, v).result
            try:
                est = is_bankruptcy(SimConfig(model, law, u, spec["runs"], spec["seed"]))
                rows.append([v, law.spec(), est.gamma_u, est.std_err * math.exp(est.theta_star * u),
                             est.runs])
            except InspectRuinError as exc:
                failures.append({"figure": fig, "u": u, "variance": v,
                                 "error": type(exc).__name__, "message": str(exc)})
        _emit(spec, f"fig{fig}_{family}_{fmt(u)}.csv",
              ["variance", "law", "gamma_u", "std_err", "runs"], rows, written)
    _plot_script(spec, written)


def _plot_script(spec, written):
    out = spec.get("out")
    if out is None:
        return
    fig = spec["figure"]
    files = [os.path.basename(p) for p in written if os.path.basename(p).startswith(f"fig{fig}_")]
    lines = ["# gnuplot script", "set datafile separator ','", "set key outside",
             "set xlabel 'Var Omega'", "set ylabel 'gamma'",
             "set terminal pngcairo size 900,600", f"set output 'fig{fig}.png'"]
    plots = []
    for name in files:
        if fig == 3:
            plots.append(f"'{name}' every ::1 using 1:4 with linespoints title '{name}'")
        else:
            plots.append(f"'{name}' every ::1 using 1:3:4 with yerrorlines title '{name}'")
    if plots:
        lines.append("plot " + ", \\\n     ".join(plots))
    path = os.path.join(out, f"fig{fig}.gp")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    written.append(path)


HANDLERS = {"transform": cmd_transform, "gamma": cmd_gamma, "simulate": cmd_simulate,
            "fit": cmd_fit, "figure": cmd_figure}


def _error(kind, messages, code):
    sys.stderr.write(json.dumps({"error": kind, "messages": messages}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = resolve(args)
    except SpecError as exc:
        return _error("spec", exc.problems, 2)
    except ModelError as exc:
        return _error("spec", [str(exc)], 2)
    if args.command == "figure" and spec.get("out") is None:
        spec["out"] = "."
    written, failures = [], []
    try:
        HANDLERS[args.command](spec, written, failures)
    except ModelError as exc:
        return _error("spec", [str(exc)], 2)
    except (InspectRuinError, ArithmeticError, ValueError) as exc:
        return _error("numerical", [f"{type(exc).__name__}: {exc}"], 3)
    if failures:
        out = spec.get("out") or "."
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "failures.json"), "w") as fh:
            json.dump({"digest": digest(spec), "failures": failures}, fh, indent=1, sort_keys=True)
        return _error("numerical", [f"{len(failures)} grid point(s) failed; see failures.json"], 3)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

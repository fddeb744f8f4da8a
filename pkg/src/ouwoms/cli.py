"""Command-line interface.

One subcommand produces one CSV artifact (plus, optionally, one rendered
figure next to it via --fig):

  sample   walk batch                -> replicate,exit_time,exit_side,n_steps,x_final
  euler    Euler baseline batch      -> same columns
  steps    eps sweep                 -> step-count scaling table
  compare  walk vs Euler reference   -> KS, sandwich audit, wall-clock ratio
  bound    error-bound curves        -> theta,eps,xi table
  gof      spheroid sampler KS test  -> goodness-of-fit summary

Configuration is a flat JSON object; every field is also a flag, and
flags override the file.  Seeds are always explicit: sampling commands
refuse to run without one.  Validation failures exit nonzero after
printing a single machine-parsable line ``error: <field>: <constraint>``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from functools import partial
from pathlib import Path

import numpy as np

from . import analysis, euler, spheroid, walk
from .ou import ExitProblem, OUParams, reduce_mu
from .rng import Stream, derive_key

_PROBLEM_DEFAULTS = {"mu": 0.0, "gamma_shrink": 1e-6}
_RUN_DEFAULTS = {"n_samples": 10000, "max_steps": walk.DEFAULT_MAX_STEPS,
                 "parallelism": 1}
_FLOAT_FIELDS = ("theta", "sigma", "mu", "a", "b", "x0", "eps", "gamma_shrink")
_INT_FIELDS = ("n_samples", "seed", "max_steps", "parallelism")
_ALL_FIELDS = _FLOAT_FIELDS + _INT_FIELDS


def load_config(path: str) -> dict:
    """Flat JSON configuration; unknown fields are rejected."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"config: cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config: {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError("config: top-level JSON object required")
    for key in raw:
        if key not in _ALL_FIELDS:
            raise ValueError(f"{key}: unknown configuration field")
    return raw


def _coerce(cfg: dict) -> dict:
    out = {}
    for key, value in cfg.items():
        kind = int if key in _INT_FIELDS else float
        try:
            if kind is int and not float(value).is_integer():
                raise ValueError
            out[key] = kind(value)
        except (TypeError, ValueError):
            raise ValueError(f"{key}: must be {'an integer' if kind is int else 'a number'}")
    return out


def parse_config(args: argparse.Namespace,
                 require: tuple[str, ...] = ()) -> dict:
    """Merge config file and flags into one validated settings dict.

    Flags override file values; problem invariants are checked when the
    problem is built.  ``require`` lists run settings that must be
    present (e.g. seed for sampling commands).
    """
    cfg = dict(_PROBLEM_DEFAULTS)
    cfg.update(_RUN_DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(_coerce(load_config(args.config)))
    for field in _ALL_FIELDS:
        value = getattr(args, field, None)
        if value is not None:
            cfg[field] = value
    cfg = _coerce(cfg)
    for field in ("theta", "sigma", "a", "b", "x0", "eps") + tuple(require):
        if field not in cfg:
            raise ValueError(f"{field}: required")
    if "parallelism" in cfg and cfg["parallelism"] < 1:
        raise ValueError("parallelism: parallelism >= 1")
    return cfg


def build_problem(cfg: dict) -> ExitProblem:
    params = OUParams(theta=cfg["theta"], sigma=cfg["sigma"], mu=cfg["mu"])
    return ExitProblem(params=params, a=cfg["a"], b=cfg["b"], x0=cfg["x0"],
                       eps=cfg["eps"], gamma_shrink=cfg["gamma_shrink"])


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(path, header: str, rows) -> None:
    lines = [header]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ValueError(f"out: cannot write {path}: {exc}") from exc


def emit_samples_csv(outcomes, path, mu_shift: float = 0.0) -> None:
    """Write a batch as CSV, rows ordered by replicate index.

    Floats use shortest round-trip decimals, so equal runs give byte
    identical files.  ``mu_shift`` moves reported positions back to the
    caller's original coordinates after a centering reduction.
    """
    if not outcomes:
        raise ValueError("outcomes: nonempty batch required")
    rows = ((i, o.t_eps, o.side.value, o.n_steps, o.x_final + mu_shift)
            for i, o in enumerate(outcomes))
    _write_rows(path, "replicate,exit_time,exit_side,n_steps,x_final", rows)


def _parse_float_list(text: str, field: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"{field}: comma-separated numbers required")
    if not values:
        raise ValueError(f"{field}: at least one value required")
    return values


def _cmd_sample(args) -> int:
    cfg = parse_config(args, require=("seed",))
    problem = build_problem(cfg)
    centered = reduce_mu(problem)
    outcomes = walk.run_batch(centered, cfg["n_samples"], cfg["seed"],
                              parallelism=cfg["parallelism"],
                              max_steps=cfg["max_steps"])
    emit_samples_csv(outcomes, args.out, mu_shift=problem.params.mu)
    if args.fig:
        from . import report
        report.exit_time_histogram([o.t_eps for o in outcomes], args.fig)
    return 0


def _cmd_euler(args) -> int:
    cfg = parse_config(args, require=("seed",))
    problem = build_problem(cfg)
    outcomes = euler.euler_batch(problem, args.h, cfg["n_samples"],
                                 cfg["seed"], bridge=args.bridge,
                                 parallelism=cfg["parallelism"])
    emit_samples_csv(outcomes, args.out)
    if args.fig:
        from . import report
        report.exit_time_histogram([o.t_eps for o in outcomes], args.fig,
                                   title="Euler exit times")
    return 0


def _cmd_steps(args) -> int:
    cfg = parse_config(args, require=("seed",))
    problem = build_problem(cfg)
    centered = reduce_mu(problem)
    sweep = _parse_float_list(args.eps_sweep, "eps-sweep")
    runs = {}
    for k, eps in enumerate(sweep):
        if not 0.0 < eps < 0.5 * (centered.b - centered.a):
            raise ValueError("eps-sweep: 0 < eps < (b - a) / 2")
        prob_k = ExitProblem(params=centered.params, a=centered.a,
                             b=centered.b, x0=centered.x0, eps=eps,
                             gamma_shrink=centered.gamma_shrink)
        runs[eps] = walk.run_batch(prob_k, cfg["n_samples"],
                                   derive_key(cfg["seed"], k),
                                   parallelism=cfg["parallelism"],
                                   max_steps=cfg["max_steps"])
    rows = analysis.step_scaling_summary(runs)
    _write_rows(args.out,
                "eps,n_runs,mean_steps,stderr_steps,steps_per_abs_log_eps",
                ((r.eps, r.n_runs, r.mean_steps, r.stderr_steps,
                  r.steps_per_abs_log_eps) for r in rows))
    if args.fig:
        from . import report
        report.step_scaling_curve(rows, args.fig)
    return 0


def _cmd_compare(args) -> int:
    cfg = parse_config(args, require=("seed",))
    problem = build_problem(cfg)
    centered = reduce_mu(problem)
    n = cfg["n_samples"]
    # decorrelated engine seeds derived from the one master seed
    woms_seed = derive_key(cfg["seed"], 0)
    euler_seed = derive_key(cfg["seed"], 1)

    t0 = time.perf_counter()
    woms_out = walk.run_batch_arrays(centered, n, woms_seed,
                                     parallelism=cfg["parallelism"],
                                     max_steps=cfg["max_steps"])
    woms_seconds = time.perf_counter() - t0

    t0 = time.perf_counter()
    euler_out = euler.euler_batch_arrays(problem, args.h, n, euler_seed,
                                         bridge=True,
                                         parallelism=cfg["parallelism"])
    euler_seconds = time.perf_counter() - t0

    woms_times = woms_out.t_eps
    euler_times = euler_out.t_eps
    f_eps = analysis.ecdf(woms_times)
    f_ref = analysis.ecdf(euler_times)
    report_sw = analysis.sandwich_check(
        f_ref, f_eps, eps=centered.eps, gamma_exp=args.gamma_exp,
        params=centered.params, interval=(centered.a, centered.b),
        rho=args.rho)
    ks = analysis.ks_distance(f_ref, f_eps)
    _write_rows(args.out,
                "n_samples,eps,h,rho,gamma_exp,xi,delta,ks_distance,"
                "lower_violations,upper_violations,max_violation_magnitude,"
                "woms_mean,euler_mean,woms_seconds,euler_seconds,speedup",
                [(n, centered.eps, args.h, report_sw.rho, args.gamma_exp,
                  report_sw.xi, report_sw.delta, ks,
                  report_sw.lower_violations, report_sw.upper_violations,
                  report_sw.max_violation_magnitude,
                  float(np.mean(woms_times)), float(np.mean(euler_times)),
                  woms_seconds, euler_seconds, euler_seconds / woms_seconds)])
    if args.fig:
        from . import report
        report.ecdf_overlay({"walk": woms_times, "euler": euler_times},
                            args.fig)
    return 0


def _cmd_bound(args) -> int:
    thetas = _parse_float_list(args.theta_list, "theta-list")
    if not args.eps_min > 0.0:
        raise ValueError("eps-min: eps-min > 0")
    if not args.eps_max > args.eps_min:
        raise ValueError("eps-max: eps-max > eps-min")
    if args.eps_points < 2:
        raise ValueError("eps-points: eps-points >= 2")
    if not args.a < args.b:
        raise ValueError("a: a < b")
    eps_grid = np.logspace(math.log10(args.eps_min), math.log10(args.eps_max),
                           args.eps_points)
    rows = []
    curves = {}
    for theta in thetas:
        params = OUParams(theta=theta, sigma=args.sigma)
        xi = [analysis.xi_bound(float(e), args.gamma_exp, params,
                                (args.a, args.b)) for e in eps_grid]
        curves[theta] = xi
        rows.extend((theta, float(e), x) for e, x in zip(eps_grid, xi))
    _write_rows(args.out, "theta,eps,xi", rows)
    if args.fig:
        from . import report
        report.bound_curves(eps_grid, curves, args.fig)
    return 0


def _cmd_gof(args) -> int:
    if args.seed is None:
        raise ValueError("seed: required")
    if not args.d > 0.0:
        raise ValueError("d: d > 0")
    if args.n_samples < 2:
        raise ValueError("n_samples: n_samples >= 2")
    stream = Stream.from_seed(args.seed)
    taus = np.array([spheroid.sample_spheroid_exit(args.d, stream).tau
                     for _ in range(args.n_samples)])
    f_hat = analysis.ecdf(taus)
    ks = analysis.ks_distance(partial(spheroid.spheroid_cdf, args.d), f_hat)
    critical = analysis.ks_critical(args.n_samples, alpha=0.001)
    _write_rows(args.out,
                "d,n_samples,seed,ks_distance,ks_critical,sample_mean,expected_mean",
                [(args.d, args.n_samples, args.seed, ks, critical,
                  float(taus.mean()), spheroid.mean_exit_time(args.d))])
    if args.fig:
        from . import report
        grid = np.linspace(args.d * args.d * 1e-4, args.d * args.d, 400)
        report.gof_figure(taus, grid, spheroid.spheroid_density(args.d, grid),
                          args.fig)
    return 0


def _add_problem_flags(sub) -> None:
    for field in _FLOAT_FIELDS:
        sub.add_argument(f"--{field.replace('_', '-')}", type=float,
                         dest=field, default=None)
    for field in _INT_FIELDS:
        sub.add_argument(f"--{field.replace('_', '-')}", type=int,
                         dest=field, default=None)
    sub.add_argument("--config", default=None,
                     help="flat JSON file; flags override its fields")


def _add_io_flags(sub) -> None:
    sub.add_argument("--out", default="-",
                     help="output CSV path ('-' for stdout)")
    sub.add_argument("--fig", default=None,
                     help="optionally render a figure to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ouwoms",
        description="Exit times of Ornstein-Uhlenbeck processes by walk on "
                    "moving spheres, with an Euler-Maruyama baseline.")
    subs = parser.add_subparsers(dest="command", required=True)

    sample = subs.add_parser("sample", help="walk batch to CSV")
    _add_problem_flags(sample)
    _add_io_flags(sample)
    sample.set_defaults(handler=_cmd_sample)

    eul = subs.add_parser("euler", help="Euler baseline batch to CSV")
    _add_problem_flags(eul)
    _add_io_flags(eul)
    eul.add_argument("--h", type=float, default=euler.REFERENCE_H,
                     help="time step (default 1e-4)")
    bridge = eul.add_mutually_exclusive_group()
    bridge.add_argument("--bridge", dest="bridge", action="store_true",
                        default=True)
    bridge.add_argument("--no-bridge", dest="bridge", action="store_false")
    eul.set_defaults(handler=_cmd_euler)

    steps = subs.add_parser("steps", help="step-count scaling over an eps sweep")
    _add_problem_flags(steps)
    _add_io_flags(steps)
    steps.add_argument("--eps-sweep", default="1e-1,1e-2,1e-3,1e-4,1e-5",
                       help="comma-separated stopping tolerances")
    steps.set_defaults(handler=_cmd_steps)

    comp = subs.add_parser("compare", help="walk vs Euler reference")
    _add_problem_flags(comp)
    _add_io_flags(comp)
    comp.add_argument("--h", type=float, default=euler.REFERENCE_H)
    comp.add_argument("--rho", type=float, default=1.1)
    comp.add_argument("--gamma-exp", type=float, default=1.0)
    comp.set_defaults(handler=_cmd_compare)

    bound = subs.add_parser("bound", help="error-bound table")
    bound.add_argument("--theta-list", default="0.1,0.5,1.0,5.0")
    bound.add_argument("--sigma", type=float, default=1.0)
    bound.add_argument("--a", type=float, default=-1.0)
    bound.add_argument("--b", type=float, default=1.0)
    bound.add_argument("--gamma-exp", type=float, default=1.0)
    bound.add_argument("--eps-min", type=float, default=1e-5)
    bound.add_argument("--eps-max", type=float, default=1e-1)
    bound.add_argument("--eps-points", type=int, default=17)
    _add_io_flags(bound)
    bound.set_defaults(handler=_cmd_bound)

    gof = subs.add_parser("gof", help="spheroid sampler goodness of fit")
    gof.add_argument("--d", type=float, default=1.0)
    gof.add_argument("--n-samples", type=int, default=100000, dest="n_samples")
    gof.add_argument("--seed", type=int, default=None)
    _add_io_flags(gof)
    gof.set_defaults(handler=_cmd_gof)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except walk.StepLimitExceeded as exc:
        print(f"error: max_steps: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line surface.

Subcommands (each takes a JSON config path unless noted):

* ``sweep <config.json>``      Monte Carlo regret sweep; CSV + fitted slopes.
* ``fluid <config.json>``      fluid dual solve, value, growth exponent.
* ``degeneracy <config.json>`` degeneracy verdicts as JSON.
* ``probe <config.json>``      concentration + decomposition time series.
* ``plot <report.csv>``        SVG log-log plot of a sweep report.

Exit codes: 0 success, 1 configuration error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .degeneracy import degeneracy_verdict
from .distributions import from_json
from .errors import ConfigError, DegenerateFit, OlpError
from .fluid import estimate_growth_exponent, solve_fluid_dual
from .harness import ExperimentConfig, run_regret_sweep
from .policy import PolicyKind, compute_decomposition, concentration_probe, run_episode
from .seeding import derive_seed

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_SOLVER = 2


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _require(blob: dict, fname: str):
    if fname not in blob:
        raise ConfigError(f"config missing required field {fname!r}")
    return blob[fname]


def _cmd_sweep(path: str) -> int:
    cfg = ExperimentConfig.from_json(_load_json(path))
    report = run_regret_sweep(cfg)
    body = report.csv_body()
    if cfg.output_csv:
        with open(cfg.output_csv, "w") as fh:
            fh.write(body)
    else:
        sys.stdout.write(body)
    summary = {
        "mean_regret": {f"{p}@{t}": v for (p, t), v in sorted(report.mean_regret.items())},
        "fits": {p: {"slope": s, "intercept": i, "r2": r}
                 for p, (s, i, r) in report.fits.items()},
    }
    print(json.dumps(summary, indent=2), file=sys.stderr)
    return EXIT_OK


def _cmd_fluid(path: str) -> int:
    blob = _load_json(path)
    dist = from_json(_require(blob, "distribution"))
    d = np.atleast_1d(np.asarray(_require(blob, "d"), dtype=float))
    sol = solve_fluid_dual(dist, d)
    out = {
        "lam": sol.lam.tolist(),
        "value": sol.value,
        "converged": sol.converged,
        "dual_unique": not sol.flat_directions,
    }
    try:
        out["growth_exponent"] = estimate_growth_exponent(dist, d, sol.lam)
    except DegenerateFit as exc:
        out["growth_exponent"] = None
        out["growth_note"] = str(exc)
    print(json.dumps(out, indent=2))
    return EXIT_OK


def _cmd_degeneracy(path: str) -> int:
    blob = _load_json(path)
    dist = from_json(_require(blob, "distribution"))
    d = np.atleast_1d(np.asarray(_require(blob, "d"), dtype=float))
    print(degeneracy_verdict(dist, d).to_json())
    return EXIT_OK


def _cmd_probe(path: str) -> int:
    blob = _load_json(path)
    dist = from_json(_require(blob, "distribution"))
    T = int(_require(blob, "T"))
    d = np.atleast_1d(np.asarray(_require(blob, "d"), dtype=float))
    b = np.floor(d * T)
    seed = derive_seed(str(blob.get("base_seed", "olpce")), T, 0)
    ts, measured, envelope = concentration_probe(dist, b, T, seed)
    trace = run_episode(dist, b, T, PolicyKind.CE, seed)
    rep = compute_decomposition(dist, trace)
    print("t,measured,envelope,term_over,term_under")
    for i, t in enumerate(ts):
        _, o, u = rep.per_step[i]
        print(f"{t},{float(measured[i])!r},{float(envelope[i])!r},{float(o)!r},{float(u)!r}")
    print(
        json.dumps(
            {
                "term_over": rep.term_over,
                "term_under": rep.term_under,
                "c0_log_bound": rep.c0_log_bound,
            }
        ),
        file=sys.stderr,
    )
    return EXIT_OK


def _cmd_plot(csv_path: str, out_path: str | None) -> int:
    from .plotting import plot_report_csv

    out = out_path or (csv_path.rsplit(".", 1)[0] + ".svg")
    try:
        plot_report_csv(csv_path, out)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot plot {csv_path}: {exc}") from exc
    print(out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="olpce",
        description="Online LP re-solving policy: simulation and diagnostics",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("sweep", "fluid", "degeneracy", "probe"):
        p = sub.add_parser(name)
        p.add_argument("config")
    p = sub.add_parser("plot")
    p.add_argument("report_csv")
    p.add_argument("-o", "--out", default=None)

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        if args.command == "sweep":
            return _cmd_sweep(args.config)
        if args.command == "fluid":
            return _cmd_fluid(args.config)
        if args.command == "degeneracy":
            return _cmd_degeneracy(args.config)
        if args.command == "probe":
            return _cmd_probe(args.config)
        return _cmd_plot(args.report_csv, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OlpError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())

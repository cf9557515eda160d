"""Command-line front end.

Usage::

    gzk <experiment> --config PATH [--out DIR] [--seed N] [--override-time]
    gzk sweep --config PATH --grid PATH [--out DIR]

Exit status: 0 all checks pass, 1 a check failed, 2 invalid configuration,
3 a numerical guard tripped (boundary tail, Picard divergence, blow-up).
``GZK_THREADS`` sets the number of concurrent sweep rows.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import itertools
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import BoundaryTailError, InstabilityError, NonConvergenceError
from .experiments import EXPERIMENTS, Outcome, load_config, loglog_slope, parse_config, run_experiment

__all__ = ["main", "run_config", "sweep", "write_outputs", "EXIT_OK", "EXIT_FAIL", "EXIT_INVALID", "EXIT_GUARD"]

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_GUARD = 0, 1, 2, 3
_GUARDS = (BoundaryTailError, NonConvergenceError, InstabilityError)


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _table_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_outputs(out_dir, name: str, config_hash: str, outcome: Outcome) -> list[Path]:
    """Write ``<name>.report.txt``, ``<name>.report.json`` and ``<name>.table.csv``."""
    d = Path(out_dir)
    d.mkdir(parents=True, exist_ok=True)
    cols = ["config_hash"] + list(outcome.columns)
    rows = [[config_hash] + list(r) for r in outcome.rows]
    paths = [d / f"{name}.report.txt", d / f"{name}.report.json", d / f"{name}.table.csv"]
    paths[0].write_text(outcome.report.to_text())
    paths[1].write_text(outcome.report.to_json())
    paths[2].write_text(_table_text(cols, rows))
    return paths


def run_config(cfg, out_dir=None, *, stream=sys.stdout) -> int:
    """Run one parsed configuration and write its outputs; returns the exit status."""
    try:
        outcome = run_experiment(cfg)
    except _GUARDS as exc:
        print(f"numerical guard: {exc}", file=stream)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"invalid configuration: {exc}", file=stream)
        return EXIT_INVALID
    if out_dir is not None:
        write_outputs(out_dir, cfg.name, cfg.hash(), outcome)
    for name, ok in outcome.checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}", file=stream)
    return EXIT_OK if outcome.passed else EXIT_FAIL


# -- sweeps -------------------------------------------------------------------

_SHORT = {
    "t": ("run.times",),
    "r1": ("weights.r1",),
    "r2": ("weights.r2",),
    "k": ("weights.k",),
    "resolution": ("grid.nx", "grid.ny"),
}


def _parse_grid(text: str) -> list[tuple[str, list[str]]]:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    cp.read_string(text)
    if not cp.has_section("sweep"):
        raise ValueError("parameter grid needs a [sweep] section")
    out = []
    for key, value in cp.items("sweep"):
        vals = [v.strip() for v in value.split(",") if v.strip()]
        if not vals:
            raise ValueError(f"sweep parameter {key!r} has no values")
        out.append((key, vals))
    return out


def _overrides(assignment: dict) -> dict:
    o = {}
    for key, val in assignment.items():
        for target in _SHORT.get(key, (key,)):
            o[target] = val
    return o


def sweep(config_text: str, grid_text: str, *, threads: int | None = None):
    """Run every combination of the parameter grid.

    Returns
    -------
    columns : list of str
    rows : list of list
        One row per (combination, experiment row), followed by summary rows
        with log-log slopes over ``t`` and monotonicity over ``resolution``.
    status : int
        Worst status over the combinations.
    """
    params = _parse_grid(grid_text)
    keys = [k for k, _ in params]
    combos = [dict(zip(keys, vals)) for vals in itertools.product(*[v for _, v in params])]
    threads = threads or int(os.environ.get("GZK_THREADS", "1") or 1)

    def one(assign):
        try:
            cfg = parse_config(config_text, overrides=_overrides(assign))
        except ValueError as exc:
            return assign, None, None, EXIT_INVALID, str(exc)
        try:
            outcome = run_experiment(cfg)
        except _GUARDS as exc:
            return assign, cfg, None, EXIT_GUARD, str(exc)
        except ValueError as exc:
            return assign, cfg, None, EXIT_INVALID, str(exc)
        return assign, cfg, outcome, EXIT_OK if outcome.passed else EXIT_FAIL, ""

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(one, combos))
    else:
        results = [one(c) for c in combos]

    base_cols = None
    for _, _, outcome, _, _ in results:
        if outcome is not None:
            base_cols = list(outcome.columns)
            break
    base_cols = base_cols or []
    columns = ["kind", "config_hash", "status", "message"] + [f"param:{k}" for k in keys] + base_cols + ["fit"]
    rows = []
    worst = EXIT_OK
    for assign, cfg, outcome, status, msg in results:
        worst = max(worst, status)
        h = cfg.hash() if cfg is not None else ""
        params_vals = [assign[k] for k in keys]
        if outcome is None or not outcome.rows:
            rows.append(["row", h, status, msg] + params_vals + [""] * len(base_cols) + [""])
            continue
        for r in outcome.rows:
            rows.append(["row", h, status, msg] + params_vals + list(r) + [""])
    rows += _summaries(rows, columns, keys, base_cols)
    return columns, rows, worst


def _summaries(rows, columns, keys, base_cols):
    """Slopes over ``t`` of the Phi norms and monotonicity of residuals over ``resolution``."""
    out = []
    ci = {c: i for i, c in enumerate(columns)}
    for sweep_key in ("t", "resolution"):
        if sweep_key not in keys:
            continue
        x_col = ci[f"param:{sweep_key}"]
        others = [ci[f"param:{k}"] for k in keys if k != sweep_key]
        if "direction" in ci:
            others.append(ci["direction"])
        groups = {}
        for r in rows:
            if r[0] != "row" or r[ci["status"]] in (EXIT_INVALID, EXIT_GUARD):
                continue
            groups.setdefault(tuple(r[i] for i in others), []).append(r)
        for gkey, grp in groups.items():
            xs = [float(r[x_col]) for r in grp]
            if len(set(xs)) < 2:
                continue
            fits = []
            if sweep_key == "t":
                for vc in ("phi_norm", "phi_norm_beta"):
                    if vc in ci:
                        ys = [float(r[ci[vc]]) for r in grp]
                        if all(y > 0 for y in ys) and all(x > 0 for x in xs):
                            fits.append(f"slope_{vc}={loglog_slope(xs, ys)!r}")
            elif "residual" in ci:
                order = np.argsort(xs)
                ys = [float(grp[i][ci["residual"]]) for i in order]
                fits.append(f"monotone_residual={all(b < a for a, b in zip(ys, ys[1:]))}")
            for fit in fits:
                row = ["summary", "", "", ""] + [""] * (len(columns) - 4)
                for i, v in zip(others, gkey):
                    row[i] = v
                row[ci["fit"]] = fit
                out.append(row)
    return out


# -- entry point --------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gzk", description="Weighted-norm experiments for the gZK equation")
    sub = p.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", required=True, help="INI configuration file")
        sp.add_argument("--out", default="gzk-out", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="random seed (unsigned 64-bit)")
        sp.add_argument("--override-time", action="store_true", help="allow T beyond local_time")
    sp = sub.add_parser("sweep", help="run a parameter grid")
    sp.add_argument("--config", required=True)
    sp.add_argument("--grid", required=True, help="INI file with a [sweep] section")
    sp.add_argument("--out", default="gzk-out")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "sweep":
        try:
            cfg_text = Path(args.config).read_text()
            grid_text = Path(args.grid).read_text()
            columns, rows, status = sweep(cfg_text, grid_text)
        except (OSError, ValueError) as exc:
            print(f"invalid configuration: {exc}")
            return EXIT_INVALID
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.table.csv").write_text(_table_text(columns, rows))
        print(f"wrote {out / 'sweep.table.csv'} ({len(rows)} rows), status {status}")
        return status
    overrides = {"experiment.name": args.command}
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("invalid configuration: seed must be an unsigned 64-bit integer")
            return EXIT_INVALID
        overrides["experiment.seed"] = str(args.seed)
    if args.override_time:
        overrides["solver.override_time"] = "true"
    try:
        cfg = load_config(args.config, overrides=overrides)
    except (OSError, ValueError, configparser.Error) as exc:
        print(f"invalid configuration: {exc}")
        return EXIT_INVALID
    return run_config(cfg, args.out)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

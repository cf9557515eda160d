"""Configuration-driven verification experiments.

A configuration is an INI file. Every key is optional::

    [experiment]
    name = commutator
    seed = 0

    [grid]
    nx = 256
    ny = 256
    lx = 40
    ly = 40

    [weights]
    s = 1.0
    r1 = 0.5
    r2 = 0.5
    beta = 0.0
    k = 1

    [solver]
    steps = 64
    T = 0            ; 0 means use local_time(u0)
    c = 1.0
    gamma = 0.5
    picard_tol = 1e-10
    picard_max_iter = 50

    [data]
    kind = gaussian  ; gaussian | mode | file | zero
    sigma = 1.0
    amplitude = 1.0
    center = 0.0, 0.0
    a = 1            ; mode: amplitude * cos(a x + b y)
    b = 1
    path =           ; file: a Field record
    noise = 0.0      ; amplitude of a seeded smooth perturbation

    [run]
    times = 0.1
    resolutions = 128, 256, 512
    alphas = 0.25, 0.5, 0.75
    tolerance = 1e-4
    tail_check = true
    lattice_order = 8

Each experiment returns an :class:`Outcome` holding a report, a table of
rows and the list of named assertions with their pass/fail state.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .commutator import commutator_check, commutator_check_beta
from .fractional import SteinQuadrature, frac_deriv, stein_constant, stein_deriv
from .grid import Field, GridSpec, inverse, make_grid
from .io import load_field
from .norms import hs_norm, mu1, mu2, weighted_l2
from .params import WeightParams
from .report import NormReport
from .solver import (
    SolverConfig,
    evolve,
    fixed_point_residual,
    local_time,
    picard_solve,
    trajectory_invariants,
)

__all__ = [
    "EXPERIMENTS",
    "DataSpec",
    "RunSpec",
    "ExperimentConfig",
    "Outcome",
    "parse_config",
    "load_config",
    "build_data",
    "run_experiment",
    "loglog_slope",
]

EXPERIMENTS = (
    "commutator",
    "commutator-beta",
    "phi-growth",
    "persistence",
    "picard-contraction",
    "convergence",
    "stein-calibration",
)

_DEFAULT_TOL = {
    "commutator": 1e-4,
    "commutator-beta": 1e-3,
    "phi-growth": 1.05,
    "stein-calibration": 1e-3,
    "picard-contraction": 0.5,
}


@dataclass(frozen=True)
class DataSpec:
    kind: str = "gaussian"
    sigma: float = 1.0
    amplitude: float = 1.0
    center: tuple = (0.0, 0.0)
    a: float = 1.0
    b: float = 1.0
    path: str = ""
    noise: float = 0.0


@dataclass(frozen=True)
class RunSpec:
    times: tuple = (0.1,)
    resolutions: tuple = (128, 256, 512)
    alphas: tuple = (0.25, 0.5, 0.75)
    tolerance: float | None = None
    tail_check: bool = True
    lattice_order: int = 8


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "commutator"
    nx: int = 256
    ny: int = 256
    lx: float = 40.0
    ly: float = 40.0
    weights: WeightParams = field(default_factory=lambda: WeightParams(1.0, 0.5, 0.5))
    solver: SolverConfig = field(default_factory=SolverConfig)
    solver_T: float = 0.0
    data: DataSpec = field(default_factory=DataSpec)
    run: RunSpec = field(default_factory=RunSpec)
    seed: int = 0

    @property
    def grid(self) -> GridSpec:
        return make_grid(self.nx, self.ny, self.lx, self.ly)

    @property
    def tolerance(self) -> float:
        if self.run.tolerance is not None:
            return self.run.tolerance
        return _DEFAULT_TOL.get(self.name, np.inf)

    def canonical(self) -> str:
        return json.dumps(dataclasses.asdict(self), sort_keys=True, default=str)

    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def parse_config(text: str, *, overrides: dict | None = None) -> ExperimentConfig:
    """Parse INI text; ``overrides`` maps ``"section.key"`` to replacement strings.

    Raises ``ValueError`` (or its subclass ``AdmissibilityError``) on invalid input.
    """
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    cp.read_string(text)
    for key, value in (overrides or {}).items():
        sec, opt = key.split(".", 1)
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, opt, str(value))

    def get(sec, opt, conv, default):
        if cp.has_option(sec, opt) and cp.get(sec, opt).strip() != "":
            return conv(cp.get(sec, opt))
        return default

    name = get("experiment", "name", str.strip, "commutator")
    if name not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {name!r}; choose one of {', '.join(EXPERIMENTS)}")
    k = get("weights", "k", int, 1)
    weights = WeightParams(
        s=get("weights", "s", float, 1.0),
        r1=get("weights", "r1", float, 0.5),
        r2=get("weights", "r2", float, 0.5),
        beta=get("weights", "beta", float, 0.0),
        k=k,
    )
    solver_T = get("solver", "T", float, 0.0)
    solver = SolverConfig(
        k=k,
        T=solver_T if solver_T > 0 else 1.0,
        steps=get("solver", "steps", int, 64),
        s=weights.s,
        picard_max_iter=get("solver", "picard_max_iter", int, 50),
        picard_tol=get("solver", "picard_tol", float, 1e-10),
        c=get("solver", "c", float, 1.0),
        gamma=get("solver", "gamma", float, 0.5),
        t_max=get("solver", "t_max", float, 1.0),
        override_time=get("solver", "override_time", _bool, False),
    )
    data = DataSpec(
        kind=get("data", "kind", str.strip, "gaussian"),
        sigma=get("data", "sigma", float, 1.0),
        amplitude=get("data", "amplitude", float, 1.0),
        center=get("data", "center", _floats, (0.0, 0.0)),
        a=get("data", "a", float, 1.0),
        b=get("data", "b", float, 1.0),
        path=get("data", "path", str.strip, ""),
        noise=get("data", "noise", float, 0.0),
    )
    if data.kind not in ("gaussian", "mode", "file", "zero"):
        raise ValueError(f"unknown data kind {data.kind!r}")
    run = RunSpec(
        times=get("run", "times", _floats, (0.1,) if name != "phi-growth" else (1.0, 2.0, 4.0, 8.0)),
        resolutions=tuple(int(v) for v in get("run", "resolutions", _floats, (128, 256, 512))),
        alphas=get("run", "alphas", _floats, (0.25, 0.5, 0.75)),
        tolerance=get("run", "tolerance", float, None),
        tail_check=get("run", "tail_check", _bool, True),
        lattice_order=get("run", "lattice_order", int, 8),
    )
    cfg = ExperimentConfig(
        name=name,
        nx=get("grid", "nx", int, 256),
        ny=get("grid", "ny", int, 256),
        lx=get("grid", "lx", float, 40.0),
        ly=get("grid", "ly", float, 40.0),
        weights=weights,
        solver=solver,
        solver_T=solver_T,
        data=data,
        run=run,
        seed=get("experiment", "seed", int, 0),
    )
    cfg.grid  # validates sizes
    return cfg


def load_config(path, **kwargs) -> ExperimentConfig:
    return parse_config(Path(path).read_text(), **kwargs)


def build_data(cfg: ExperimentConfig, grid: GridSpec | None = None) -> Field:
    """Initial data on ``grid`` (default: the configured grid)."""
    g = cfg.grid if grid is None else grid
    d = cfg.data
    X, Y = g.mesh()
    if d.kind == "gaussian":
        cx, cy = (tuple(d.center) + (0.0, 0.0))[:2]
        v = d.amplitude * np.exp(-((X - cx) ** 2 + (Y - cy) ** 2) / (2 * d.sigma**2))
    elif d.kind == "mode":
        v = d.amplitude * np.cos(d.a * X + d.b * Y)
    elif d.kind == "zero":
        v = np.zeros(g.shape)
    else:
        f = load_field(d.path)
        if f.grid != g:
            raise ValueError(f"data file grid {f.grid} differs from configured grid {g}")
        return f if f.is_physical else inverse(f)
    if d.noise:
        rng = np.random.default_rng(cfg.seed)
        v = v + d.noise * _smooth_noise(g, rng) * np.exp(-(X**2 + Y**2) / (2 * d.sigma**2))
    return Field(g, v, "physical")


def _smooth_noise(g: GridSpec, rng: np.random.Generator) -> np.ndarray:
    XI, ETA = g.modes()
    spec = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    v = np.real(np.fft.ifft2(spec * np.exp(-(XI**2 + ETA**2))))
    return v / max(np.max(np.abs(v)), 1e-300)


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


@dataclass
class Outcome:
    """Result of one experiment run."""

    report: NormReport
    columns: list
    rows: list
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    def check(self, name: str, ok: bool):
        self.checks.append((name, bool(ok)))


def _quad(cfg: ExperimentConfig) -> SteinQuadrature:
    return SteinQuadrature(lattice_order=cfg.run.lattice_order)


def _exp_commutator(cfg, beta: bool) -> Outcome:
    u0 = build_data(cfg)
    q = _quad(cfg)
    fn = commutator_check_beta if beta else commutator_check
    cols = ["t", "direction", "residual", "phi_norm", "bound_ratio", "tail"]
    rows, values = [], {}
    out = Outcome(NormReport(), cols, rows)
    for t in cfg.run.times:
        rep = fn(u0, t, cfg.weights, q, tail_check=cfg.run.tail_check)
        for d in ("x", "y"):
            rows.append([t, d, rep[f"residual_{d}"], rep[f"phi_norm_{d}"],
                         rep[f"bound_ratio_{d}"], rep["tail"]])
            values[f"residual_{d}@t={t:g}"] = rep[f"residual_{d}"]
            values[f"bound_ratio_{d}@t={t:g}"] = rep[f"bound_ratio_{d}"]
            out.check(f"residual_{d}@t={t:g} <= {cfg.tolerance:g}", rep[f"residual_{d}"] <= cfg.tolerance)
    out.report = NormReport(values)
    return out


def _exp_phi_growth(cfg) -> Outcome:
    u0 = build_data(cfg)
    q = _quad(cfg)
    w = cfg.weights
    use_beta = w.beta > 0
    cols = ["t", "direction", "phi_norm", "bound_ratio"] + (["phi_norm_beta", "bound_ratio_beta"] if use_beta else [])
    rows, series = [], {}
    for t in cfg.run.times:
        rep = commutator_check(u0, t, w, q, tail_check=cfg.run.tail_check)
        repb = commutator_check_beta(u0, t, w, q, tail_check=cfg.run.tail_check) if use_beta else None
        for d in ("x", "y"):
            row = [t, d, rep[f"phi_norm_{d}"], rep[f"bound_ratio_{d}"]]
            series.setdefault(f"phi_norm_{d}", []).append(rep[f"phi_norm_{d}"])
            if repb is not None:
                row += [repb[f"phi_norm_{d}"], repb[f"bound_ratio_{d}"]]
                series.setdefault(f"phi_norm_beta_{d}", []).append(repb[f"phi_norm_{d}"])
            rows.append(row)
    out = Outcome(NormReport(), cols, rows)
    values = {}
    ts = list(cfg.run.times)
    for name, ys in series.items():
        if len(ts) >= 2 and all(y > 0 for y in ys):
            sl = loglog_slope(ts, ys)
            values[f"slope_{name}"] = sl
            out.check(f"slope_{name} <= {cfg.tolerance:g}", sl <= cfg.tolerance)
    ratios = [r[3] for r in rows] + ([r[5] for r in rows] if use_beta else [])
    out.check("bound ratios finite", all(np.isfinite(ratios)))
    values["max_bound_ratio"] = max(ratios)
    out.report = NormReport(values)
    return out


def _solver_cfg(cfg, u0) -> SolverConfig:
    s = cfg.solver
    T = cfg.solver_T if cfg.solver_T > 0 else local_time(u0, s)
    return dataclasses.replace(s, T=T)


def _exp_persistence(cfg) -> Outcome:
    u0 = build_data(cfg)
    w = cfg.weights
    scfg = _solver_cfg(cfg, u0)
    traj = evolve(u0, scfg)
    inv = trajectory_invariants(traj, w.k)
    cols = ["t", "weighted_l2", "hs_norm", "mass", "energy"]
    rows = []
    for f, t, rec in zip(traj, traj.times, inv):
        rows.append([t, weighted_l2(f, w.r1, w.r2), hs_norm(f, w.s), rec.mass, rec.energy])
    hs0, wl0 = hs_norm(u0, w.s), weighted_l2(u0, w.r1, w.r2)
    sup_w = max(r[1] for r in rows)
    den = (1 + scfg.T) * (hs0 + wl0)
    K = sup_w / den if den > 0 else 0.0
    m1 = mu1(traj, w)
    m2 = mu2(traj, w)
    z0 = hs0 + wl0
    values = {
        "T": scfg.T,
        "sup_weighted_l2": sup_w,
        "K": K,
        "mu1": m1,
        "mu2": m2,
        "K_mu2": m2 / ((1 + scfg.T) * z0) if z0 > 0 else 0.0,
        "hs_u0": hs0,
        "weighted_l2_u0": wl0,
    }
    out = Outcome(NormReport(values), cols, rows)
    out.check("K finite", np.isfinite(K))
    m0 = inv[0].mass
    drift = max(abs(r.mass - m0) for r in inv) / m0 if m0 > 0 else 0.0
    out.report.values["mass_drift"] = drift
    out.check("mass drift <= 1e-8", drift <= 1e-8)
    return out


def _exp_picard(cfg) -> Outcome:
    u0 = build_data(cfg)
    scfg = _solver_cfg(cfg, u0)
    traj, hist = picard_solve(u0, scfg)
    fp = fixed_point_residual(u0, traj, scfg)
    cols = ["iteration", "difference", "ratio"]
    rows = []
    for n, dv in enumerate(hist):
        ratio = dv / hist[n - 1] if n > 0 and hist[n - 1] > 0 else float("nan")
        rows.append([n, dv, ratio])
    ratios = [r[2] for r in rows if np.isfinite(r[2])]
    max_ratio = max(ratios) if ratios else 0.0
    values = {"T": scfg.T, "iterations": len(hist), "max_ratio": max_ratio, "fixed_point_residual": fp}
    out = Outcome(NormReport(values), cols, rows)
    out.check(f"max contraction ratio <= {cfg.tolerance:g}", max_ratio <= cfg.tolerance)
    out.check("fixed point residual <= 10 tol", fp <= 10 * scfg.picard_tol)
    return out


def _exp_convergence(cfg) -> Outcome:
    q = _quad(cfg)
    cols = ["resolution", "t", "direction", "residual"]
    rows, table = [], {}
    for n in cfg.run.resolutions:
        sub = dataclasses.replace(cfg, nx=int(n), ny=int(n))
        u0 = build_data(sub)
        for t in cfg.run.times:
            rep = commutator_check(u0, t, cfg.weights, q, tail_check=cfg.run.tail_check)
            for d in ("x", "y"):
                rows.append([int(n), t, d, rep[f"residual_{d}"]])
                table.setdefault((t, d), []).append(rep[f"residual_{d}"])
    out = Outcome(NormReport(), cols, rows)
    values = {}
    for (t, d), res in table.items():
        values[f"residual_{d}@t={t:g},n={cfg.run.resolutions[-1]}"] = res[-1]
        out.check(f"residual_{d}@t={t:g} strictly decreasing", all(b < a for a, b in zip(res, res[1:])))
    out.report = NormReport(values)
    return out


def _exp_stein(cfg) -> Outcome:
    u0 = build_data(cfg)
    q = _quad(cfg)
    cols = ["alpha", "direction", "d_calibrated", "d_closed_form", "relative_error"]
    rows, values = [], {}
    out = Outcome(NormReport(), cols, rows)
    for a in cfg.run.alphas:
        for ax, d in ((0, "x"), (1, "y")):
            ref = frac_deriv(u0, ax, a)
            err = (stein_deriv(u0, ax, a, q) - ref).norm() / ref.norm() if ref.norm() > 0 else 0.0
            dc = q.calibrate(u0.grid, ax, a)
            rows.append([a, d, dc, stein_constant(a), err])
            values[f"error_{d}@alpha={a:g}"] = err
            out.check(f"stein vs multiplier {d} alpha={a:g} <= {cfg.tolerance:g}", err <= cfg.tolerance)
    out.report = NormReport(values)
    return out


def run_experiment(cfg: ExperimentConfig) -> Outcome:
    """Execute the configured experiment. Exceptions propagate to the caller."""
    name = cfg.name
    if name == "commutator":
        out = _exp_commutator(cfg, beta=False)
    elif name == "commutator-beta":
        out = _exp_commutator(cfg, beta=True)
    elif name == "phi-growth":
        out = _exp_phi_growth(cfg)
    elif name == "persistence":
        out = _exp_persistence(cfg)
    elif name == "picard-contraction":
        out = _exp_picard(cfg)
    elif name == "convergence":
        out = _exp_convergence(cfg)
    else:
        out = _exp_stein(cfg)
    out.report.meta.update(
        {
            "experiment": name,
            "config_hash": cfg.hash(),
            "seed": cfg.seed,
            "grid": [cfg.nx, cfg.ny, cfg.lx, cfg.ly],
            "weights": dataclasses.asdict(cfg.weights),
            "checks": [[n, ok] for n, ok in out.checks],
        }
    )
    return out

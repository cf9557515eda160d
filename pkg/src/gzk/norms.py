"""Norm functionals: Sobolev, anisotropic weighted L2, mixed space-time and the mu families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, GridSpec, check_tail, fwd_array, inv_array, to_physical, to_spectral
from .params import WeightParams

__all__ = [
    "l2_norm",
    "hs_norm",
    "bessel_norm",
    "weighted_l2",
    "weight_sum_l2",
    "z_norm",
    "Trajectory",
    "MixedNormSpec",
    "mixed_norm",
    "mu1_terms",
    "mu1",
    "mu2",
    "INNER_OPERATORS",
]


def l2_norm(u: Field) -> float:
    return u.norm()


def hs_norm(u: Field, s: float) -> float:
    """``||u|| + ||D_x^s u|| + ||D_y^s u||``.

    At ``s = 0`` all three multipliers are 1, so the value is ``3 ||u||``.
    """
    if s < 0:
        raise ValueError(f"s={s} must be non-negative")
    g = u.grid
    U = to_spectral(u)
    p = np.sum(np.abs(U) ** 2, axis=1)
    q = np.sum(np.abs(U) ** 2, axis=0)
    a = np.sqrt(g.area)
    return float(
        a * np.sqrt(p.sum())
        + a * np.sqrt(np.sum(np.abs(g.xi) ** (2 * s) * p))
        + a * np.sqrt(np.sum(np.abs(g.eta) ** (2 * s) * q))
    )


def bessel_norm(u: Field, s: float) -> float:
    """``||(1 + xi^2 + eta^2)^(s/2) u_hat||``, the isotropic equivalent of :func:`hs_norm`.

    On any field ``bessel <= hs_norm <= 3 bessel`` for ``s >= 0``.
    """
    g = u.grid
    XI, ETA = g.modes()
    U = to_spectral(u)
    return float(np.sqrt(g.area * np.sum((1 + XI**2 + ETA**2) ** s * np.abs(U) ** 2)))


def _weights(grid: GridSpec, r1: float, r2: float):
    wx = np.abs(grid.x) ** r1
    wy = np.abs(grid.y) ** r2
    return wx[:, None], wy[None, :]


def weighted_l2(u: Field, r1: float, r2: float, *, tail_check: bool = True) -> float:
    """``(int (|x|^(2 r1) + |y|^(2 r2)) |u|^2)^(1/2)`` by grid quadrature.

    Raises :class:`~gzk.errors.BoundaryTailError` if the data reach the box edge.
    """
    if tail_check:
        check_tail(u)
    g = u.grid
    v = np.abs(to_physical(u)) ** 2
    wx, wy = _weights(g, 2 * r1, 2 * r2)
    return float(np.sqrt(g.dx * g.dy * np.sum((wx + wy) * v)))


def weight_sum_l2(u: Field, r1: float, r2: float, *, tail_check: bool = True) -> float:
    """``||(|x|^r1 + |y|^r2) u||_2``, the weight form used by ``mu2``."""
    if tail_check:
        check_tail(u)
    g = u.grid
    wx, wy = _weights(g, r1, r2)
    return float(np.sqrt(g.dx * g.dy * np.sum(np.abs((wx + wy) * to_physical(u)) ** 2)))


def z_norm(u: Field, w: WeightParams) -> float:
    """Norm of the weighted space: :func:`hs_norm` plus :func:`weighted_l2`."""
    return hs_norm(u, w.s) + weighted_l2(u, w.r1, w.r2)


# -- trajectories and mixed norms ---------------------------------------------


class Trajectory:
    """Samples ``u(t_m)`` at uniformly spaced increasing times on one grid.

    Parameters
    ----------
    grid : GridSpec
    times : array_like, shape (M+1,)
    data : array_like, shape (M+1, nx, ny)
        Physical values; real data is stored as float64.
    """

    def __init__(self, grid: GridSpec, times, data):
        times = np.asarray(times, dtype=float).ravel()
        data = np.asarray(data)
        if times.size == 0:
            raise ValueError("trajectory is empty")
        if data.shape != (times.size,) + grid.shape:
            raise ValueError(f"data shape {data.shape} does not match {times.size} x {grid.shape}")
        if times.size > 1:
            dt = np.diff(times)
            if np.any(dt <= 0):
                raise ValueError("times must be strictly increasing")
            if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
                raise ValueError("times must be uniformly spaced")
        if not np.iscomplexobj(data):
            data = data.astype(float, copy=True)
        else:
            data = data.astype(complex, copy=True)
        data.flags.writeable = False
        times.flags.writeable = False
        self.grid = grid
        self.times = times
        self.data = data

    @classmethod
    def from_fields(cls, times, fields) -> "Trajectory":
        fields = list(fields)
        if not fields:
            raise ValueError("trajectory is empty")
        grid = fields[0].grid
        if any(f.grid != grid for f in fields):
            raise ValueError("all fields must share one grid")
        data = np.stack([to_physical(f) for f in fields])
        if np.all(np.abs(data.imag) == 0):
            data = data.real
        return cls(grid, times, data)

    def __len__(self) -> int:
        return self.times.size

    def __getitem__(self, m: int) -> Field:
        return Field(self.grid, self.data[m], "physical")

    def __iter__(self):
        return (self[m] for m in range(len(self)))

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self) > 1 else 0.0

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def scaled(self, lam: complex) -> "Trajectory":
        return Trajectory(self.grid, self.times, lam * self.data)


def _apply_inner(data: np.ndarray, grid: GridSpec, op: str | None, s: float) -> np.ndarray:
    if op is None or op == "id":
        return data
    XI, ETA = grid.modes()
    dx = 1j * XI
    dx[grid.nyquist_x, :] = 0.0
    if op == "dx":
        m = dx
    elif op == "dxs_dx":
        m = np.abs(XI) ** s * dx
    elif op == "dys_dx":
        m = np.abs(ETA) ** s * dx
    else:
        raise ValueError(f"unknown inner operator {op!r}")
    return inv_array(fwd_array(data) * m)


#: Inner operator tags accepted by :class:`MixedNormSpec`.
INNER_OPERATORS = (None, "id", "dx", "dxs_dx", "dys_dx")


@dataclass(frozen=True)
class MixedNormSpec:
    """Nested Lebesgue norm over ``(T, x, y)``.

    Parameters
    ----------
    order : str
        Axis letters from outermost to innermost, a permutation of ``"Txy"``.
        ``L_x^inf L_{yT}^2`` is ``order="xyT"`` with ``exponents=(inf, 2, 2)``.
    exponents : tuple of float
        One exponent in ``[1, inf]`` per letter of ``order``.
    op : str or None
        Operator applied before measuring: ``None``, ``"dx"``, ``"dxs_dx"``
        (``D_x^s d_x``) or ``"dys_dx"`` (``D_y^s d_x``).
    s : float
        Order used by the ``D^s`` operators.
    """

    order: str
    exponents: tuple
    op: str | None = None
    s: float = 0.0

    def __post_init__(self):
        if sorted(self.order) != sorted("Txy"):
            raise ValueError(f"order {self.order!r} must be a permutation of 'Txy'")
        exps = tuple(float(p) for p in self.exponents)
        if len(exps) != 3:
            raise ValueError("need one exponent per axis")
        for p in exps:
            if not (p >= 1):
                raise ValueError(f"exponent {p} must lie in [1, inf]")
        if self.op not in INNER_OPERATORS:
            raise ValueError(f"unknown inner operator {self.op!r}")
        object.__setattr__(self, "exponents", exps)


def _reduce(a: np.ndarray, axis: int, p: float, weight: float, left_endpoint: bool) -> np.ndarray:
    if np.isinf(p):
        return a.max(axis=axis)
    if left_endpoint:
        a = np.take(a, np.arange(a.shape[axis] - 1), axis=axis)
    return (weight * np.sum(a**p, axis=axis)) ** (1.0 / p)


def mixed_norm(traj: Trajectory, spec: MixedNormSpec) -> float:
    """Nested discrete norm, innermost axis reduced first.

    Space integrals use the grid rule ``sum * dx``. The time integral is the
    left-endpoint Riemann sum ``sum_{m < M} * dt``, so a finite time exponent
    needs at least two samples. An infinite exponent is the maximum over the
    samples.
    """
    g = traj.grid
    a = np.abs(_apply_inner(traj.data, g, spec.op, spec.s))
    steps = {"T": traj.dt, "x": g.dx, "y": g.dy}
    remaining = ["T", "x", "y"]
    for letter, p in reversed(list(zip(spec.order, spec.exponents))):
        ax = remaining.index(letter)
        if letter == "T" and not np.isinf(p) and len(traj) < 2:
            raise ValueError("a finite time exponent needs at least two time samples")
        a = _reduce(a, ax, p, steps[letter], left_endpoint=(letter == "T"))
        remaining.pop(ax)
    return float(a)


def _sup_hs(traj: Trajectory, s: float) -> float:
    return max(hs_norm(f, s) for f in traj)


def mu1_terms(traj: Trajectory, w: WeightParams, *, gamma: float = 1.0 / 24, eps: float = 0.1):
    """Individual terms of the contraction norm for power ``w.k``.

    Parameters
    ----------
    gamma : float
        Parameter in (0, 1/12) of the family ``3 <= k <= 7``.
    eps : float
        Excess over ``3k/2`` in the time exponent of the family ``k >= 8``.

    Returns
    -------
    dict
        Term name to value.
    """
    k, s = w.k, w.s
    if k < 1:
        raise ValueError("k must be at least 1")
    inf = np.inf
    terms = {
        "LinfT_Hs": _sup_hs(traj, s),
        "Dxs_dx_Linfx_L2yT": mixed_norm(traj, MixedNormSpec("xyT", (inf, 2, 2), "dxs_dx", s)),
        "Dys_dx_Linfx_L2yT": mixed_norm(traj, MixedNormSpec("xyT", (inf, 2, 2), "dys_dx", s)),
    }

    def time_sup(p, op=None):
        return mixed_norm(traj, MixedNormSpec("Txy", (p, inf, inf), op, s))

    def x_max(p):
        return mixed_norm(traj, MixedNormSpec("xyT", (p, inf, inf)))

    if k == 1:
        terms["dx_L2T_Linfxy"] = time_sup(2, "dx")
        terms["u_L2x_LinfyT"] = x_max(2)
    elif k == 2:
        terms["u_L3T_Linfxy"] = time_sup(3)
        terms["dx_L9/4T_Linfxy"] = time_sup(9 / 4, "dx")
        terms["u_L2x_LinfyT"] = x_max(2)
    elif k <= 7:
        if not 0 < gamma < 1 / 12:
            raise ValueError(f"gamma={gamma} must lie in (0, 1/12)")
        pk = 12 * (k - 1) / (7 - 12 * gamma)
        terms["u_LpkT_Linfxy"] = time_sup(pk)
        terms["dx_L12/5T_Linfxy"] = time_sup(12 / 5, "dx")
        terms["u_L4x_LinfyT"] = x_max(4)
    else:
        if not eps > 0:
            raise ValueError(f"eps={eps} must be positive")
        terms["dx_Linfx_L2yT"] = mixed_norm(traj, MixedNormSpec("xyT", (inf, 2, 2), "dx", s))
        terms["u_L3k/2+T_Linfxy"] = time_sup(1.5 * k + eps)
        terms["dx_L3k/(k+2)T_Linfxy"] = time_sup(3 * k / (k + 2), "dx")
        terms["u_Lk/2x_LinfyT"] = x_max(k / 2)
    return terms


def mu1(traj: Trajectory, w: WeightParams, **kwargs) -> float:
    """Sum of the norm family selected by ``w.k``; see :func:`mu1_terms`."""
    return float(sum(mu1_terms(traj, w, **kwargs).values()))


def mu2(traj: Trajectory, w: WeightParams, *, tail_check: bool = True, **kwargs) -> float:
    """``mu1`` plus ``sup_t ||(|x|^r1 + |y|^r2) u(t)||_2``."""
    sup_w = max(weight_sum_l2(f, w.r1, w.r2, tail_check=tail_check) for f in traj)
    return mu1(traj, w, **kwargs) + sup_w

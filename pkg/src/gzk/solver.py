"""Local solution of ``u_t + d_x Lap u + u^k u_x = 0``.

Two independent routes are provided.

* :func:`picard_solve` iterates the Duhamel map
  ``Psi(u)(t) = W(t) u0 - int_0^t W(t - t') (u^k u_x)(t') dt'`` on whole
  trajectories.
* :func:`evolve` is an ETDRK4 exponential integrator whose linear part is
  the exact group.

Both work on the Galerkin truncation to the modes kept by ``dealias(., k+1)``,
where mass is conserved exactly by the semi-discrete system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError, NonConvergenceError
from .grid import (
    Field,
    GridSpec,
    check_tail,
    dealias_mask,
    fwd_array,
    hermitian_symmetrize,
    inv_array,
    to_physical,
    to_spectral,
)
from .group import grid_phase
from .norms import Trajectory, hs_norm

__all__ = [
    "SolverConfig",
    "InvariantRecord",
    "nonlinearity",
    "local_time",
    "integrate",
    "evolve",
    "duhamel",
    "picard_solve",
    "fixed_point_residual",
    "invariants",
    "trajectory_invariants",
]


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    Parameters
    ----------
    k : int
        Power of the nonlinearity.
    T : float
        Time horizon.
    steps : int
        Number of uniform steps ``M``; trajectories hold ``M + 1`` samples.
    s : float
        Sobolev order for the Picard stopping rule and the time rule.
    picard_max_iter, picard_tol : int, float
        Picard stops once ``sup_t ||u^(n+1) - u^(n)||_{H^s} < picard_tol``.
    quadrature : str
        Duhamel rule; only ``"simpson"`` (fourth order) is implemented.
    c, gamma : float
        Constants of the time rule ``c a^k T^gamma <= 1/2``.
    t_max : float
        Time returned by :func:`local_time` for zero data.
    override_time : bool
        Permit ``T`` beyond :func:`local_time`.
    nonlinear : bool
        Switch off ``u^k u_x`` to recover the linear flow.
    growth_guard : float
        :class:`InstabilityError` when the L2 norm exceeds this multiple of
        its initial value.
    """

    k: int = 1
    T: float = 0.25
    steps: int = 64
    s: float = 1.0
    picard_max_iter: int = 50
    picard_tol: float = 1e-10
    quadrature: str = "simpson"
    c: float = 1.0
    gamma: float = 0.5
    t_max: float = 1.0
    override_time: bool = False
    nonlinear: bool = True
    growth_guard: float = 1e6

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k={self.k} must be an integer >= 1")
        if not self.T > 0:
            raise ValueError(f"T={self.T} must be positive")
        if self.steps < 1:
            raise ValueError("steps must be at least 1")
        if self.quadrature != "simpson":
            raise ValueError(f"unknown Duhamel quadrature {self.quadrature!r}")
        if not (self.c > 0 and self.gamma > 0):
            raise ValueError("time-rule constants c and gamma must be positive")

    @property
    def dt(self) -> float:
        return self.T / self.steps

    @property
    def times(self) -> np.ndarray:
        return self.T * np.arange(self.steps + 1) / self.steps


@dataclass(frozen=True)
class InvariantRecord:
    mass: float
    energy: float
    t: float = 0.0


class _Ops:
    """Precomputed multipliers for one grid and power ``k``."""

    def __init__(self, grid: GridSpec, k: int):
        self.grid = grid
        self.k = k
        XI, _ = grid.modes()
        self.ikx = 1j * XI
        self.ikx[grid.nyquist_x, :] = 0.0
        self.phi = grid_phase(grid)
        self.mask = dealias_mask(grid, k + 1)

    def nl(self, U: np.ndarray) -> np.ndarray:
        """Spectral ``P(u^k u_x)`` for band-limited coefficient arrays (last two axes)."""
        u = inv_array(U).real
        ux = inv_array(self.ikx * U).real
        return self.mask * fwd_array(u**self.k * ux)

    def group(self, t):
        return np.exp(1j * np.multiply.outer(np.asarray(t), self.phi))


def _real_field(u: Field, what: str = "u") -> np.ndarray:
    v = to_physical(u)
    scale = max(np.max(np.abs(v)), 1e-300)
    if np.max(np.abs(v.imag)) > 1e-12 * scale:
        raise ValueError(f"{what} must be real-valued")
    return v.real


def nonlinearity(u: Field, k: int) -> Field:
    """Dealiased ``u^k u_x`` as a physical field.

    The input is projected onto the modes kept by ``dealias(., k+1)``, the
    derivative is spectral, and the product is truncated back to that band.
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k={k} must be an integer >= 1")
    v = _real_field(u)
    ops = _Ops(u.grid, int(k))
    U = ops.mask * fwd_array(v)
    return Field(u.grid, inv_array(ops.nl(U)).real, "physical")


def local_time(u0: Field, cfg: SolverConfig) -> float:
    """Largest ``T`` with ``c a^k T^gamma <= 1/2`` where ``a = 2 c ||u0||_{H^s}``.

    Zero data give ``cfg.t_max``.
    """
    hs = hs_norm(u0, cfg.s)
    if hs == 0:
        return cfg.t_max
    a = 2 * cfg.c * hs
    return float((2 * cfg.c * a**cfg.k) ** (-1.0 / cfg.gamma))


def _etdrk4_coefficients(L: np.ndarray, h: float, contour: int = 32):
    # contour integrals on a full circle: L = i*phi is imaginary
    r = np.exp(2j * np.pi * (np.arange(1, contour + 1) - 0.5) / contour)
    LR = h * L[..., None] + r
    Q = h * np.mean((np.exp(LR / 2) - 1) / LR, axis=-1)
    f1 = h * np.mean((-4 - LR + np.exp(LR) * (4 - 3 * LR + LR**2)) / LR**3, axis=-1)
    f2 = h * np.mean((2 + LR + np.exp(LR) * (-2 + LR)) / LR**3, axis=-1)
    f3 = h * np.mean((-4 - 3 * LR - LR**2 + np.exp(LR) * (4 - LR)) / LR**3, axis=-1)
    return np.exp(h * L), np.exp(h * L / 2), Q, f1, f2, f3


class _Stepper:
    def __init__(self, ops: _Ops, h: float, nonlinear: bool):
        self.ops = ops
        self.nonlinear = nonlinear
        L = 1j * ops.phi
        if nonlinear:
            self.E, self.E2, self.Q, self.f1, self.f2, self.f3 = _etdrk4_coefficients(L, h)
        else:
            self.E = np.exp(h * L)

    def step(self, U: np.ndarray) -> np.ndarray:
        if not self.nonlinear:
            return self.E * U
        nl = self.ops.nl
        Nu = -nl(U)
        a = self.E2 * U + self.Q * Nu
        Na = -nl(a)
        b = self.E2 * U + self.Q * Na
        Nb = -nl(b)
        c = self.E2 * a + self.Q * (2 * Nb - Nu)
        Nc = -nl(c)
        U = self.E * U + self.f1 * Nu + 2 * self.f2 * (Na + Nb) + self.f3 * Nc
        return hermitian_symmetrize(U)


def _initial_coeffs(u0: Field, ops: _Ops, nonlinear: bool) -> np.ndarray:
    if nonlinear:
        return hermitian_symmetrize(ops.mask * fwd_array(_real_field(u0, "u0")))
    return to_spectral(u0).copy()


def _precheck(u0: Field, cfg: SolverConfig):
    if not u0.is_finite():
        raise ValueError("initial data contain non-finite values")
    check_tail(u0)
    if not cfg.override_time:
        tl = local_time(u0, cfg)
        if cfg.T > tl * (1 + 1e-12):
            raise ValueError(
                f"T={cfg.T} exceeds local_time={tl:.6g}; pass override_time to run anyway"
            )


def integrate(u0: Field, t: float, steps: int, k: int = 1, *, nonlinear: bool = True) -> Field:
    """Final state after ``steps`` ETDRK4 steps of size ``t/steps``; ``t`` may be negative."""
    ops = _Ops(u0.grid, k)
    U = _initial_coeffs(u0, ops, nonlinear)
    st = _Stepper(ops, t / steps, nonlinear)
    for _ in range(steps):
        U = st.step(U)
    out = inv_array(U)
    return Field(u0.grid, out.real if nonlinear else out, "physical")


def evolve(u0: Field, cfg: SolverConfig) -> Trajectory:
    """ETDRK4 trajectory on ``cfg.times``.

    Without the nonlinearity each step is the exact group, so the samples
    coincide with ``propagate(u0, t_m)``.
    """
    _precheck(u0, cfg)
    ops = _Ops(u0.grid, cfg.k)
    U = _initial_coeffs(u0, ops, cfg.nonlinear)
    st = _Stepper(ops, cfg.dt, cfg.nonlinear)
    dtype = float if cfg.nonlinear else complex
    data = np.empty((cfg.steps + 1,) + u0.grid.shape, dtype=dtype)
    norm0 = np.sqrt(np.sum(np.abs(U) ** 2))
    data[0] = inv_array(U).real if cfg.nonlinear else inv_array(U)
    for m in range(1, cfg.steps + 1):
        U = st.step(U)
        nrm = np.sqrt(np.sum(np.abs(U) ** 2))
        if not np.isfinite(nrm) or nrm > cfg.growth_guard * max(norm0, 1e-300):
            raise InstabilityError(f"norm grew by more than {cfg.growth_guard:g} at step {m}")
        data[m] = inv_array(U).real if cfg.nonlinear else inv_array(U)
    return Trajectory(u0.grid, cfg.times, data)


# -- Picard iteration ---------------------------------------------------------


def _cumulative_simpson(f: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order running integrals ``int_0^{t_m} f`` along axis 0.

    Composite Simpson at even ``m``, Simpson 3/8 on the last three intervals
    at odd ``m >= 3``, and a three-point rule on the first interval.
    """
    M = f.shape[0] - 1
    out = np.zeros_like(f)
    if M == 0:
        return out
    if M == 1:
        out[1] = h / 2 * (f[0] + f[1])
        return out
    out[1] = h / 12 * (5 * f[0] + 8 * f[1] - f[2])
    for m in range(2, M + 1, 2):
        out[m] = out[m - 2] + h / 3 * (f[m - 2] + 4 * f[m - 1] + f[m])
    for m in range(3, M + 1, 2):
        out[m] = out[m - 3] + 3 * h / 8 * (f[m - 3] + 3 * f[m - 2] + 3 * f[m - 1] + f[m])
    return out


def _duhamel_coeffs(U: np.ndarray, U0: np.ndarray, ops: _Ops, times: np.ndarray, h: float):
    """Spectral ``Psi(u)`` on every sample; ``U`` has shape ``(M+1, nx, ny)``."""
    Wm = ops.group(times)
    integrand = np.conj(Wm) * ops.nl(U)
    J = _cumulative_simpson(integrand, h)
    return hermitian_symmetrize(Wm * (U0[None] - J))


def _sup_hs_diff(A: np.ndarray, B: np.ndarray, grid: GridSpec, s: float) -> float:
    a = np.sqrt(grid.area)
    D = np.abs(A - B) ** 2
    p = D.sum(axis=2)
    q = D.sum(axis=1)
    vals = a * (
        np.sqrt(p.sum(axis=1))
        + np.sqrt((np.abs(grid.xi) ** (2 * s) * p).sum(axis=1))
        + np.sqrt((np.abs(grid.eta) ** (2 * s) * q).sum(axis=1))
    )
    return float(vals.max())


def _to_traj(U: np.ndarray, grid: GridSpec, times: np.ndarray) -> Trajectory:
    return Trajectory(grid, times, inv_array(U).real)


def picard_solve(u0: Field, cfg: SolverConfig):
    """Fixed point of the Duhamel map by Picard iteration.

    Starts from ``u^(0)(t) = W(t) u0`` and applies ``Psi`` until the sup in
    time of the ``H^s`` difference of successive iterates drops below
    ``cfg.picard_tol``.

    Returns
    -------
    traj : Trajectory
        The last iterate.
    history : list of float
        ``sup_t ||u^(n+1) - u^(n)||_{H^s}`` for ``n = 0, 1, ...``.
    """
    _precheck(u0, cfg)
    ops = _Ops(u0.grid, cfg.k)
    U0 = _initial_coeffs(u0, ops, True)
    times = cfg.times
    U = ops.group(times) * U0[None]
    history = []
    for _ in range(cfg.picard_max_iter):
        Unew = _duhamel_coeffs(U, U0, ops, times, cfg.dt)
        diff = _sup_hs_diff(Unew, U, u0.grid, cfg.s)
        history.append(diff)
        U = Unew
        if not np.isfinite(diff):
            break
        if diff < cfg.picard_tol:
            return _to_traj(U, u0.grid, times), history
    raise NonConvergenceError(
        f"Picard iteration did not reach {cfg.picard_tol:g} in {len(history)} iterations; "
        "shorten T",
        history,
    )


def duhamel(u0: Field, traj: Trajectory, cfg: SolverConfig) -> Trajectory:
    """``Psi(u)`` sampled on the trajectory times."""
    ops = _Ops(u0.grid, cfg.k)
    U0 = _initial_coeffs(u0, ops, True)
    U = ops.mask * fwd_array(np.asarray(traj.data))
    return _to_traj(_duhamel_coeffs(U, U0, ops, traj.times, traj.dt), u0.grid, traj.times)


def fixed_point_residual(u0: Field, traj: Trajectory, cfg: SolverConfig) -> float:
    """``sup_t ||u(t) - Psi(u)(t)||_{H^s}``."""
    ops = _Ops(u0.grid, cfg.k)
    U0 = _initial_coeffs(u0, ops, True)
    U = ops.mask * fwd_array(np.asarray(traj.data))
    P = _duhamel_coeffs(U, U0, ops, traj.times, traj.dt)
    return _sup_hs_diff(P, U, u0.grid, cfg.s)


# -- conserved quantities -----------------------------------------------------


def invariants(u: Field, k: int, t: float = 0.0) -> InvariantRecord:
    """Mass ``int u^2`` and energy ``int |grad u|^2/2 - u^(k+2)/((k+1)(k+2))``."""
    g = u.grid
    v = _real_field(u)
    V = fwd_array(v)
    XI, ETA = g.modes()
    grad2 = g.area * np.sum((XI**2 + ETA**2) * np.abs(V) ** 2)
    cell = g.dx * g.dy
    mass = cell * np.sum(v**2)
    energy = 0.5 * grad2 - cell * np.sum(v ** (k + 2)) / ((k + 1) * (k + 2))
    return InvariantRecord(float(mass), float(energy), float(t))


def trajectory_invariants(traj: Trajectory, k: int) -> list[InvariantRecord]:
    return [invariants(f, k, t) for f, t in zip(traj, traj.times)]

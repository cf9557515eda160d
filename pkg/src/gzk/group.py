"""The unitary group of the linearized equation ``u_t + d_x Lap u = 0``.

In Fourier variables the linear flow multiplies by ``exp(i t phi)`` with
``phi(xi, eta) = xi**3 + xi*eta**2``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grid import Field, GridSpec, inv_array, to_spectral

__all__ = ["phase", "symbol", "grid_phase", "propagator", "propagate", "propagate_array"]


def phase(xi, eta):
    """Dispersion phase ``xi**3 + xi*eta**2``, odd under ``(xi, eta) -> -(xi, eta)``."""
    return xi**3 + xi * eta**2


def symbol(xi, eta, t):
    """Multiplier ``exp(i t phi(xi, eta))`` of the group at time ``t``."""
    return np.exp(1j * t * phase(xi, eta))


@lru_cache(maxsize=16)
def grid_phase(grid: GridSpec) -> np.ndarray:
    """``phi`` on the grid modes, zero on the x-Nyquist column (odd in xi)."""
    XI, ETA = grid.modes()
    ph = phase(XI, ETA)
    ph[grid.nyquist_x, :] = 0.0
    ph.flags.writeable = False
    return ph


@lru_cache(maxsize=32)
def _cached_propagator(grid: GridSpec, t: float) -> np.ndarray:
    out = np.exp(1j * t * grid_phase(grid))
    out.flags.writeable = False
    return out


def propagator(grid: GridSpec, t: float) -> np.ndarray:
    """``exp(i t phi)`` on the grid modes (read-only, cached per grid and time)."""
    return _cached_propagator(grid, float(t))


def propagate_array(U: np.ndarray, grid: GridSpec, t: float) -> np.ndarray:
    """Apply the group to a raw coefficient array (last two axes)."""
    return U * propagator(grid, t)


def propagate(u: Field, t: float) -> Field:
    """Evolve ``u`` by the linear group for time ``t``.

    The result has the same representation tag as ``u``.
    """
    if not np.isfinite(t):
        raise ValueError(f"time must be finite, got {t!r}")
    if not u.is_finite():
        raise ValueError("field contains non-finite values")
    U = propagate_array(to_spectral(u), u.grid, t)
    if u.is_physical:
        return Field(u.grid, inv_array(U), "physical")
    return Field(u.grid, U, "spectral")

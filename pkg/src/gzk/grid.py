"""Periodic grid, Field container, transforms and dealiasing.

Conventions
-----------
Physical coordinates are box centred, ``x_n = -lx/2 + n*lx/nx``. Arrays are
indexed ``[ix, iy]`` so axis 0 is ``x`` and axis 1 is ``y``.

Spectral coefficients are stored in numpy FFT order and defined by

    u(x, y) = sum_{j,l} U[j, l] exp(i (xi_j x + eta_l y)),

so ``forward`` carries the factor ``1/(nx*ny)`` and ``inverse`` carries none.
The discrete norms are

    ||u||_2^2 = dx*dy * sum |u|^2 = lx*ly * sum |U|^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import BoundaryTailError, RepresentationError

__all__ = [
    "GridSpec",
    "Field",
    "make_grid",
    "forward",
    "inverse",
    "dealias",
    "dealias_cutoff",
    "dealias_mask",
    "hermitian_symmetrize",
    "tail_fraction",
    "check_tail",
    "TAIL_SHELL",
    "TAIL_THRESHOLD",
]

#: Points with ``|x| >= TAIL_SHELL*lx`` or ``|y| >= TAIL_SHELL*ly`` form the monitored shell.
TAIL_SHELL = 0.4
#: Largest admissible fraction of L2 mass inside the shell.
TAIL_THRESHOLD = 1e-6

Representation = Literal["physical", "spectral"]


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a doubly periodic box.

    Parameters
    ----------
    nx, ny : int
        Samples per axis, powers of two and at least 8.
    lx, ly : float
        Side lengths.
    """

    nx: int
    ny: int
    lx: float
    ly: float

    def __post_init__(self):
        for name in ("nx", "ny"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or not _is_pow2(int(n)) or n < 8:
                raise ValueError(f"{name}={n!r} must be a power of two and at least 8")
        for name in ("lx", "ly"):
            length = getattr(self, name)
            if not np.isfinite(length) or length <= 0:
                raise ValueError(f"{name}={length!r} must be a positive finite length")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))
        object.__setattr__(self, "lx", float(self.lx))
        object.__setattr__(self, "ly", float(self.ly))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @property
    def dxi(self) -> float:
        return 2 * np.pi / self.lx

    @property
    def deta(self) -> float:
        return 2 * np.pi / self.ly

    @property
    def area(self) -> float:
        return self.lx * self.ly

    @cached_property
    def x(self) -> np.ndarray:
        return -self.lx / 2 + self.dx * np.arange(self.nx)

    @cached_property
    def y(self) -> np.ndarray:
        return -self.ly / 2 + self.dy * np.arange(self.ny)

    @cached_property
    def jx(self) -> np.ndarray:
        """Integer mode indices along x in FFT order."""
        return np.fft.fftfreq(self.nx, 1.0 / self.nx).astype(int)

    @cached_property
    def jy(self) -> np.ndarray:
        return np.fft.fftfreq(self.ny, 1.0 / self.ny).astype(int)

    @cached_property
    def xi(self) -> np.ndarray:
        return self.dxi * self.jx

    @cached_property
    def eta(self) -> np.ndarray:
        return self.deta * self.jy

    @cached_property
    def nyquist_x(self) -> np.ndarray:
        """True at the x-Nyquist column, excluded from odd multipliers."""
        return self.jx == -self.nx // 2

    @cached_property
    def nyquist_y(self) -> np.ndarray:
        return self.jy == -self.ny // 2

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Physical coordinate arrays of shape ``(nx, ny)``."""
        return np.meshgrid(self.x, self.y, indexing="ij")

    def modes(self) -> tuple[np.ndarray, np.ndarray]:
        """Frequency arrays of shape ``(nx, ny)`` in FFT order."""
        return np.meshgrid(self.xi, self.eta, indexing="ij")

    def axis_length(self, axis: int) -> float:
        return (self.lx, self.ly)[axis]

    def axis_size(self, axis: int) -> int:
        return (self.nx, self.ny)[axis]

    def axis_modes(self, axis: int) -> np.ndarray:
        return (self.xi, self.eta)[axis]


def make_grid(nx: int, ny: int, lx: float, ly: float) -> GridSpec:
    """Build a validated :class:`GridSpec`."""
    return GridSpec(nx, ny, lx, ly)


@dataclass(frozen=True, eq=False)
class Field:
    """Samples or spectral coefficients of a function on a grid.

    The value array is copied to complex128 and made read-only.
    """

    grid: GridSpec
    values: np.ndarray
    kind: Representation = "physical"

    def __post_init__(self):
        if self.kind not in ("physical", "spectral"):
            raise ValueError(f"unknown representation {self.kind!r}")
        v = np.array(self.values, dtype=np.complex128, copy=True)
        if v.shape != self.grid.shape:
            raise ValueError(f"values have shape {v.shape}, grid expects {self.grid.shape}")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def physical(cls, grid: GridSpec, values) -> "Field":
        return cls(grid, values, "physical")

    @classmethod
    def spectral(cls, grid: GridSpec, values) -> "Field":
        return cls(grid, values, "spectral")

    @classmethod
    def from_function(cls, grid: GridSpec, func) -> "Field":
        """Sample ``func(X, Y)`` on the grid."""
        X, Y = grid.mesh()
        return cls(grid, func(X, Y), "physical")

    @property
    def is_physical(self) -> bool:
        return self.kind == "physical"

    def with_values(self, values) -> "Field":
        return Field(self.grid, values, self.kind)

    def norm(self) -> float:
        """Discrete L2 norm, in either representation."""
        g = self.grid
        w = g.dx * g.dy if self.is_physical else g.area
        return float(np.sqrt(w * np.sum(np.abs(self.values) ** 2)))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))

    def _compatible(self, other: "Field"):
        if other.grid != self.grid or other.kind != self.kind:
            raise RepresentationError("fields live on different grids or representations")

    def __add__(self, other):
        if isinstance(other, Field):
            self._compatible(other)
            return self.with_values(self.values + other.values)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, Field):
            self._compatible(other)
            return self.with_values(self.values - other.values)
        return NotImplemented

    def __mul__(self, other):
        if np.isscalar(other):
            return self.with_values(self.values * other)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)


def _require(f: Field, kind: str, op: str):
    if f.kind != kind:
        raise RepresentationError(f"{op} expects a {kind} field, got {f.kind}")


def fwd_array(v: np.ndarray) -> np.ndarray:
    """Forward transform over the last two axes of a raw array."""
    nx, ny = v.shape[-2:]
    return np.fft.fft2(np.fft.ifftshift(v, axes=(-2, -1))) / (nx * ny)


def inv_array(V: np.ndarray) -> np.ndarray:
    """Inverse transform over the last two axes of a raw array."""
    nx, ny = V.shape[-2:]
    return np.fft.fftshift(np.fft.ifft2(V), axes=(-2, -1)) * (nx * ny)


def forward(f: Field) -> Field:
    """Physical samples to spectral coefficients."""
    _require(f, "physical", "forward")
    return Field(f.grid, fwd_array(f.values), "spectral")


def inverse(F: Field) -> Field:
    """Spectral coefficients to physical samples."""
    _require(F, "spectral", "inverse")
    return Field(F.grid, inv_array(F.values), "physical")


def to_spectral(f: Field) -> np.ndarray:
    """Spectral coefficient array of ``f`` whatever its tag."""
    return f.values if f.kind == "spectral" else fwd_array(f.values)


def to_physical(f: Field) -> np.ndarray:
    return f.values if f.kind == "physical" else inv_array(f.values)


def dealias_cutoff(n: int, product_degree: int) -> float:
    """Modes with ``|j| >= n/(p+1)`` are removed."""
    if product_degree < 2:
        raise ValueError(f"product degree must be at least 2, got {product_degree}")
    return n / (product_degree + 1)


def dealias_mask(grid: GridSpec, product_degree: int) -> np.ndarray:
    """Boolean mask of retained modes, shape ``(nx, ny)``."""
    kx = np.abs(grid.jx) < dealias_cutoff(grid.nx, product_degree)
    ky = np.abs(grid.jy) < dealias_cutoff(grid.ny, product_degree)
    return kx[:, None] & ky[None, :]


def dealias(F: Field, product_degree: int) -> Field:
    """Zero the modes that a degree-``p`` product would alias back.

    Retaining ``|j| < n/(p+1)`` per axis keeps every product of ``p`` retained
    modes inside the band after wrap-around; ``p = 2`` is the 2/3 rule.
    """
    _require(F, "spectral", "dealias")
    return F.with_values(np.where(dealias_mask(F.grid, product_degree), F.values, 0))


def hermitian_symmetrize(U: np.ndarray) -> np.ndarray:
    """Project coefficient arrays onto the spectra of real fields.

    Works on the last two axes; index ``-j`` in FFT order is ``(-j) mod n``.
    """
    flipped = np.roll(np.flip(U, axis=(-2, -1)), shift=(1, 1), axis=(-2, -1))
    return 0.5 * (U + np.conj(flipped))


def _shell_mask(grid: GridSpec) -> np.ndarray:
    sx = np.abs(grid.x) >= TAIL_SHELL * grid.lx
    sy = np.abs(grid.y) >= TAIL_SHELL * grid.ly
    return sx[:, None] | sy[None, :]


def tail_fraction(f: Field) -> float:
    """Fraction of L2 mass in the outer shell ``|x| >= 0.4 lx`` or ``|y| >= 0.4 ly``."""
    v = np.abs(to_physical(f)) ** 2
    total = v.sum()
    if total == 0:
        return 0.0
    return float(v[_shell_mask(f.grid)].sum() / total)


def check_tail(f: Field, threshold: float = TAIL_THRESHOLD) -> float:
    """Return the tail fraction, raising :class:`BoundaryTailError` above threshold."""
    frac = tail_fraction(f)
    if frac > threshold:
        raise BoundaryTailError(frac, threshold)
    return frac

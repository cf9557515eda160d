"""Fractional derivatives, directional Stein derivatives and the Phi operators.

Three routes to the same order-``alpha`` derivative along one axis live here:

* ``frac_deriv_x`` / ``frac_deriv_y`` multiply by ``|xi|^alpha``.
* ``stein_deriv`` evaluates the singular difference integral

      (1/d) * int (u(x + y e_j) - u(x)) |y|^(-1-alpha) dy

  by physical-space quadrature, where ``d`` is calibrated so the two agree.
* ``phi_operator`` evaluates the correction that appears when a fractional
  weight ``|x|^alpha`` is commuted past the group. In Fourier variables it is
  a singular sum over frequency shifts ``tau``.

On the periodic box the difference integral runs over one period with the
periodized kernel ``sum_m |y + m L|^(-1-alpha)``. This is the operator whose
symbol on the torus is exactly ``d |xi|^alpha``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma, roots_jacobi, roots_legendre, zeta

from .errors import RepresentationError
from .grid import Field, GridSpec, inv_array, to_spectral
from .group import grid_phase, phase

__all__ = [
    "frac_deriv",
    "frac_deriv_x",
    "frac_deriv_y",
    "stein_constant",
    "gamma_ratio_constant",
    "SteinQuadrature",
    "DEFAULT_QUADRATURE",
    "stein_deriv",
    "lattice_kernel",
    "phi_operator",
    "phi_physical",
]


def _axis(direction) -> int:
    if direction in (0, "x"):
        return 0
    if direction in (1, "y"):
        return 1
    raise ValueError(f"direction must be 'x'/'y' or 0/1, got {direction!r}")


def _check_order(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha={alpha} must lie in (0, 1)")


def _abs_pow(v: np.ndarray, alpha: float) -> np.ndarray:
    # 0**0 = 1 keeps alpha = 0 the identity
    return np.abs(v) ** alpha


def frac_deriv(u: Field, axis, alpha: float) -> Field:
    """Multiply by ``|xi_j|^alpha`` along ``axis``; keeps the representation tag."""
    if alpha < 0:
        raise ValueError(f"alpha={alpha} must be non-negative")
    ax = _axis(axis)
    g = u.grid
    m = _abs_pow(g.axis_modes(ax), alpha)
    m = m[:, None] if ax == 0 else m[None, :]
    U = to_spectral(u) * m
    if u.is_physical:
        return Field(g, inv_array(U), "physical")
    return Field(g, U, "spectral")


def frac_deriv_x(u: Field, alpha: float) -> Field:
    """``D_x^alpha u``, the multiplier ``|xi|^alpha``."""
    return frac_deriv(u, 0, alpha)


def frac_deriv_y(u: Field, alpha: float) -> Field:
    """``D_y^alpha u``, the multiplier ``|eta|^alpha``."""
    return frac_deriv(u, 1, alpha)


def stein_constant(alpha: float) -> float:
    """Closed form of ``int (cos u - 1) |u|^(-1-alpha) du = 2 Gamma(-alpha) cos(pi alpha / 2)``.

    Negative for ``alpha`` in (0, 1). Used only as a cross-check of the
    calibrated constant.
    """
    _check_order(alpha)
    return float(2 * gamma(-alpha) * np.cos(np.pi * alpha / 2))


def gamma_ratio_constant(alpha: float, n: int = 1) -> float:
    """The normalisation ``pi^(n/2) 2^(-alpha) Gamma(-alpha/2) / Gamma((n+2)/2)``.

    Recorded for comparison. It does not reproduce :func:`stein_constant` and
    is never used to normalise an operator.
    """
    return float(np.pi ** (n / 2) * 2.0 ** (-alpha) * gamma(-alpha / 2) / gamma((n + 2) / 2))


# -- physical-space quadrature ------------------------------------------------


def _kper_smooth(y, length, alpha):
    """Periodized kernel minus its singular term, for ``|y| < length``."""
    q = np.abs(y) / length
    return length ** (-1 - alpha) * (zeta(1 + alpha, 1 + q) + zeta(1 + alpha, 1 - q))


def _kper(y, length, alpha):
    return np.abs(y) ** (-1 - alpha) + _kper_smooth(y, length, alpha)


@dataclass(frozen=True)
class SteinQuadrature:
    """Quadrature rule for the one-dimensional Stein integral.

    The symmetrized integrand ``u(x+y) + u(x-y) - 2u(x)`` is integrated over
    ``0 < y < Y``. On ``[0, h]`` a Gauss-Jacobi rule absorbs ``y^(1-alpha)``
    and the remaining factor ``G(y)/y^2`` is smooth. Beyond ``h`` graded
    Gauss-Legendre panels double in width up to ``max_panel``.

    Parameters
    ----------
    inner : float
        Inner cutoff ``h``.
    outer : float or None
        Outer cutoff ``Y``; ``None`` means half the box, which covers the full
        period of the periodized kernel.
    nodes_per_panel : int
        Gauss points per panel.
    max_panel : float or None
        Largest panel width; ``None`` picks ``8/xi_max`` so every panel
        resolves the highest grid frequency.
    lattice_order : int
        Number of near-zero correction weights in the frequency-shift sum of
        :func:`phi_operator`.
    """

    inner: float = 0.5
    outer: float | None = None
    nodes_per_panel: int = 16
    max_panel: float | None = None
    lattice_order: int = 8
    _calibration: dict = field(default_factory=dict, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.inner > 0:
            raise ValueError(f"inner cutoff h={self.inner} must be positive")
        if self.outer is not None and not self.inner < self.outer:
            raise ValueError(f"cutoffs must satisfy h < Y, got h={self.inner}, Y={self.outer}")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be at least 2")
        if self.lattice_order < 0:
            raise ValueError("lattice_order must be non-negative")

    def nodes(self, length: float, alpha: float, xi_max: float):
        """Nodes and kernel-weighted weights for a box of side ``length``.

        Returns
        -------
        (yj, wj), (ys, ws)
            Jacobi nodes with weights for ``G(y)/y^2`` and Legendre nodes with
            weights that already include the kernel.
        """
        _check_order(alpha)
        h = self.inner
        Y = length / 2 if self.outer is None else self.outer
        if not h < Y:
            raise ValueError(f"cutoffs must satisfy h < Y, got h={h}, Y={Y}")
        if Y > length / 2:
            raise ValueError(f"outer cutoff Y={Y} exceeds half the box {length / 2}")
        n = self.nodes_per_panel
        xj, wj = roots_jacobi(n, 0.0, 1.0 - alpha)
        yj = h * (1 + xj) / 2
        wj = wj * (h / 2) ** (2 - alpha)
        maxw = self.max_panel if self.max_panel is not None else 8.0 / xi_max
        edges = [0.0, h]
        w = h
        while edges[-1] < Y * (1 - 1e-14):
            w = min(2 * w, max(maxw, h))
            edges.append(min(edges[-1] + w, Y))
        xl, wl = roots_legendre(n)
        lo, hi = np.array(edges[:-1]), np.array(edges[1:])
        ys = ((hi - lo)[:, None] * (xl + 1) / 2 + lo[:, None]).ravel()
        ws = ((hi - lo)[:, None] * wl / 2).ravel()
        inner_panel = ys < h
        ws = ws * np.where(inner_panel, _kper_smooth(ys, length, alpha), _kper(ys, length, alpha))
        if Y < length / 2:
            # the truncated range only contributes its -2u(x) part
            xt, wt = roots_legendre(n)
            yt = (length / 2 - Y) * (xt + 1) / 2 + Y
            self_weight = np.sum(wt * (length / 2 - Y) / 2 * _kper(yt, length, alpha))
            ys = np.append(ys, np.inf)
            ws = np.append(ws, self_weight)
        return (yj, wj), (ys, ws)

    def raw_symbol(self, xi: np.ndarray, length: float, alpha: float) -> np.ndarray:
        """Symbol of the uncalibrated quadrature operator at frequencies ``xi``."""
        xi = np.asarray(xi, dtype=float)
        xi_max = max(np.max(np.abs(xi)), 1e-300)
        (yj, wj), (ys, ws) = self.nodes(length, alpha, xi_max)
        near = (2 * (np.cos(np.outer(xi, yj)) - 1) / yj**2) @ wj
        finite = np.isfinite(ys)
        far = (2 * (np.cos(np.outer(xi, ys[finite])) - 1)) @ ws[finite]
        far = far - 2 * np.sum(ws[~finite])
        return near + far

    def calibrate(self, grid: GridSpec, axis, alpha: float) -> float:
        """Constant ``d`` matching the quadrature to ``|xi|^alpha`` on a reference Gaussian.

        The fit is a least-squares scalar on the Gaussian ``exp(-x^2/(2 sigma^2))``
        with ``sigma = L/20`` along the chosen axis. Results are cached per
        ``(axis, alpha, L, n)``.
        """
        _check_order(alpha)
        ax = _axis(axis)
        length, n = grid.axis_length(ax), grid.axis_size(ax)
        key = (ax, float(alpha), length, n)
        if key not in self._calibration:
            self._calibration[key] = _calibrate_line(self, length, n, alpha)
        return self._calibration[key][0]

    def calibration_residual(self, grid: GridSpec, axis, alpha: float) -> float:
        self.calibrate(grid, axis, alpha)
        ax = _axis(axis)
        key = (ax, float(alpha), grid.axis_length(ax), grid.axis_size(ax))
        return self._calibration[key][1]


def _calibrate_line(quad: SteinQuadrature, length: float, n: int, alpha: float):
    x = -length / 2 + length * np.arange(n) / n
    xi = 2 * np.pi * np.fft.fftfreq(n, d=length / n)
    sigma = length / 20
    U = np.fft.fft(np.fft.ifftshift(np.exp(-0.5 * (x / sigma) ** 2)))
    raw = np.fft.ifft(quad.raw_symbol(xi, length, alpha) * U)
    ref = np.fft.ifft(np.abs(xi) ** alpha * U)
    d = float(np.real(np.vdot(ref, raw)) / np.real(np.vdot(ref, ref)))
    resid = float(np.linalg.norm(raw / d - ref) / np.linalg.norm(ref))
    if resid > 1e-3:
        raise RuntimeError(
            f"Stein calibration residual {resid:.2e} exceeds 1e-3; refine the quadrature"
        )
    return d, resid


DEFAULT_QUADRATURE = SteinQuadrature()


def _shift_multiplier(xi: np.ndarray, y: float, n: int) -> np.ndarray:
    """``exp(i xi y)`` with the Nyquist entry replaced by ``cos`` to keep real data real."""
    m = np.exp(1j * xi * y)
    m[n // 2] = np.cos(xi[n // 2] * y)
    return m


def _expand(v: np.ndarray, ax: int) -> np.ndarray:
    return v[:, None] if ax == 0 else v[None, :]


def _axis_coeffs(values: np.ndarray, ax: int) -> np.ndarray:
    return np.fft.fft(np.fft.ifftshift(values, axes=ax), axis=ax)


def _axis_values(coeffs: np.ndarray, ax: int) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifft(coeffs, axis=ax), axes=ax)


def stein_deriv(
    u: Field,
    direction,
    alpha: float,
    q: SteinQuadrature | None = None,
    *,
    method: str = "symbol",
) -> Field:
    """Directional Stein derivative by quadrature of the difference integral.

    Parameters
    ----------
    u : Field
        Input in either representation; the result is physical.
    direction : {'x', 'y', 0, 1}
    alpha : float
        Order in (0, 1).
    q : SteinQuadrature, optional
    method : {'symbol', 'nodes'}
        ``'nodes'`` accumulates the shifted differences node by node.
        ``'symbol'`` sums the same weights into a Fourier multiplier first,
        which is the identical sum in a different order and much cheaper.
    """
    _check_order(alpha)
    q = DEFAULT_QUADRATURE if q is None else q
    ax = _axis(direction)
    g = u.grid
    length, n = g.axis_length(ax), g.axis_size(ax)
    xi = g.axis_modes(ax)
    d = q.calibrate(g, ax, alpha)
    C = _axis_coeffs(np.asarray(u.values if u.is_physical else inv_array(u.values)), ax)
    if method == "symbol":
        out = _axis_values(C * _expand(q.raw_symbol(xi, length, alpha), ax), ax)
    elif method == "nodes":
        (yj, wj), (ys, ws) = q.nodes(length, alpha, np.max(np.abs(xi)))
        base = _axis_values(C, ax)
        out = np.zeros_like(base)
        for y, w, near in _node_stream(yj, wj, ys, ws):
            if not np.isfinite(y):
                out -= 2 * w * base
                continue
            plus = _axis_values(C * _expand(_shift_multiplier(xi, y, n), ax), ax)
            minus = _axis_values(C * _expand(_shift_multiplier(xi, -y, n), ax), ax)
            G = plus + minus - 2 * base
            out += w * (G / y**2 if near else G)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Field(g, out / d, "physical")


def _node_stream(yj, wj, ys, ws):
    for y, w in zip(yj, wj):
        yield y, w, True
    for y, w in zip(ys, ws):
        yield y, w, False


def phi_physical(
    f: Field,
    direction,
    t: float,
    alpha: float,
    q: SteinQuadrature | None = None,
) -> Field:
    """Physical-space Phi: ``(1/d) int (e^{it(phi(x+y e_j) - phi(x))} - 1) f(x+y e_j) K(y) dy``.

    ``phi`` is the dispersion polynomial evaluated at wrapped box coordinates,
    so the shift lives on the same torus as :func:`stein_deriv`. With
    ``g = exp(i t phi)`` one has ``D(g f) = g D f + g Phi(f)``.
    """
    _check_order(alpha)
    q = DEFAULT_QUADRATURE if q is None else q
    ax = _axis(direction)
    g = f.grid
    length, n = g.axis_length(ax), g.axis_size(ax)
    xi = g.axis_modes(ax)
    d = q.calibrate(g, ax, alpha)
    X, Y = g.mesh()
    C = _axis_coeffs(np.asarray(f.values if f.is_physical else inv_array(f.values)), ax)
    ph0 = phase(X, Y)

    def wrap(z):
        return (z + length / 2) % length - length / 2

    def shifted(y):
        fy = _axis_values(C * _expand(_shift_multiplier(xi, y, n), ax), ax)
        ph = phase(wrap(X + y), Y) if ax == 0 else phase(X, wrap(Y + y))
        theta = t * (ph - ph0)
        diff = 2j * np.sin(theta / 2) * np.exp(0.5j * theta)
        if __debug__:
            mag = np.abs(diff)
            assert np.all(mag <= 2 + 1e-12) and np.all(mag <= np.abs(theta) * (1 + 1e-12) + 1e-300)
        return diff * fy

    (yj, wj), (ys, ws) = q.nodes(length, alpha, np.max(np.abs(xi)))
    out = np.zeros(g.shape, dtype=complex)
    for y, w, near in _node_stream(yj, wj, ys, ws):
        if not np.isfinite(y):
            continue  # the -2u(x) part carries no phase difference
        G = shifted(y) + shifted(-y)
        out += w * (G / y**2 if near else G)
    return Field(g, out / d, "physical")


# -- frequency-side Phi -------------------------------------------------------


def lattice_kernel(n: int, spacing: float, alpha: float, order: int = 8) -> np.ndarray:
    """Weights ``kappa_l`` of the singular frequency-shift sum on an ``n``-point periodic lattice.

    With these weights

        sum_l kappa_l (cos(l spacing x) - 1) ~= d |x|^alpha,  |x| < pi/spacing,

    where ``d`` is :func:`stein_constant`. The weights fold the infinite
    lattice onto the period via Hurwitz zeta sums and add ``order`` local
    corrections at ``l = +-1..order`` that cancel the leading even-power
    error terms ``zeta(1 + alpha - 2m) x^(2m)``.

    Returns an array in FFT order with ``kappa_0 = 0``.
    """
    _check_order(alpha)
    order = int(min(order, n // 2 - 1))
    l = np.fft.fftfreq(n, d=1.0 / n)
    kap = np.zeros(n)
    nz = l != 0
    frac = np.mod(l[nz], n) / n
    kap[nz] = n ** (-1 - alpha) * (zeta(1 + alpha, frac) + zeta(1 + alpha, 1 - frac))
    if order > 0:
        m = np.arange(1, order + 1, dtype=float)
        powers = 2 * np.arange(1, order + 1)
        A = m[None, :] ** powers[:, None]
        rhs = -zeta(1 + alpha - powers)
        om = np.linalg.solve(A, rhs)
        kap[1 : order + 1] += om
        kap[-order:] += om[::-1]
    return kap * spacing ** (-alpha)


def phi_operator(
    u_hat: Field,
    direction,
    t: float,
    alpha: float,
    q: SteinQuadrature | None = None,
    *,
    method: str = "fft",
) -> Field:
    """Spectral ``Phi_{j,t,alpha}(u_hat)``: the commutator correction in frequency variables.

    Computes ``(1/d) sum_l kappa_l (E(k + l e_j)/E(k) - 1) u_hat(k + l e_j)``
    with ``E = exp(i t phi)`` on the grid modes and ``kappa`` from
    :func:`lattice_kernel`. Shifts wrap around the periodic mode lattice,
    which is what multiplication by a periodic weight does to coefficients.

    Parameters
    ----------
    method : {'fft', 'direct'}
        ``'direct'`` loops over shifts; ``'fft'`` evaluates the same circular
        correlation with transforms along the shift axis.
    """
    if u_hat.kind != "spectral":
        raise RepresentationError("phi_operator expects a spectral field")
    _check_order(alpha)
    q = DEFAULT_QUADRATURE if q is None else q
    ax = _axis(direction)
    g = u_hat.grid
    if t == 0:
        return Field(g, np.zeros(g.shape), "spectral")
    n = g.axis_size(ax)
    spacing = (g.dxi, g.deta)[ax]
    d = q.calibrate(g, ax, alpha)
    kap = lattice_kernel(n, spacing, alpha, q.lattice_order)
    U = np.asarray(u_hat.values)
    ph = grid_phase(g)
    if method == "fft":
        E = np.exp(1j * t * ph)
        K = _expand(np.real(np.fft.fft(kap)), ax)

        def corr(a):
            return np.fft.ifft(np.fft.fft(a, axis=ax) * K, axis=ax)

        out = np.conj(E) * corr(E * U) - corr(U)
    elif method == "direct":
        out = np.zeros(g.shape, dtype=complex)
        for l in range(1, n):
            if kap[l] == 0:
                continue
            theta = t * (np.roll(ph, -l, axis=ax) - ph)
            diff = 2j * np.sin(theta / 2) * np.exp(0.5j * theta)
            if __debug__:
                mag = np.abs(diff)
                assert np.all(mag <= 2 + 1e-12) and np.all(
                    mag <= np.abs(theta) * (1 + 1e-12) + 1e-300
                )
            out += kap[l] * diff * np.roll(U, -l, axis=ax)
    else:
        raise ValueError(f"unknown method {method!r}")
    return Field(g, out / d, "spectral")

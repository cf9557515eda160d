"""Numerical checks of the weight-group commutator identities.

For a weight ``|x|^r`` the identity reads

    |x|^r W(t) u0 = W(t)(|x|^r u0) + W(t) Phi^v,

where ``Phi^v`` is the inverse transform of :func:`~gzk.fractional.phi_operator`
applied to ``u0_hat``. Both sides are evaluated separately and compared.
"""

from __future__ import annotations

import numpy as np

from .errors import AdmissibilityError
from .fractional import DEFAULT_QUADRATURE, SteinQuadrature, frac_deriv, phi_operator
from .grid import Field, check_tail, forward, inverse, tail_fraction, to_physical
from .group import propagate
from .norms import hs_norm, weighted_l2
from .params import WeightParams
from .report import NormReport

__all__ = ["commutator_terms", "commutator_check", "commutator_check_beta"]

_DIRS = (("x", 0), ("y", 1))


def _rel(a: Field, b: Field) -> float:
    den = a.norm()
    return 0.0 if den == 0 else (a - b).norm() / den


def _weight(u: Field, axis: int, r: float) -> Field:
    g = u.grid
    c = np.abs(g.x if axis == 0 else g.y) ** r
    c = c[:, None] if axis == 0 else c[None, :]
    return Field(g, to_physical(u) * c, "physical")


def _prepare(u0: Field, w: WeightParams, check: bool) -> Field:
    u0 = u0 if u0.is_physical else inverse(u0)
    if not u0.is_finite():
        raise ValueError("initial data contain non-finite values")
    if check:
        check_tail(u0)
    z = hs_norm(u0, w.s) + weighted_l2(u0, w.r1, w.r2, tail_check=False)
    if not np.isfinite(z):
        raise ValueError("initial data have infinite weighted norm")
    return u0


def commutator_terms(u0: Field, t: float, axis: int, r: float, q: SteinQuadrature | None = None):
    """Return ``(lhs, weighted_rhs, phi_rhs, phi_v)`` for one direction.

    ``lhs = |x_j|^r W(t) u0``, ``weighted_rhs = W(t)(|x_j|^r u0)``,
    ``phi_v`` is the inverse transform of ``Phi(u0_hat)`` and
    ``phi_rhs = W(t) phi_v``.
    """
    wt = propagate(u0, t)
    lhs = _weight(wt, axis, r)
    weighted_rhs = propagate(_weight(u0, axis, r), t)
    phi_v = inverse(phi_operator(forward(u0), axis, t, r, q))
    return lhs, weighted_rhs, propagate(phi_v, t), phi_v


def commutator_check(
    u0: Field,
    t: float,
    w: WeightParams,
    q: SteinQuadrature | None = None,
    *,
    tail_check: bool = True,
) -> NormReport:
    """Residuals and bound ratios of the identity in both directions.

    Report keys per direction ``j`` in ``{x, y}``: ``residual_j`` (relative L2
    norm of LHS - RHS), ``phi_norm_j`` and ``bound_ratio_j``, the latter being
    ``||Phi^v|| / ((1+|t|) hs_norm(u0, s))``. ``tail`` is the boundary tail of
    ``W(t) u0``.

    With ``tail_check=False`` the boundary monitor only reports; this is used
    to measure residuals in regimes the monitor would reject.
    """
    q = DEFAULT_QUADRATURE if q is None else q
    u0 = _prepare(u0, w, tail_check)
    tail = tail_fraction(propagate(u0, t))
    if tail_check:
        check_tail(propagate(u0, t))
    hs = hs_norm(u0, w.s)
    values = {}
    for name, ax in _DIRS:
        r = (w.r1, w.r2)[ax]
        lhs, wr, pr, pv = commutator_terms(u0, t, ax, r, q)
        values[f"residual_{name}"] = _rel(lhs, wr + pr)
        values[f"phi_norm_{name}"] = pv.norm()
        values[f"bound_ratio_{name}"] = pv.norm() / ((1 + abs(t)) * hs) if hs > 0 else 0.0
    values["tail"] = tail
    meta = {"t": float(t), "grid": list(u0.grid.shape) + [u0.grid.lx, u0.grid.ly],
            "s": w.s, "r1": w.r1, "r2": w.r2}
    return NormReport(values, meta)


def commutator_check_beta(
    u0: Field,
    t: float,
    w: WeightParams,
    q: SteinQuadrature | None = None,
    *,
    tail_check: bool = True,
) -> NormReport:
    """The identity after a further directional derivative ``D_j^beta``.

    ``D_x^beta(|x|^r1 W u0) = W D_x^beta(|x|^r1 u0) + W D_x^beta Phi^v`` and the
    analogue in ``y``. The bound ratio divides ``||D_j^beta Phi^v||`` by
    ``(1+|t|)(||u0|| + ||D_x^(beta+s) u0|| + ||D_y^(beta+s) u0||)``.
    """
    if not 0 < w.beta < min(w.r1, w.r2):
        raise AdmissibilityError(
            f"beta={w.beta} violates beta in (0, min{{r1,r2}})=(0, {min(w.r1, w.r2)})"
        )
    q = DEFAULT_QUADRATURE if q is None else q
    u0 = _prepare(u0, w, tail_check)
    tail = tail_fraction(propagate(u0, t))
    if tail_check:
        check_tail(propagate(u0, t))
    b = w.beta
    den = (1 + abs(t)) * (
        u0.norm() + frac_deriv(u0, 0, b + w.s).norm() + frac_deriv(u0, 1, b + w.s).norm()
    )
    values = {}
    for name, ax in _DIRS:
        r = (w.r1, w.r2)[ax]
        lhs, wr, pr, pv = commutator_terms(u0, t, ax, r, q)
        lhs_b = frac_deriv(lhs, ax, b)
        rhs_b = frac_deriv(wr, ax, b) + frac_deriv(pr, ax, b)
        dphi = frac_deriv(pv, ax, b)
        values[f"residual_{name}"] = _rel(lhs_b, rhs_b)
        values[f"phi_norm_{name}"] = dphi.norm()
        values[f"bound_ratio_{name}"] = dphi.norm() / den if den > 0 else 0.0
    values["tail"] = tail
    meta = {"t": float(t), "grid": list(u0.grid.shape) + [u0.grid.lx, u0.grid.ly],
            "s": w.s, "r1": w.r1, "r2": w.r2, "beta": b}
    return NormReport(values, meta)

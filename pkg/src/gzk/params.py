"""Regularity and decay parameters with their admissibility rules."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AdmissibilityError

__all__ = ["WeightParams", "regularity_threshold"]


def regularity_threshold(k: int) -> float:
    """Sobolev threshold ``s_k``: 3/4 for ``1 <= k <= 7`` and ``1 - 2/k`` beyond."""
    if k < 1:
        raise AdmissibilityError(f"k={k} violates k >= 1")
    return 0.75 if k <= 7 else 1.0 - 2.0 / k


@dataclass(frozen=True)
class WeightParams:
    """The tuple ``(s, r1, r2, beta, k)``.

    Parameters
    ----------
    s : float
        Sobolev regularity; must satisfy ``s >= 2 max(r1, r2)`` and ``s > s_k``.
    r1, r2 : float
        Decay exponents of the weights ``|x|^r1`` and ``|y|^r2``, each in (0, 1).
    beta : float
        Extra fractional order, 0 or in ``(0, min(r1, r2))``.
    k : int
        Power of the nonlinearity.
    """

    s: float
    r1: float
    r2: float
    beta: float = 0.0
    k: int = 1

    def __post_init__(self):
        s, r1, r2, beta, k = self.s, self.r1, self.r2, self.beta, self.k
        if int(k) != k or k < 1:
            raise AdmissibilityError(f"k={k} violates: k must be an integer >= 1")
        for name, r in (("r1", r1), ("r2", r2)):
            if not 0.0 < r < 1.0:
                raise AdmissibilityError(f"{name}={r} violates r in (0,1)")
        if s < 0:
            raise AdmissibilityError(f"s={s} violates s >= 0")
        need = 2 * max(r1, r2)
        if s < need:
            raise AdmissibilityError(f"s={s} violates s >= 2*max{{r1,r2}}={need}")
        sk = regularity_threshold(int(k))
        if not s > sk:
            raise AdmissibilityError(f"s={s} violates s > s_k={sk} for k={k}")
        if beta < 0 or (beta > 0 and not beta < min(r1, r2)):
            raise AdmissibilityError(
                f"beta={beta} violates beta in (0, min{{r1,r2}})=(0, {min(r1, r2)})"
            )
        object.__setattr__(self, "k", int(k))

"""Pseudo-spectral toolkit for the generalized Zakharov-Kuznetsov equation

    u_t + d_x (u_xx + u_yy) + u^k u_x = 0

in anisotropic weighted Sobolev spaces: the linear group, fractional and
Stein derivatives, weight-group commutator checks, mixed space-time norms
and a Picard/ETDRK4 local solver.
"""

from .commutator import commutator_check, commutator_check_beta
from .errors import (
    AdmissibilityError,
    BoundaryTailError,
    GZKError,
    InstabilityError,
    NonConvergenceError,
    RepresentationError,
)
from .fractional import (
    SteinQuadrature,
    frac_deriv,
    frac_deriv_x,
    frac_deriv_y,
    phi_operator,
    phi_physical,
    stein_constant,
    stein_deriv,
)
from .grid import Field, GridSpec, check_tail, dealias, forward, inverse, make_grid, tail_fraction
from .group import phase, propagate, symbol
from .norms import (
    MixedNormSpec,
    Trajectory,
    bessel_norm,
    hs_norm,
    mixed_norm,
    mu1,
    mu2,
    weight_sum_l2,
    weighted_l2,
    z_norm,
)
from .params import WeightParams, regularity_threshold
from .report import NormReport
from .solver import (
    InvariantRecord,
    SolverConfig,
    evolve,
    invariants,
    local_time,
    nonlinearity,
    picard_solve,
)

__version__ = "0.1.0"

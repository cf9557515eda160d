"""Exception hierarchy shared by all modules."""


class GZKError(Exception):
    """Base class for all library errors."""


class RepresentationError(GZKError, ValueError):
    """A Field carries the wrong representation tag for the operation."""


class AdmissibilityError(GZKError, ValueError):
    """Parameters violate the regularity/decay constraints."""


class BoundaryTailError(GZKError, RuntimeError):
    """Too much L2 mass sits in the outer shell of the periodic box.

    The box is a stand-in for the plane, so any operation that relies on
    decay before the boundary refuses to continue.
    """

    def __init__(self, fraction, threshold):
        self.fraction = float(fraction)
        self.threshold = float(threshold)
        super().__init__(
            f"boundary tail fraction {self.fraction:.3e} exceeds {self.threshold:.1e}; "
            "enlarge the box or shorten the time window"
        )


class NonConvergenceError(GZKError, RuntimeError):
    """Picard iteration failed to reach tolerance."""

    def __init__(self, message, history=()):
        self.history = list(history)
        super().__init__(message)


class InstabilityError(GZKError, RuntimeError):
    """The time stepper blew up (norm growth beyond the guard factor)."""

"""Exception types raised across the package."""


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class DegenerateProfileError(GeometryError):
    """Meridian speed r'^2 + z'^2 vanishes somewhere on the domain."""

    def __init__(self, message, w=None):
        super().__init__(message)
        self.w = w


class ProfileFormatError(GeometryError):
    """Malformed tabulated profile input."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class SingularityError(GeometryError):
    """Evaluation at a point where a coefficient or 1 + q b(w) vanishes."""

    def __init__(self, message, w=None):
        super().__init__(message)
        self.w = w


class InadmissibleParameterError(GeometryError):
    """Mapping or deformation parameter outside its admissible set.

    ``w`` is the parameter value where the defining factor crosses zero and
    ``interval`` the admissible (lo, hi) range, when known.
    """

    def __init__(self, message, w=None, interval=None):
        super().__init__(message)
        self.w = w
        self.interval = interval


class UnsupportedRegimeError(GeometryError):
    """Requested closed form does not exist for these parameters."""


class PoleContact(Exception):
    """Raised by the geodesic right-hand side inside the pole guard band.

    Not an error: integrators catch it and stop the trace there.
    """

    def __init__(self, w):
        super().__init__(f"pole guard band entered at w={w!r}")
        self.w = w


class StepSizeUnderflow(RuntimeError):
    """Adaptive step size collapsed; ``state`` is the last accepted state."""

    def __init__(self, message, state=None, trace=None):
        super().__init__(message)
        self.state = state
        self.trace = trace

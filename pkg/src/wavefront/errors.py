"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for geometric and numerical failures.

    ``exit_code`` is the command-line status used when the error escapes to
    the CLI: 1 numeric failure, 2 unsupported geometry, 3 nothing found.
    """

    exit_code = 1


class UnsupportedGeometry(GeometryError):
    exit_code = 2


class NothingFound(GeometryError):
    exit_code = 3


class NormalUnavailable(GeometryError):
    """No unit normal can be derived for the surface."""


class Corank2Point(UnsupportedGeometry):
    """The differential vanishes; only corank-one criteria are implemented."""


class NotSingular(GeometryError):
    pass


class DegeneratePoint(GeometryError):
    """``d lambda`` vanishes where a non-degenerate singular point is required."""


class TraceFailure(GeometryError):
    pass


class StraighteningFailed(GeometryError):
    pass


class FrameCollapse(GeometryError):
    pass


class WrongKind(GeometryError):
    pass


class BranchAmbiguity(GeometryError):
    """Umbilic-like point where the two principal branches coincide."""


class NoBoundedBranch(GeometryError):
    pass


class NoFocalPoint(GeometryError):
    """The bounded principal curvature vanishes, so there is no focal offset."""

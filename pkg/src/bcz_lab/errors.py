"""Exception types shared across the package."""


class BczLabError(Exception):
    """Base class for all package-specific errors."""


class DomainError(BczLabError):
    """A point violates the Farey triangle (or section) membership invariants."""


class CoprimalityError(BczLabError):
    """A lattice index pair (m, n) is not coprime."""


class SearchCeilingExceeded(BczLabError):
    """A doubling slope search passed its ceiling without finding enough points.

    Only reachable for degenerate lattices (e.g. integer lattices restricted
    to a window that contains no lattice point at any slope).
    """


class IterationCeiling(BczLabError):
    """An orbit iteration exceeded its configured step bound without returning."""


class CriterionMismatch(BczLabError):
    """The direct-iteration and lattice-counting routes disagreed.

    This signals an implementation bug, never a property of the input.
    """


class SlopeCoincidence(BczLabError):
    """Two strips have equal slope, so their intersection is not a parallelogram."""


class OrderError(BczLabError):
    """An ordered pair of indices was passed out of order (requires n < n')."""


class ConfigError(BczLabError):
    """An experiment configuration is invalid or outside the supported envelope."""


class UsageError(BczLabError):
    """Command-line usage error (maps to exit code 2)."""

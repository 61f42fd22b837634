"""Exception types raised across the package."""


class LayeredHillError(Exception):
    """Base class for all package-specific errors."""


class NonPositiveCellSize(LayeredHillError, ValueError):
    pass


class DimensionMismatch(LayeredHillError, ValueError):
    pass


class ArityMismatch(LayeredHillError, ValueError):
    pass


class ArityExceedsCloud(LayeredHillError, ValueError):
    pass


class TooManySubsets(LayeredHillError, ValueError):
    pass


class IndeterminateCount(LayeredHillError, ValueError):
    pass


class InsufficientExtremes(LayeredHillError, RuntimeError):
    """Fewer qualifying tuples exist than the cut-off requires."""


class NonPositiveH(LayeredHillError, ValueError):
    pass


class UnsupportedConstraint(LayeredHillError, ValueError):
    pass


class ParameterOutOfRange(LayeredHillError, ValueError):
    pass


class UnsupportedRegime(LayeredHillError, ValueError):
    pass


class MissingXi(LayeredHillError, ValueError):
    pass


class DegenerateInterval(LayeredHillError, ValueError):
    pass


class ProbabilityOutOfRange(LayeredHillError, ValueError):
    pass


class RemoveCountExceedsCloud(LayeredHillError, ValueError):
    pass


class ConfigInvalid(LayeredHillError, ValueError):
    pass


class EmptySample(LayeredHillError, ValueError):
    pass

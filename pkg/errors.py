"""Error types raised across the CBFIRL lab."""


class CbfirlError(Exception):
    """Root of every error the lab raises on purpose."""


class UsageError(CbfirlError, ValueError):
    """Bad command-line flag, config key or value."""


class ConfigurationInfeasibleError(CbfirlError, RuntimeError):
    """Obstacle placement could not satisfy the start/goal clearance."""


class EpisodeFinishedError(CbfirlError, RuntimeError):
    """step() was called on a state that already reached the horizon."""


class DimensionMismatchError(CbfirlError, ValueError):
    """Array shapes do not match the network or environment layout."""


class TrainingDivergedError(CbfirlError, RuntimeError):
    """A gradient or network output became non-finite."""


class ExpertTooWeakError(CbfirlError, RuntimeError):
    """The scripted expert produced too few safe, successful demos."""


class ThresholdInfeasibleError(CbfirlError, RuntimeError):
    """Potentially-dangerous state sampling almost never hits the band."""


class BarrierUnlearnableError(CbfirlError, RuntimeError):
    """The barrier net failed to separate safe from dangerous states."""


class UnsupportedDimensionError(CbfirlError, ValueError):
    """Operation only defined for a different spatial dimension."""

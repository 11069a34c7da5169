"""Exception types shared across the package."""


class ChromaSubError(Exception):
    """Base class for every error raised by this package."""


class GeometryError(ChromaSubError):
    """Invalid image or block geometry (bad shape, odd dimensions, index out of range)."""


class PatternError(ChromaSubError):
    """Unknown or malformed color filter array pattern."""


class ModelError(ChromaSubError):
    """A block-distortion model could not be built or has no unique minimizer."""


class SolverError(ChromaSubError):
    """Integer descent failed to terminate.

    Carries the best candidate found so far in ``best`` so callers can
    inspect or salvage the partial result.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ComparisonError(ChromaSubError):
    """Two images cannot be compared (mismatched geometry or pattern)."""


class MetricError(ChromaSubError):
    """A quality metric is undefined for the given input."""

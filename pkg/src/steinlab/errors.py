"""Exceptions and warnings shared across the package."""


class SteinlabError(Exception):
    """Base class for package-specific errors."""


class NonFiniteScoreError(SteinlabError):
    """A score (log-density gradient) evaluation produced NaN or infinity."""

    def __init__(self, message, term_index=None, point_index=None):
        super().__init__(message)
        self.term_index = term_index
        self.point_index = point_index


class DivergenceError(SteinlabError):
    """An iterative sampler or particle update produced a non-finite state."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NumericalConsistencyError(SteinlabError):
    """A computed quantity violated a sign bound beyond float tolerance."""


class ConfigError(SteinlabError):
    """A config file or CSV input could not be parsed or validated."""


class DegenerateBandwidthWarning(UserWarning):
    """The median pairwise distance is zero; the bandwidth was floored."""

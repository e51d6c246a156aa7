"""Exception types raised across the toolkit."""


class NashSensError(Exception):
    pass


class ConfigurationError(NashSensError, ValueError):
    """Invalid grid, game or experiment configuration."""


class DomainError(NashSensError, ValueError):
    """An argument lies outside the domain of an operation."""


class InfeasibleError(NashSensError):
    """A feasibility correspondence returned an empty image on the grid."""

"""
Exception hierarchy for the hidden-community laboratory.
"""


class HicodeLabError(Exception):
    """Base class for every error raised by this package."""


class GraphFormatError(HicodeLabError):
    """Malformed graph, partition or ground-truth input (files or in-memory edges)."""


class PartitionMismatchError(HicodeLabError):
    """A partition does not cover the node set it is used with."""


class UndefinedModularityError(HicodeLabError):
    """Modularity is undefined because the graph carries no edge weight."""


class ParameterError(HicodeLabError, ValueError):
    """Invalid model, detector, weakening or HICODE parameters."""


class DegenerateEstimateError(HicodeLabError):
    """Background density estimation preconditions are not met."""


class ConfigError(HicodeLabError):
    """Unknown preset or malformed experiments file."""

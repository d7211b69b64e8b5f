"""Exception hierarchy for StatusQuo."""

from typing import Optional


class StatusQuoError(Exception):
    """Base class for all errors raised by the lab."""


class RejectedInputError(StatusQuoError, ValueError):
    """Input has the wrong shape, length or label."""


class DomainError(StatusQuoError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


class EpisodeCompleteError(StatusQuoError, RuntimeError):
    """An environment was stepped after its final step."""


class DegenerateInputError(StatusQuoError, ValueError):
    """Clustering input does not contain enough distinct points."""


class UnresolvedLabelingError(StatusQuoError, RuntimeError):
    """Cluster labels cannot be decided from member rewards."""


class StorageFormatError(StatusQuoError, ValueError):
    """A dataset or model file has an unknown format or version."""


class ConfigValidationError(StatusQuoError, ValueError):
    """Experiment configuration failed validation.

    Attributes:
        field: Dotted name of the offending field (e.g. ``sq.gamma``)
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


def check_shape(actual, expected, what: str = "input", where: Optional[str] = None):
    """Raise RejectedInputError unless two shapes are equal."""
    if tuple(actual) != tuple(expected):
        location = f" in {where}" if where else ""
        raise RejectedInputError(
            f"{what} shape {tuple(actual)} does not match expected {tuple(expected)}{location}"
        )


class WorkerFailureError(StatusQuoError, RuntimeError):
    """One or more seeds failed; finished seeds were flushed before raising.

    Attributes:
        failed_seeds: Seeds whose worker raised
    """

    def __init__(self, failed_seeds, message: str = ""):
        self.failed_seeds = list(failed_seeds)
        super().__init__(message or f"Seeds failed: {self.failed_seeds}")

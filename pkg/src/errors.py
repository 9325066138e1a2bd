"""Exception hierarchy shared by simulation, estimation, harness and CLI."""

from typing import Optional


class QueueABError(Exception):
    """Base class for every error raised by this package."""


class ConfigInvalid(QueueABError):
    """A configuration violates one of its invariants."""


class ConfigParseError(ConfigInvalid):
    """A config file line could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        prefix = f"line {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")


class SimulationError(QueueABError):
    """Raised while running the event loop."""


class Overflow(SimulationError):
    """A queue grew past the representable bound; the system is unstable."""


class EstimationError(QueueABError):
    """Raised by an estimator that cannot produce a value."""


class MissingObservation(EstimationError):
    """A task record carries no observed queue lengths."""


class NoSamples(EstimationError):
    """A server received no tasks, so its rate cannot be estimated."""

    def __init__(self, server: int):
        self.server = server
        super().__init__(f"server {server} received no tasks")


class TruncationTooLong(EstimationError):
    """Truncation length leaves no eligible task."""


class ArmEmpty(EstimationError):
    """One experiment arm has too few tasks."""


class DegenerateVariance(EstimationError):
    """The control-variate weight is undefined (zero denominator)."""


class WrongDesign(EstimationError):
    """An estimator was applied to a log from an incompatible design."""


class InsufficientData(EstimationError):
    """Not enough rows to fit a regression."""


class HarnessError(QueueABError):
    """Raised by the replication harness."""


class UnknownTable(HarnessError):
    """The requested table id is not in the catalogue."""

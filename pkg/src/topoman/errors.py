"""Exception types shared across the package."""


class TopomanError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TopomanError):
    """A document (topology, trace, scenario) is malformed."""


class ValidationError(TopomanError):
    """An input violates a structural invariant.

    Carries the list of violations so callers can report all of them.
    """

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])


class UnknownNodeError(TopomanError):
    """A node id does not resolve in the topology or routing graph."""


class DuplicateRequestIdError(TopomanError):
    """A request id was registered twice with the application handler."""


class InsufficientBandwidthError(TopomanError):
    """A reservation would drive a link residual below zero."""


class OverReleaseError(TopomanError):
    """A release would push a link residual above its capacity."""


class InvalidRangeError(TopomanError):
    """A trace generator parameter range is empty or malformed."""


class GridMismatchError(TopomanError):
    """Utilization series being compared were sampled on different tick grids."""


class SchedulerStallError(TopomanError):
    """Internal simulator inconsistency: pending work but no scheduled events."""


class ConservationError(TopomanError):
    """Allocated resources exceed capacity somewhere; indicates a pipeline bug."""

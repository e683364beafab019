"""Exception hierarchy shared by every module."""


class LPVError(Exception):
    """Base class for all library errors."""


class DimensionError(LPVError, ValueError):
    """Array shapes do not agree with the system dimensions."""


class ScheduleError(LPVError, ValueError):
    """A scheduling vector is outside the unit simplex."""


class SetError(LPVError, ValueError):
    """A constraint set is malformed, unbounded or has empty interior."""


class RankConditionError(LPVError):
    """Collected data is not rich enough for the requested operation.

    ``rank`` and ``required`` carry the diagnostics.
    """

    def __init__(self, message, rank=None, required=None):
        super().__init__(message)
        self.rank = rank
        self.required = required


class InfeasibleError(LPVError):
    """The synthesis problem has no solution for the given set and level."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalFailure(LPVError):
    """A solver hit its iteration cap or produced an unverifiable answer."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

"""Shared exception types."""


class GalmodError(Exception):
    """Base class for all library errors."""


class ParamsMismatchError(GalmodError, ValueError):
    """Operands belong to different rings, shapes or groups."""


class GuardError(GalmodError, RuntimeError):
    """An enumeration would exceed its configured size guard."""


class IndexDomainError(GalmodError, ValueError):
    """The index functional was evaluated outside its domain."""


class HypothesisError(GalmodError, ValueError):
    """A constructive operation was invoked on inputs violating its hypotheses."""


class ModelInconsistencyError(GalmodError, RuntimeError):
    """An internal consistency check failed (e.g. a non-divisible tally)."""

#
# errors.py
#

# Exception types shared across the package.


class DehnscanError(Exception):
    pass


class ArgumentError(DehnscanError, ValueError):
    """Inputs violate a documented precondition."""


class PrecisionExhausted(DehnscanError):
    """The requested result cannot be certified at the available precision."""


class MalformedSystemError(DehnscanError, ValueError):
    """A gluing-system document fails schema or rank validation."""


class NoConvergenceError(DehnscanError):
    """Newton iteration left its basin; carries the last iterate."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class StepSizeError(DehnscanError):
    """Branch tracking failed because a continuation step was too large."""


class HypothesisError(DehnscanError, ValueError):
    """A lemma was invoked outside its hypotheses."""


class LemmaViolationError(DehnscanError):
    """An exact computation contradicts a proved lemma; must never fire."""

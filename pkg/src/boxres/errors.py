"""Exception hierarchy shared by the engines, verifiers and the CLI."""


class BoxresError(Exception):
    """Base class for all package errors."""


class InstanceMismatchError(BoxresError, ValueError):
    """An element is not a canonical element of the group it was used with."""


class HorizonError(BoxresError):
    """A bounded search ran out of candidates before finding what it needed.

    Carries an optional ``transcript`` (partial construction state) so that a
    failed run can still be inspected.
    """

    def __init__(self, message: str, transcript=None):
        super().__init__(message)
        self.transcript = transcript


class BudgetExceededError(HorizonError):
    """A construction would exceed its configured element budget."""


class SoundnessError(BoxresError):
    """A construction produced a state violating one of its own invariants."""


class PreconditionError(BoxresError, ValueError):
    """An operation was called with inputs outside its contract."""


class InvalidSeedError(PreconditionError):
    """Seed elements of a transversal share a coset."""


class InvalidWitnessError(PreconditionError):
    """A factorization witness failed verification."""


class CapabilityViolationError(BoxresError):
    """A sequence or topology capability disagreed with a direct check."""


class UnsupportedInstanceError(BoxresError):
    """No exact decision procedure is available for the requested instance."""


class SizeBoundError(PreconditionError):
    """A brute-force oracle was asked about a group above its size bound."""

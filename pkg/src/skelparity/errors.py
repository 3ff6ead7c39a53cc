"""Exception types shared across the package.

Exit-code mapping used by the CLI: InputError -> 2, CapExceeded -> 3.
Property failures are ordinary results (reports with a witness), not
exceptions.
"""


class InputError(ValueError):
    """Malformed or inadmissible input (bad alphabet, bad parameters, ...)."""


class CapExceeded(RuntimeError):
    """An enumeration would exceed its resource cap."""

    def __init__(self, message: str, cap: int):
        super().__init__(message)
        self.cap = cap


class InfiniteIndexError(InputError):
    """The right congruence of the condition has infinitely many classes."""


class TransientTransitionError(InputError):
    """Priority assignment hit transitions that lie on no cycle."""

    def __init__(self, message: str, transitions):
        super().__init__(message)
        self.transitions = transitions


class PreconditionError(InputError):
    """A documented operation precondition does not hold."""


class InternalConsistencyError(RuntimeError):
    """A structural law the pipeline relies on was violated at run time."""

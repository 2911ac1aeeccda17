class PermTestError(Exception):
    """Base class for every error raised by the library."""


class ParseError(PermTestError, ValueError):
    """
    Raised when word, permutation, system or spec text cannot be read.

    :param message: Human readable description.
    :param char: The offending character, when a single one is to blame.
    :param position: 1-based position of ``char`` in the input.
    """

    def __init__(self, message, char=None, position=None):
        if char is not None and position is not None:
            message = f"{message}: unexpected {char!r} at position {position}"
        super().__init__(message)
        self.char = char
        self.position = position


class ArityError(PermTestError, ValueError):
    pass


class AlphabetMismatchError(ArityError):
    pass


class ProbeMismatchError(PermTestError, ValueError):
    pass


class BudgetExceededError(PermTestError):
    """
    Raised instead of silently sampling when an exact search is too large.

    :param what: Name of the refused computation.
    :param requested: Size of the requested search.
    :param bound: The configured ceiling it exceeds.
    """

    def __init__(self, what, requested, bound):
        super().__init__(
            f"{what} refused: size {requested} exceeds the configured bound {bound}"
        )
        self.what = what
        self.requested = requested
        self.bound = bound


class NoComparisonSolutionsError(PermTestError):
    pass


class UncertifiedInstanceError(PermTestError):
    pass


class ContractViolationError(PermTestError):
    pass

"""Exception hierarchy shared by every module."""


class RankSchedError(Exception):
    """Base class for all package errors."""


class ValidationError(RankSchedError, ValueError):
    """Malformed input: bad ids, non-permutation lists, non-positive numbers."""


class ContractError(RankSchedError):
    """An operation was called outside its precondition."""


class CapExceededError(RankSchedError):
    """Exhaustive enumeration refused because the profile count exceeds the cap."""

    def __init__(self, required, cap):
        self.required = required
        self.cap = cap
        super().__init__(
            f"enumeration needs {required} profiles but the cap is {cap}; "
            f"pass force=True (--force) or raise RANKSCHED_CAP"
        )


class UndefinedResultError(RankSchedError):
    """A ratio such as PoA is undefined, e.g. because the game has no NE."""


class InvariantError(RankSchedError):
    """An internal invariant failed. Indicates a bug or a precondition breach."""

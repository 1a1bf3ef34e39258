"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """An input violates a documented bound (maps to CLI exit status 2)."""


class OracleLimitError(PreconditionError):
    """An exact oracle was asked to solve an instance above its size limit."""


class BudgetExceeded(RuntimeError):
    """The candidate enumeration ran out of budget before deciding.

    This is distinct from "no qualifying set exists".
    """

    def __init__(self, examined: int):
        super().__init__(f"enumeration budget exhausted after {examined} candidates")
        self.examined = examined

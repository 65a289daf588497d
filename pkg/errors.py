"""Exceptions raised by the game models, analyses and loaders."""


class LVGameError(Exception):
    """Base class for every error this package raises on purpose"""


class ParameterOutOfRange(LVGameError, ValueError):
    def __init__(self, field, bound, value=None):
        self.field = field
        self.bound = bound
        self.value = value
        message = f"{field} violates {bound}"
        if value is not None:
            message += f" (got {value!r})"
        super().__init__(message)


class DimensionMismatch(LVGameError, ValueError):
    pass


class InvalidConfig(LVGameError, ValueError):
    pass


class SingularInteraction(LVGameError):
    """Interior equilibrium undefined: the interaction system has no unique solution"""


class InfeasibleEquilibrium(LVGameError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"component {index} of the interior equilibrium is negative ({value!r})")


class Overflow(LVGameError, ArithmeticError):
    pass


class NonPositiveState(LVGameError, ValueError):
    pass


class ParseError(LVGameError, ValueError):
    def __init__(self, row, column, detail=""):
        self.row = row
        self.column = column
        message = f"cannot parse row {row}, column '{column}'"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class NonMonotoneYears(LVGameError, ValueError):
    pass


class EmptySeries(LVGameError, ValueError):
    pass


class DegenerateDesign(LVGameError, ValueError):
    pass

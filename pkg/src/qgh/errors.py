"""Exception hierarchy; every error a caller may want to catch lives here."""


class QGHError(Exception):
    """Base class for all library errors."""


class InputError(QGHError, ValueError):
    """Malformed or inconsistent input."""


class DimensionMismatch(InputError):
    pass


class NotCentered(InputError):
    """A functional that should vanish on the unit does not."""


class NotStates(InputError):
    pass


class NotAMetric(InputError):
    def __init__(self, axiom, detail=""):
        self.axiom = axiom
        super().__init__(f"{axiom} fails: {detail}" if detail else axiom)


class UnitViolation(InputError):
    pass


class EmptyPolytope(InputError):
    pass


class InvalidParams(InputError):
    pass


class TooLarge(InputError):
    pass


class TooSmall(InputError):
    pass


class NonpositiveWeight(InputError):
    pass


class WindowTooSmall(InputError):
    pass


class NumericalFailure(QGHError, ArithmeticError):
    pass


class Infeasible(NumericalFailure):
    pass


class Unbounded(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    def __init__(self, message, bracket=None):
        self.bracket = bracket
        super().__init__(message)


class GridTooCoarse(NumericalFailure):
    pass


class CheckFailed(QGHError, AssertionError):
    """A proven inequality was violated beyond tolerance."""


class HypothesisViolated(CheckFailed):
    pass


class BoundViolated(CheckFailed):
    pass


class BridgeInvalid(CheckFailed):
    pass

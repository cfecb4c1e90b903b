"""Exception hierarchy shared by every module."""


class ACFunError(Exception):
    pass


class EvaluationError(ACFunError, ValueError):
    """A descriptor was evaluated outside its domain."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class CompositionError(EvaluationError):
    pass


class CatalogError(ACFunError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown gallery item"


class ParameterError(ACFunError, ValueError):
    pass


class MethodError(ACFunError, ValueError):
    pass


class TooManyBreakpoints(ACFunError):
    pass


class WitnessNotFound(ACFunError):
    pass


class DegenerateWitness(ACFunError, ValueError):
    pass


class DepthLimitError(ACFunError):
    def __init__(self, message, max_safe_depth):
        super().__init__(message)
        self.max_safe_depth = max_safe_depth


class MonotonicityError(ACFunError, ValueError):
    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class DivergenceSuspected(ACFunError):
    """Quadrature could not certify a finite value within its depth budget."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial

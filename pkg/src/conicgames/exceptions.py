"""Exception types shared across the package."""


class DimensionError(ValueError):
    """A vector or operator does not match the space it is used in."""


class InfeasiblePointError(ValueError):
    """A point handed to a certificate routine violates its constraints.

    ``residual`` carries the most negative block margin that was found.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotAStrategyError(ValueError):
    """A point is not in the base (strategy set) it was supposed to lie in."""


class SolverFailure(RuntimeError):
    """The interior-point solver could not certify an answer.

    ``result`` holds the last :class:`~conicgames.solver.SolveResult`, if any.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result

"""Exception hierarchy for the package."""


class LatticeError(Exception):
    """Base class for all errors raised by latprec."""


class DimError(LatticeError, ValueError):
    pass


class NotPositiveDefinite(LatticeError, ValueError):
    pass


class DegenerateBasis(LatticeError, ValueError):
    pass


class ConditioningError(LatticeError, ValueError):
    """The form is too badly conditioned for exhaustive enumeration."""


class ConeNotPointed(LatticeError):
    """The inequality system does not describe a pointed cone."""


class RayUnbounded(LatticeError):
    """Moving along the ray never lowers the minimum."""


class SingularChannel(LatticeError, ValueError):
    pass


class NumericalError(LatticeError, ArithmeticError):
    pass


class OrthogonalityCheckFailed(NumericalError):
    pass


class EmptyBudget(LatticeError, ValueError):
    """The trace cap is below the smallest possible basis trace."""


class ReproFailure(LatticeError, AssertionError):
    pass

"""Exception types raised by the package."""


class MDTBError(Exception):
    """Base class for all errors raised by mdtbspline."""


class SpaceError(MDTBError, ValueError):
    """Invalid space parameters."""


class MissingZeroRoot(SpaceError):
    pass


class DuplicateRoot(SpaceError):
    pass


class EmptyInterval(SpaceError):
    pass


class DegreeTooSmall(SpaceError):
    pass


class OddDegree(SpaceError):
    pass


class ParameterOverflow(SpaceError):
    pass


class InvalidSmoothness(SpaceError):
    pass


class PeriodicSmoothnessTooHigh(InvalidSmoothness):
    pass


class PointOutOfInterval(MDTBError, ValueError):
    pass


class DerivOrderTooHigh(MDTBError, ValueError):
    pass


class DimensionMismatch(MDTBError, ValueError):
    pass


class AllZeroVector(MDTBError, ValueError):
    pass


class UnknownExample(MDTBError, KeyError):
    pass


class NumericalError(MDTBError, ArithmeticError):
    """A computation broke down numerically."""


class SingularSystem(NumericalError):
    pass


class DegenerateConstraint(NumericalError):
    pass


class UnstableScan(NumericalError):
    pass

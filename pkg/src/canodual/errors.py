"""Exception hierarchy shared by every module of the package."""


class CanodualError(Exception):
    """Base class for all errors raised by canodual."""


class ParseError(CanodualError, ValueError):
    pass


class DimensionError(CanodualError, ValueError):
    pass


class DomainError(CanodualError, ValueError):
    pass


class AsymmetricInput(DomainError):
    pass


class InfeasibleDual(CanodualError):
    """f is not in the column space of G(sigma)."""


class NoConvergence(CanodualError):
    pass


class SingularHessian(CanodualError):
    pass


class PreconditionViolated(CanodualError, ValueError):
    pass


class SchurPrecondition(PreconditionViolated):
    pass


class RankDeficientF(PreconditionViolated):
    pass


class DegenerateInput(PreconditionViolated):
    pass


class InvariantViolation(CanodualError):
    pass


class DimensionTooLarge(DimensionError):
    pass

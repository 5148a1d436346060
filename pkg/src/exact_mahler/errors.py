"""Exception hierarchy shared by every analysis stage."""


class MahlerError(Exception):
    """Base class; the CLI maps it to exit status 1."""


class ParseError(MahlerError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DomainError(MahlerError, ValueError):
    pass


class EmptySupport(MahlerError, ValueError):
    pass


class NotUnimodular(MahlerError, ValueError):
    pass


class CornerMismatch(MahlerError):
    def __init__(self, moduli):
        self.moduli = list(moduli)
        super().__init__(f"corner coefficients have distinct moduli: {self.moduli}")


class ZeroPolynomial(MahlerError, ValueError):
    pass


class NoConvergence(MahlerError):
    def __init__(self, message, best=None):
        self.best = best
        super().__init__(message)


class BranchCollision(MahlerError):
    def __init__(self, message, parameter=None):
        self.parameter = parameter
        super().__init__(message)


class DegreeDrop(MahlerError):
    pass


class SingularPoint(MahlerError):
    pass


class DanglingArc(MahlerError):
    pass


class IndexInconsistency(MahlerError):
    pass


class UnwrapAmbiguity(MahlerError):
    pass


class InconsistentCycle(MahlerError):
    pass


class DisconnectedComponent(MahlerError):
    pass


class QuadratureStall(MahlerError):
    def __init__(self, message, error_bound=None):
        self.error_bound = error_bound
        super().__init__(message)


class CollapsedSubstitution(MahlerError, ValueError):
    pass


class UnresolvedSingular(MahlerError):
    pass

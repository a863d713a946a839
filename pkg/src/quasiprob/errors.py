"""Exception hierarchy shared by every module of the package."""


class QuasiProbError(ValueError):
    """Base class for all domain errors raised by quasiprob."""


class EvenResolution(QuasiProbError):
    pass


class ResolutionOutOfRange(QuasiProbError):
    pass


class EmptyMask(QuasiProbError):
    pass


class ExpressionError(QuasiProbError):
    """Raised for malformed expression strings or invalid observable trees."""


class CommonZero(QuasiProbError):
    pass


class NotDominated(QuasiProbError):
    pass


class SpacingTooCoarse(QuasiProbError):
    pass


class NotDisjoint(QuasiProbError):
    pass


class NotIncreasing(QuasiProbError):
    pass


class NotMonotone(QuasiProbError):
    pass


class NotSandwiched(QuasiProbError):
    pass


class BudgetExceeded(QuasiProbError):
    pass

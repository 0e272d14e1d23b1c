"""Exception hierarchy shared by all modules."""


class YamabeLabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionTooSmall(YamabeLabError, ValueError):
    pass


class DomainEmpty(YamabeLabError, ValueError):
    pass


class IndexOutOfRange(YamabeLabError, IndexError):
    pass


class Divergent(YamabeLabError, ValueError):
    """Raised when an improper radial integral does not converge."""


class UnsupportedDegree(YamabeLabError, ValueError):
    pass


class UnknownKind(YamabeLabError, ValueError):
    pass


class NoRealCriticalPoint(YamabeLabError, ValueError):
    """The discriminant of the critical-scale equation is negative."""


class OracleBudgetExceeded(YamabeLabError, RuntimeError):
    pass


class BadDensity(YamabeLabError, ValueError):
    pass


class ToleranceNotMet(YamabeLabError, RuntimeError):
    pass


class SingularMetric(YamabeLabError, ValueError):
    pass


class OutsideOmega(YamabeLabError, ValueError):
    pass

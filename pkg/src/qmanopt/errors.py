"""Exception hierarchy shared by every module."""


class QManOptError(Exception):
    """Base class for library errors."""


class ShapeError(QManOptError, ValueError):
    """Array shapes do not match what an operation needs."""


class PreconditionError(QManOptError, ValueError):
    """An input violates a documented precondition (e.g. not Hermitian)."""


class DegeneracyError(QManOptError, ArithmeticError):
    """A factorization or map hit a rank collapse / loss of definiteness."""


class LikelihoodDegeneracyError(DegeneracyError):
    """The estimate assigns (numerically) zero probability to an observed outcome."""


class ConfigurationError(QManOptError, ValueError):
    """Invalid option combination or hyperparameter."""

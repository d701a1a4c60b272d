"""Custom exceptions for qna."""


class QnaError(Exception):
    """Base exception for qna."""

    pass


class FieldMismatchError(QnaError, ValueError):
    """Raised when scalars from different fields meet in one operation."""

    pass


class NotInvertibleError(QnaError):
    """Raised when a scalar or series has no inverse (zero modulo precision, bad lead term)."""

    pass


class PrecisionError(QnaError):
    """Raised when a value cannot be decided at the available precision."""

    pass


class TwistError(QnaError, ValueError):
    """Raised when commutation data is malformed (rank, indices, |q| != 1)."""

    pass


class TwistMismatchError(QnaError, ValueError):
    """Raised when series over different twists are combined."""

    pass


class TruncationError(QnaError):
    """Raised when an operation needs a support bound that was not supplied."""

    pass


class RelationError(QnaError):
    """Raised when substitution images break the defining commutation relations."""

    pass


class ContractionError(QnaError, ValueError):
    """Raised when a wall transport constant does not contract (|C| >= 1)."""

    pass


class RootOfUnityError(QnaError):
    """Raised when q is a root of unity up to the requested order."""

    pass


class ConvergenceError(QnaError):
    """Raised when the degree-by-degree factorization cannot make progress."""

    pass


class UnsupportedPrimeError(QnaError, ValueError):
    """Raised for primes the p-adic routines do not handle (p = 2)."""

    pass


class WindowError(QnaError, ValueError):
    """Raised when an operator window is too small for the requested word."""

    pass


class InadmissibleError(QnaError):
    """Base for data that is well-formed but violates an admissibility condition."""

    pass


class AdmissibilityError(InadmissibleError):
    """Raised when a group-log coefficient violates the norm bound at its base point."""

    pass


class InadmissibleLeafError(InadmissibleError):
    """Raised when (c, t) does not define an admissible symplectic leaf."""

    pass

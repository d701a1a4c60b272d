"""qna package.
Exact arithmetic for quantum tori, wall-crossing factorizations and p-adic
quantum groups over non-archimedean fields.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__: str = version(__name__)
except PackageNotFoundError:  # pragma: no cover
    __version__ = "0.0.0"

from .exceptions import (
    AdmissibilityError,
    ConvergenceError,
    FieldMismatchError,
    InadmissibleError,
    NotInvertibleError,
    QnaError,
    RootOfUnityError,
    TwistMismatchError,
)
from .nascalar import NEG_INF, LaurentField, LogNorm, PadicField

__all__ = [
    "__version__",
    "NEG_INF",
    "LaurentField",
    "LogNorm",
    "PadicField",
    "QnaError",
    "AdmissibilityError",
    "ConvergenceError",
    "FieldMismatchError",
    "InadmissibleError",
    "NotInvertibleError",
    "RootOfUnityError",
    "TwistMismatchError",
]

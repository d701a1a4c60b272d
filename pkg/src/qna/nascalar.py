"""Exact non-archimedean scalars with log-domain norms.

Two coefficient fields are modeled:

* :class:`LaurentField` - truncated Laurent series ``Q((t))`` with absolute
  precision ``P`` (exponents ``>= P`` are unknown), valuation = order in ``t``.
* :class:`PadicField` - exact rationals with the ``p``-adic valuation.

:class:`QuadraticExtension` adjoins ``sqrt(d)`` to ``Q_p`` when ``d`` is a
``p``-adic square; it houses the single quadratic irrationality needed by
the quantum GL2 representations.

Norms are never exponentiated: ``log|x| = -val(x)`` is an exact rational
wrapped in :class:`LogNorm`, with :data:`NEG_INF` standing for ``log|0|``.

Rationals are ``gmpy2.mpq`` throughout; strings use the ``"num/den"`` form.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Any, ClassVar, Union

import gmpy2
import sympy
from gmpy2 import mpq, mpz
from sympy.functions.combinatorial.numbers import legendre_symbol
from sympy.ntheory import sqrt_mod

from .exceptions import (
    FieldMismatchError,
    NotInvertibleError,
    PrecisionError,
    UnsupportedPrimeError,
)

MPQ = type(mpq(0))
MPZ = type(mpz(0))

RationalLike = Union[int, str, Fraction, Any]

DEFAULT_PRECISION = 32
DEFAULT_HENSEL_PRECISION = 24

_ZERO = mpq(0)
_ONE = mpq(1)


def to_rational(value: RationalLike) -> Any:
    """Convert ints, ``mpq``, ``Fraction`` and ``"num/den"`` strings to ``mpq``."""
    if isinstance(value, MPQ):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, MPZ)):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if any(ch in text for ch in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        try:
            return mpq(text)
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"not an exact rational: {value!r}") from e
    raise TypeError(f"cannot read {type(value).__name__} as an exact rational")


def rational_str(value: Any) -> str:
    """Render a rational as ``"num/den"`` (``"n"`` for integers)."""
    return str(to_rational(value))


def rational_valuation(value: Any, p: int) -> int | None:
    """``val_p`` of a rational, ``None`` for zero."""
    value = to_rational(value)
    if value == 0:
        return None
    _, up = gmpy2.remove(abs(value.numerator), p)
    _, down = gmpy2.remove(value.denominator, p)
    return int(up) - int(down)


def _p_power(p: int, k: int) -> Any:
    return mpq(mpz(p) ** k) if k >= 0 else mpq(1, mpz(p) ** (-k))


@total_ordering
@dataclass(frozen=True, eq=False)
class LogNorm:
    """Exact ``log|x|``; ``value=None`` is the bottom element ``NEG_INF``."""

    value: Any = None

    def __post_init__(self) -> None:
        if self.value is not None:
            object.__setattr__(self, "value", to_rational(self.value))

    @classmethod
    def of(cls, value: RationalLike | LogNorm) -> LogNorm:
        if isinstance(value, LogNorm):
            return value
        return cls(value)

    @classmethod
    def parse(cls, text: str) -> LogNorm:
        text = text.strip()
        if text in {"-inf", "-oo", "NEG_INF"}:
            return NEG_INF
        return cls(text)

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    def __add__(self, other: LogNorm | RationalLike) -> LogNorm:
        other = LogNorm.of(other)
        if self.value is None or other.value is None:
            return NEG_INF
        return LogNorm(self.value + other.value)

    __radd__ = __add__

    def __sub__(self, other: LogNorm | RationalLike) -> LogNorm:
        other = LogNorm.of(other)
        if other.value is None:
            raise ValueError("cannot subtract NEG_INF")
        if self.value is None:
            return NEG_INF
        return LogNorm(self.value - other.value)

    def __neg__(self) -> LogNorm:
        if self.value is None:
            raise ValueError("NEG_INF has no negative")
        return LogNorm(-self.value)

    def scale(self, factor: RationalLike) -> LogNorm:
        """Multiply by a rational ``factor >= 0``; NEG_INF stays NEG_INF."""
        factor = to_rational(factor)
        if factor < 0:
            raise ValueError("log-norms scale by non-negative factors only")
        if self.value is None:
            return NEG_INF
        return LogNorm(self.value * factor)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, LogNorm):
            return bool(self.value == other.value)
        if isinstance(other, (int, MPQ, MPZ, Fraction)) and not isinstance(
            other, bool
        ):
            return self.value is not None and bool(self.value == to_rational(other))
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, LogNorm):
            if isinstance(other, (int, MPQ, MPZ, Fraction)):
                other = LogNorm(other)
            else:
                return NotImplemented
        if self.value is None:
            return other.value is not None
        if other.value is None:
            return False
        return bool(self.value < other.value)

    def __hash__(self) -> int:
        return hash(self.value)

    def __str__(self) -> str:
        return "-inf" if self.value is None else str(self.value)

    def __repr__(self) -> str:
        return f"LogNorm({self})"

    def to_json(self) -> str:
        return str(self)


NEG_INF = LogNorm(None)


def log_max(values: Iterable[LogNorm]) -> LogNorm:
    """Max of log-norms, NEG_INF for an empty collection."""
    return max(values, default=NEG_INF)


class Field(ABC):
    """A coefficient field. Concrete fields are frozen dataclasses."""

    kind: ClassVar[str]

    @abstractmethod
    def coerce(self, value: Any) -> Scalar:
        """Bring ``value`` into this field or raise ``FieldMismatchError``."""

    def embeds(self, other: Field) -> bool:
        """Whether scalars of ``other`` coerce into this field."""
        return False

    def __call__(self, value: Any) -> Scalar:
        return self.coerce(value)

    @property
    def zero(self) -> Scalar:
        return self.coerce(0)

    @property
    def one(self) -> Scalar:
        return self.coerce(1)

    @abstractmethod
    def default_q(self) -> Scalar:
        """The standard deformation parameter of this field."""


class Scalar(ABC):
    """Immutable field element. Binary operators coerce rationals."""

    __slots__ = ()
    __hash__ = None  # type: ignore[assignment]

    field: Field

    @abstractmethod
    def _add(self, other: Any) -> Scalar: ...

    @abstractmethod
    def _mul(self, other: Any) -> Scalar: ...

    @abstractmethod
    def __neg__(self) -> Scalar: ...

    @abstractmethod
    def invert(self) -> Scalar:
        """Multiplicative inverse; raises ``NotInvertibleError`` on zero."""

    @abstractmethod
    def valuation(self) -> Any:
        """Exact valuation, ``None`` for zero."""

    @abstractmethod
    def is_zero(self) -> bool: ...

    @abstractmethod
    def _equals(self, other: Any) -> bool: ...

    @abstractmethod
    def to_json(self) -> dict[str, Any]: ...

    def log_norm(self) -> LogNorm:
        v = self.valuation()
        return NEG_INF if v is None else LogNorm(-v)

    def _coerce_other(self, other: Any) -> Any:
        if isinstance(other, Scalar):
            if other.field == self.field:
                return other
            if self.field.embeds(other.field):
                return self.field.coerce(other)
            if other.field.embeds(self.field):
                return NotImplemented
            raise FieldMismatchError(
                f"cannot combine scalars of {self.field!r} and {other.field!r}"
            )
        if isinstance(other, (int, MPQ, MPZ, Fraction)) and not isinstance(
            other, bool
        ):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other: Any) -> Scalar:
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return self._add(other)

    def __radd__(self, other: Any) -> Scalar:
        return self.__add__(other)

    def __sub__(self, other: Any) -> Scalar:
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return self._add(-other)

    def __rsub__(self, other: Any) -> Scalar:
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return other._add(-self)

    def __mul__(self, other: Any) -> Scalar:
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return self._mul(other)

    def __rmul__(self, other: Any) -> Scalar:
        return self.__mul__(other)

    def __truediv__(self, other: Any) -> Scalar:
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return self._mul(other.invert())

    def __rtruediv__(self, other: Any) -> Scalar:
        other = self._coerce_other(other)
        if other is NotImplemented:
            return NotImplemented
        return other._mul(self.invert())

    def __pow__(self, exponent: int) -> Scalar:
        if not isinstance(exponent, int):
            raise TypeError("scalars are raised to integer powers only")
        base: Scalar = self
        if exponent < 0:
            base = self.invert()
            exponent = -exponent
        result = self.field.one
        while exponent:
            if exponent & 1:
                result = result._mul(base)
            exponent >>= 1
            if exponent:
                base = base._mul(base)
        return result

    def __eq__(self, other: object) -> bool:
        try:
            coerced = self._coerce_other(other)
        except FieldMismatchError:
            return False
        if coerced is NotImplemented:
            return NotImplemented
        return self._equals(coerced)


# -- Laurent series ---------------------------------------------------------


@dataclass(frozen=True)
class LaurentField(Field):
    """``Q((t))`` truncated at absolute precision ``precision``."""

    precision: int = DEFAULT_PRECISION
    kind: ClassVar[str] = "laurent"

    def __post_init__(self) -> None:
        if self.precision < 1:
            raise ValueError(f"precision must be positive, got {self.precision}")

    def coerce(self, value: Any) -> LaurentScalar:
        if isinstance(value, LaurentScalar):
            if value.field != self:
                raise FieldMismatchError(
                    f"Laurent scalar of precision {value.field.precision} "
                    f"used in field of precision {self.precision}"
                )
            return value
        if isinstance(value, Scalar):
            raise FieldMismatchError(f"cannot read {value.field!r} scalar as Laurent")
        return LaurentScalar.build(self, {0: to_rational(value)})

    def element(
        self,
        terms: Mapping[int, RationalLike] | Iterable[tuple[int, RationalLike]],
        precision: int | None = None,
    ) -> LaurentScalar:
        """Scalar from ``{exponent: coefficient}`` known modulo ``t^precision``."""
        items = terms.items() if isinstance(terms, Mapping) else terms
        table: dict[int, Any] = {}
        for exponent, coefficient in items:
            table[int(exponent)] = table.get(int(exponent), _ZERO) + to_rational(
                coefficient
            )
        return LaurentScalar.build(self, table, precision)

    def monomial(self, exponent: int, coefficient: RationalLike = 1) -> LaurentScalar:
        return self.element({exponent: coefficient})

    @property
    def t(self) -> LaurentScalar:
        return self.monomial(1)

    def default_q(self) -> LaurentScalar:
        return self.element({0: 1, 1: 1})


class LaurentScalar(Scalar):
    """Truncated Laurent series ``sum c_e t^e + O(t^precision)``.

    Stored densely from the valuation ``start``; a value with no stored
    coefficient is zero modulo ``t^precision`` and keeps ``start == precision``.
    """

    __slots__ = ("field", "start", "coeffs", "precision")

    def __init__(
        self, field: LaurentField, start: int, coeffs: tuple[Any, ...], precision: int
    ) -> None:
        self.field = field
        self.start = start
        self.coeffs = coeffs
        self.precision = precision

    @classmethod
    def build(
        cls,
        field: LaurentField,
        terms: Mapping[int, Any],
        precision: int | None = None,
    ) -> LaurentScalar:
        prec = field.precision if precision is None else min(precision, field.precision)
        live = {e: c for e, c in terms.items() if c != 0 and e < prec}
        if not live:
            return cls(field, prec, (), prec)
        lo, hi = min(live), max(live)
        dense = [live.get(e, _ZERO) for e in range(lo, hi + 1)]
        return cls(field, lo, tuple(dense), prec)

    @classmethod
    def _normalized(
        cls, field: LaurentField, start: int, coeffs: list[Any], precision: int
    ) -> LaurentScalar:
        precision = min(precision, field.precision)
        keep = max(0, precision - start)
        if len(coeffs) > keep:
            coeffs = coeffs[:keep]
        lo = 0
        while lo < len(coeffs) and coeffs[lo] == 0:
            lo += 1
        hi = len(coeffs)
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            return cls(field, precision, (), precision)
        return cls(field, start + lo, tuple(coeffs[lo:hi]), precision)

    def _order(self) -> int:
        return self.start

    def _add(self, other: LaurentScalar) -> LaurentScalar:
        prec = min(self.precision, other.precision)
        lo = min(self.start, other.start)
        size = prec - lo
        if size <= 0:
            return LaurentScalar(self.field, prec, (), prec)
        out = [_ZERO] * size
        for operand in (self, other):
            offset = operand.start - lo
            for i, c in enumerate(operand.coeffs):
                k = offset + i
                if k >= size:
                    break
                out[k] += c
        return LaurentScalar._normalized(self.field, lo, out, prec)

    def __neg__(self) -> LaurentScalar:
        return LaurentScalar(
            self.field, self.start, tuple(-c for c in self.coeffs), self.precision
        )

    def _mul(self, other: LaurentScalar) -> LaurentScalar:
        v1, v2 = self.start, other.start
        prec = min(self.precision + v2, other.precision + v1, self.field.precision)
        if not self.coeffs or not other.coeffs:
            return LaurentScalar(self.field, prec, (), prec)
        start = v1 + v2
        size = prec - start
        if size <= 0:
            return LaurentScalar(self.field, prec, (), prec)
        a, b = self.coeffs, other.coeffs
        out = [_ZERO] * min(size, len(a) + len(b) - 1)
        nb = len(b)
        for i, ai in enumerate(a):
            if i >= size:
                break
            if not ai:
                continue
            for j in range(min(nb, size - i)):
                out[i + j] += ai * b[j]
        return LaurentScalar._normalized(self.field, start, out, prec)

    def invert(self) -> LaurentScalar:
        if not self.coeffs:
            raise NotInvertibleError(f"zero modulo t^{self.precision} is not invertible")
        v = self.start
        prec = min(self.precision - 2 * v, self.field.precision)
        size = prec + v
        a = self.coeffs
        inv0 = 1 / a[0]
        b = [inv0]
        for k in range(1, max(size, 0)):
            acc = _ZERO
            for i in range(1, min(k, len(a) - 1) + 1):
                acc += a[i] * b[k - i]
            b.append(-acc * inv0)
        return LaurentScalar._normalized(self.field, -v, b[: max(size, 0)], prec)

    def valuation(self) -> int | None:
        return self.start if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact_zero(self) -> bool:
        """Zero known to the full field precision (not merely modulo a lower one)."""
        return not self.coeffs and self.precision >= self.field.precision

    def terms(self) -> dict[int, Any]:
        return {self.start + i: c for i, c in enumerate(self.coeffs) if c != 0}

    def coefficient(self, exponent: int) -> Any:
        if exponent >= self.precision:
            raise PrecisionError(
                f"coefficient of t^{exponent} unknown beyond precision {self.precision}"
            )
        k = exponent - self.start
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    def with_precision(self, precision: int) -> LaurentScalar:
        return LaurentScalar._normalized(
            self.field, self.start, list(self.coeffs), min(precision, self.precision)
        )

    def _equals(self, other: LaurentScalar) -> bool:
        prec = min(self.precision, other.precision)
        mine = {e: c for e, c in self.terms().items() if e < prec}
        theirs = {e: c for e, c in other.terms().items() if e < prec}
        return mine == theirs

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "laurent",
            "terms": [[e, rational_str(c)] for e, c in sorted(self.terms().items())],
            "precision": self.precision,
        }

    def __str__(self) -> str:
        parts: list[str] = []
        for e, c in sorted(self.terms().items()):
            if e == 0:
                parts.append(str(c))
            else:
                power = "t" if e == 1 else f"t^{e}"
                parts.append(power if c == 1 else f"{c}*{power}")
        body = " + ".join(parts).replace("+ -", "- ") if parts else "0"
        return f"{body} + O(t^{self.precision})"

    def __repr__(self) -> str:
        return f"LaurentScalar({self})"


# -- p-adic rationals -------------------------------------------------------


@dataclass(frozen=True)
class PadicField(Field):
    """Exact rationals viewed inside ``Q_p``."""

    p: int
    kind: ClassVar[str] = "padic"

    def __post_init__(self) -> None:
        if self.p < 2 or not gmpy2.is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")

    def coerce(self, value: Any) -> PadicScalar:
        if isinstance(value, PadicScalar):
            if value.field != self:
                raise FieldMismatchError(
                    f"{value.field.p}-adic and {self.p}-adic scalars do not mix"
                )
            return value
        if isinstance(value, Scalar):
            raise FieldMismatchError(f"cannot read {value.field!r} scalar as p-adic")
        return PadicScalar(self, to_rational(value))

    def default_q(self) -> PadicScalar:
        return PadicScalar(self, mpq(1 + self.p))


class PadicScalar(Scalar):
    """An exact rational with its ``p``-adic valuation."""

    __slots__ = ("field", "value")

    def __init__(self, field: PadicField, value: Any) -> None:
        self.field = field
        self.value = value

    @property
    def p(self) -> int:
        return self.field.p

    def _add(self, other: PadicScalar) -> PadicScalar:
        return PadicScalar(self.field, self.value + other.value)

    def __neg__(self) -> PadicScalar:
        return PadicScalar(self.field, -self.value)

    def _mul(self, other: PadicScalar) -> PadicScalar:
        return PadicScalar(self.field, self.value * other.value)

    def invert(self) -> PadicScalar:
        if self.value == 0:
            raise NotInvertibleError("0 is not invertible")
        return PadicScalar(self.field, 1 / self.value)

    def valuation(self) -> int | None:
        return rational_valuation(self.value, self.field.p)

    def is_zero(self) -> bool:
        return bool(self.value == 0)

    def unit_part(self) -> Any:
        """``value / p^val`` as a rational (zero for zero)."""
        v = self.valuation()
        return _ZERO if v is None else self.value / _p_power(self.field.p, v)

    def _equals(self, other: PadicScalar) -> bool:
        return bool(self.value == other.value)

    def to_json(self) -> dict[str, Any]:
        return {"kind": "padic", "p": self.field.p, "value": rational_str(self.value)}

    def __str__(self) -> str:
        return f"{self.value} (in Q_{self.field.p})"

    def __repr__(self) -> str:
        return f"PadicScalar({self.value}, p={self.field.p})"


def is_square_qp(x: PadicScalar) -> bool:
    """Square test in ``Q_p`` for odd ``p``: even valuation and residue unit part."""
    p = x.field.p
    if p == 2:
        raise UnsupportedPrimeError("the square criterion in Q_2 is not supported")
    v = x.valuation()
    if v is None:
        return True
    if v % 2:
        return False
    unit = x.unit_part()
    residue = int(unit.numerator * unit.denominator) % p
    return bool(legendre_symbol(residue, p) == 1)


# -- quadratic extension ----------------------------------------------------


@dataclass(frozen=True)
class QuadraticExtension(Field):
    """``Q_p(sqrt(d))`` for a ``p``-adic square ``d`` (so the extension splits).

    Elements ``a + b*sqrt(d)`` are stored exactly; the designated root is
    ``p^k * r`` with ``r`` a Hensel lift of the unit part modulo
    ``p^hensel_precision``.
    """

    base: PadicField
    d: Any
    hensel_precision: int = DEFAULT_HENSEL_PRECISION
    kind: ClassVar[str] = "quadratic"
    half_valuation: int = field(init=False, compare=False, repr=False, default=0)
    root_approximation: Any = field(init=False, compare=False, repr=False, default=None)

    def __post_init__(self) -> None:
        d = to_rational(self.d)
        object.__setattr__(self, "d", d)
        p = self.base.p
        if p == 2:
            raise UnsupportedPrimeError("quadratic extensions of Q_2 are not supported")
        if d == 0:
            raise ValueError("d must be nonzero")
        if not is_square_qp(PadicScalar(self.base, d)):
            raise ValueError(f"{d} is not a square in Q_{p}")
        v = rational_valuation(d, p)
        assert v is not None
        unit = d / _p_power(p, v)
        modulus = p**self.hensel_precision
        residue = (
            int(unit.numerator) * pow(int(unit.denominator), -1, modulus)
        ) % modulus
        root = sqrt_mod(residue, modulus)
        if root is None:
            raise PrecisionError(f"no square root of {unit} modulo {p}^{self.hensel_precision}")
        object.__setattr__(self, "half_valuation", v // 2)
        object.__setattr__(
            self, "root_approximation", mpq(root) * _p_power(p, v // 2)
        )

    def embeds(self, other: Field) -> bool:
        return other == self.base

    def coerce(self, value: Any) -> QuadExtScalar:
        if isinstance(value, QuadExtScalar):
            if value.field != self:
                raise FieldMismatchError("scalars from different quadratic extensions")
            return value
        if isinstance(value, PadicScalar):
            if value.field != self.base:
                raise FieldMismatchError(
                    f"{value.field.p}-adic scalar used over Q_{self.base.p}"
                )
            return QuadExtScalar(self, value.value, _ZERO)
        if isinstance(value, Scalar):
            raise FieldMismatchError(f"cannot read {value.field!r} scalar here")
        return QuadExtScalar(self, to_rational(value), _ZERO)

    def element(self, a: Any, b: Any = 0) -> QuadExtScalar:
        return QuadExtScalar(self, _base_rational(a), _base_rational(b))

    def sqrt_d(self) -> QuadExtScalar:
        return QuadExtScalar(self, _ZERO, _ONE)

    def default_q(self) -> QuadExtScalar:
        return self.coerce(self.base.default_q())


def _base_rational(value: Any) -> Any:
    if isinstance(value, PadicScalar):
        return value.value
    return to_rational(value)


class QuadExtScalar(Scalar):
    """``a + b*sqrt(d)`` with rational ``a``, ``b``."""

    __slots__ = ("field", "a", "b")

    def __init__(self, field: QuadraticExtension, a: Any, b: Any) -> None:
        self.field = field
        self.a = a
        self.b = b

    def _add(self, other: QuadExtScalar) -> QuadExtScalar:
        return QuadExtScalar(self.field, self.a + other.a, self.b + other.b)

    def __neg__(self) -> QuadExtScalar:
        return QuadExtScalar(self.field, -self.a, -self.b)

    def _mul(self, other: QuadExtScalar) -> QuadExtScalar:
        d = self.field.d
        return QuadExtScalar(
            self.field,
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
        )

    def invert(self) -> QuadExtScalar:
        norm = self.a * self.a - self.b * self.b * self.field.d
        if norm == 0:
            raise NotInvertibleError(f"{self} is a zero divisor")
        return QuadExtScalar(self.field, self.a / norm, -self.b / norm)

    def valuation(self) -> int | None:
        p = self.field.base.p
        if self.b == 0:
            return rational_valuation(self.a, p)
        vb = rational_valuation(self.b, p)
        assert vb is not None
        vb += self.field.half_valuation
        if self.a == 0:
            return vb
        va = rational_valuation(self.a, p)
        assert va is not None
        if va != vb:
            return min(va, vb)
        approx = self.a + self.b * self.field.root_approximation
        bound = vb + self.field.hensel_precision
        w = rational_valuation(approx, p)
        if w is not None and w < bound:
            return w
        raise PrecisionError(
            f"valuation of {self} undecided at hensel precision "
            f"{self.field.hensel_precision}"
        )

    def is_zero(self) -> bool:
        return bool(self.a == 0 and self.b == 0)

    def _equals(self, other: QuadExtScalar) -> bool:
        return bool(self.a == other.a and self.b == other.b)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": "quadratic",
            "p": self.field.base.p,
            "d": rational_str(self.field.d),
            "a": rational_str(self.a),
            "b": rational_str(self.b),
        }

    def __str__(self) -> str:
        return f"{self.a} + {self.b}*sqrt({self.field.d})"

    def __repr__(self) -> str:
        return f"QuadExtScalar({self})"


# -- module-level operations ------------------------------------------------

_ARITH = {
    "add": lambda x, y: x + y,
    "sub": lambda x, y: x - y,
    "mul": lambda x, y: x * y,
}


def scalar_arith(x: Scalar, y: Scalar, op: str) -> Scalar:
    """``x op y`` for ``op`` in ``add``/``sub``/``mul``; fields must agree."""
    if op not in _ARITH:
        raise ValueError(f"unknown operation {op!r}; expected one of {sorted(_ARITH)}")
    if isinstance(x, Scalar) and isinstance(y, Scalar) and x.field != y.field:
        raise FieldMismatchError(f"{x.field!r} vs {y.field!r}")
    result: Scalar = _ARITH[op](x, y)
    return result


def scalar_invert(x: Scalar) -> Scalar:
    return x.invert()


def log_norm(x: Scalar) -> LogNorm:
    return x.log_norm()


def padic_log_norm(x: PadicScalar) -> LogNorm:
    """``-val_p(x)`` in units of ``log p``."""
    if not isinstance(x, PadicScalar):
        raise TypeError(f"expected a p-adic scalar, got {type(x).__name__}")
    return x.log_norm()


def scalar_from_json(data: Mapping[str, Any], field: Field | None = None) -> Scalar:
    """Decode ``{"kind": "laurent"|"padic", ...}``; ``field`` pins the target field."""
    kind = data.get("kind")
    if kind == "laurent":
        precision = int(data["precision"])
        target = field or LaurentField(max(DEFAULT_PRECISION, precision))
        if not isinstance(target, LaurentField):
            raise FieldMismatchError(f"Laurent scalar read into {target!r}")
        return target.element(
            [(int(e), c) for e, c in data.get("terms", [])], precision=precision
        )
    if kind == "padic":
        p = int(data["p"])
        target = field or PadicField(p)
        if not isinstance(target, PadicField) or target.p != p:
            raise FieldMismatchError(f"{p}-adic scalar read into {target!r}")
        return target.coerce(to_rational(data["value"]))
    raise ValueError(f"unknown scalar kind {kind!r}; expected 'laurent' or 'padic'")


_T = sympy.Symbol("t")


def parse_scalar(text: str | int | Any, field: Field) -> Scalar:
    """Parse ``"1+t"``, ``"3/2"``, ``"t**-1 - 2*t^2"`` (Laurent) or rationals.

    Everything is read exactly; floats are rejected.
    """
    if isinstance(text, Scalar):
        return field.coerce(text)
    if not isinstance(text, str):
        return field.coerce(to_rational(text))
    if not isinstance(field, LaurentField):
        return field.coerce(to_rational(text))
    if "." in text:
        raise ValueError(f"decimal literals are not exact: {text!r}")
    try:
        expr = sympy.expand(sympy.sympify(text, locals={"t": _T}, rational=True))
    except (sympy.SympifyError, SyntaxError, TypeError) as e:
        raise ValueError(f"cannot parse Laurent expression {text!r}") from e
    terms: dict[int, Any] = {}
    for term in sympy.Add.make_args(expr):
        coefficient, exponent = term.as_coeff_exponent(_T)
        if not coefficient.is_Rational or not exponent.is_Integer:
            raise ValueError(f"{text!r} is not a Laurent polynomial in t")
        key = int(exponent)
        terms[key] = terms.get(key, _ZERO) + mpq(int(coefficient.p), int(coefficient.q))
    return field.element(terms)


def parse_q(text: str, field: Field) -> Scalar:
    """Parse a q specification and enforce ``|q| = 1``."""
    q = parse_scalar(text, field)
    if q.log_norm() != LogNorm(0):
        raise ValueError(f"q must satisfy |q| = 1, got log|q| = {q.log_norm()}")
    return q

"""Univariate q-series with coefficients in the rational function field Q(q).

Coefficients are exact elements of ``sympy``'s ``QQ(q)``; they are only
turned into field scalars by :meth:`QDilogSeries.evaluate` once a working
``q`` is fixed. Formal ``exp``/``log`` use the usual first-order recurrences
and need only division by integers.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

from gmpy2 import mpq
from loguru import logger
from sympy import QQ
from sympy.polys.fields import field as fraction_field

from .exceptions import RootOfUnityError
from .nascalar import Scalar

QQ_q, q = fraction_field("q", QQ)

Q_ONE = QQ_q(1)
Q_ZERO = QQ_q(0)


def series_log(coeffs: Sequence[Any], zero: Any) -> list[Any]:
    """Formal log of ``sum a_n x^n`` with ``a_0 = 1``.

    ``l_n = a_n - (1/n) sum_{k<n} k l_k a_{n-k}``.
    """
    if not coeffs or coeffs[0] != 1:
        raise ValueError("formal log needs constant term 1")
    out = [zero]
    for n in range(1, len(coeffs)):
        acc = zero
        for k in range(1, n):
            if out[k] != 0 and coeffs[n - k] != 0:
                acc = acc + out[k] * coeffs[n - k] * k
        out.append(coeffs[n] - acc / n)
    return out


def series_exp(coeffs: Sequence[Any], one: Any, zero: Any) -> list[Any]:
    """Formal exp of ``sum l_n x^n`` with ``l_0 = 0``: ``n e_n = sum k l_k e_{n-k}``."""
    if coeffs and coeffs[0] != 0:
        raise ValueError("formal exp needs constant term 0")
    out = [one]
    for n in range(1, len(coeffs)):
        acc = zero
        for k in range(1, n + 1):
            if coeffs[k] != 0:
                acc = acc + coeffs[k] * out[n - k] * k
        out.append(acc / n)
    return out


def q_pochhammer(n: int) -> Any:
    """``(q;q)_n = prod_{1<=k<=n} (1 - q^k)``."""
    value = Q_ONE
    for k in range(1, n + 1):
        value = value * (1 - q**k)
    return value


def q_integer(n: int) -> Any:
    """``[n]_q = 1 + q + ... + q^{n-1}``."""
    return sum((q**k for k in range(n)), Q_ZERO)


def _poly_coefficients(poly: Any) -> dict[int, Any]:
    return {
        int(monom[0]): mpq(int(c.numerator), int(c.denominator))
        for monom, c in poly.terms()
    }


def _eval_poly(coeffs: dict[int, Any], powers: Callable[[int], Any], zero: Any) -> Any:
    total = zero
    for e, c in coeffs.items():
        total = total + powers(e) * c
    return total


@dataclass(frozen=True)
class QDilogSeries:
    """Truncated ``sum_{n<=order} c_n x^n`` with ``c_n`` in ``Q(q)``."""

    coefficients: tuple[Any, ...]

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def coefficient(self, n: int) -> Any:
        return self.coefficients[n] if n < len(self.coefficients) else Q_ZERO

    def __mul__(self, other: QDilogSeries | Any) -> QDilogSeries:
        if not isinstance(other, QDilogSeries):
            return QDilogSeries(tuple(c * other for c in self.coefficients))
        order = min(self.order, other.order)
        out = [Q_ZERO] * (order + 1)
        for i, a in enumerate(self.coefficients[: order + 1]):
            for j in range(order + 1 - i):
                out[i + j] = out[i + j] + a * other.coefficients[j]
        return QDilogSeries(tuple(out))

    def substitute_scale(self, factor: Any) -> QDilogSeries:
        """``x -> factor * x`` for a ``Q(q)`` factor."""
        return QDilogSeries(
            tuple(c * factor**n for n, c in enumerate(self.coefficients))
        )

    def log(self) -> QDilogSeries:
        return QDilogSeries(tuple(series_log(self.coefficients, Q_ZERO)))

    def exp(self) -> QDilogSeries:
        return QDilogSeries(tuple(series_exp(self.coefficients, Q_ONE, Q_ZERO)))

    def evaluate(self, q_value: Scalar) -> list[Scalar]:
        """Coefficients at a concrete ``q``; a vanishing denominator is a root of unity."""
        field = q_value.field
        cache: dict[int, Scalar] = {0: field.one}

        def power(e: int) -> Scalar:
            if e not in cache:
                cache[e] = q_value**e
            return cache[e]

        out: list[Scalar] = []
        for n, c in enumerate(self.coefficients):
            numer = _eval_poly(_poly_coefficients(c.numer), power, field.zero)
            denom = _eval_poly(_poly_coefficients(c.denom), power, field.zero)
            if denom.is_zero():
                raise RootOfUnityError(
                    f"denominator of coefficient {n} vanishes at q = {q_value}"
                )
            out.append(numer / denom)
        return out

    def limit_at_one(self) -> list[Any]:
        """Coefficients at ``q = 1`` as exact rationals."""
        out = []
        for n, c in enumerate(self.coefficients):
            numer = sum(_poly_coefficients(c.numer).values(), mpq(0))
            denom = sum(_poly_coefficients(c.denom).values(), mpq(0))
            if denom == 0:
                raise RootOfUnityError(f"coefficient {n} has a pole at q = 1")
            out.append(numer / denom)
        return out


def qpochhammer_inf(order: int) -> QDilogSeries:
    """``(x;q)_inf = sum_n (-1)^n q^{n(n-1)/2} x^n / (q;q)_n`` up to ``x^order``."""
    if order < 0:
        raise ValueError(f"order must be non-negative, got {order}")
    coeffs = [
        (-1) ** n * q ** (n * (n - 1) // 2) / q_pochhammer(n) for n in range(order + 1)
    ]
    return QDilogSeries(tuple(coeffs))


def qdilog(order: int) -> QDilogSeries:
    """``Li_{2,q}(y) = (q - 1) log (-y;q)_inf`` up to ``y^order``.

    Coefficient ``n`` reduces to ``(-1)^n / (n [n]_q)``.
    """
    pochhammer = qpochhammer_inf(order).substitute_scale(-Q_ONE)
    logged = pochhammer.log()
    logger.debug("Built q-dilogarithm to order {order}", order=order)
    return logged * (q - 1)


def dilog_exponent(order: int, power: int = 1) -> QDilogSeries:
    """``power * Li_{2,q}(w) / (q - 1)``: the log of ``(-w;q)_inf^power``."""
    return qpochhammer_inf(order).substitute_scale(-Q_ONE).log() * power


def classical_dilog(order: int, power: int = 1) -> list[Any]:
    """``power * sum_{1<=n<=order} (-1)^n w^n / n^2`` as exact rationals."""
    return [mpq(0)] + [
        mpq(power * (-1) ** n, n * n) for n in range(1, order + 1)
    ]

"""Banded operators on a finite window of a Banach basis.

An operator is recorded by its matrix on basis vectors ``e_lo .. e_hi``
(``T^i`` for the shift representation, ``e_m`` for quantum GL2). The basis
vector ``e_i`` has log-norm ``i * rho``, so the operator log-norm is the
max over entries of ``log|a_ij| + rho * (i - j)``.

Columns within ``bandwidth`` of a window edge may miss contributions from
basis vectors outside the window; only the interior is trusted. A lower
edge flagged ``exact_lower`` is a true boundary (``e_m = 0`` below it) and
needs no margin.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from typing import Any

from .exceptions import FieldMismatchError, WindowError
from .nascalar import NEG_INF, Field, LogNorm, Scalar, log_max, to_rational

Entry = tuple[int, int]


class ShiftOperator:
    """Matrix ``{(row, col): a}`` of an operator on the window ``[lo, hi]``."""

    __slots__ = ("field", "lo", "hi", "entries", "rho", "bandwidth", "exact_lower")
    __hash__ = None  # type: ignore[assignment]

    def __init__(
        self,
        field: Field,
        lo: int,
        hi: int,
        entries: Mapping[Entry, Any],
        rho: Any = 0,
        bandwidth: int = 0,
        exact_lower: bool = False,
    ) -> None:
        if hi < lo:
            raise WindowError(f"empty window [{lo}, {hi}]")
        self.field = field
        self.lo = lo
        self.hi = hi
        self.rho = to_rational(rho)
        self.bandwidth = bandwidth
        self.exact_lower = exact_lower
        table: dict[Entry, Scalar] = {}
        for (i, j), value in entries.items():
            if not (lo <= i <= hi and lo <= j <= hi):
                continue
            c = field.coerce(value)
            if not c.is_zero():
                table[(i, j)] = c
        self.entries = table

    @classmethod
    def identity(
        cls, field: Field, lo: int, hi: int, rho: Any = 0, exact_lower: bool = False
    ) -> ShiftOperator:
        return cls(field, lo, hi, {(i, i): 1 for i in range(lo, hi + 1)}, rho, 0, exact_lower)

    @classmethod
    def from_action(
        cls,
        field: Field,
        lo: int,
        hi: int,
        action: Callable[[int], Iterable[tuple[int, Any]]],
        rho: Any = 0,
        bandwidth: int = 1,
        exact_lower: bool = False,
    ) -> ShiftOperator:
        """Build from ``action(j) -> [(i, a_ij), ...]``, the image of ``e_j``."""
        entries: dict[Entry, Any] = {}
        for j in range(lo, hi + 1):
            for i, value in action(j):
                entries[(i, j)] = value
        return cls(field, lo, hi, entries, rho, bandwidth, exact_lower)

    # window bookkeeping

    @property
    def interior(self) -> tuple[int, int]:
        """Columns whose images are exact in the window."""
        low = self.lo if self.exact_lower else self.lo + self.bandwidth
        return low, self.hi - self.bandwidth

    def _check_interior(self) -> tuple[int, int]:
        low, high = self.interior
        if high < low:
            raise WindowError(
                f"window [{self.lo}, {self.hi}] too small for bandwidth {self.bandwidth}"
            )
        return low, high

    def _compatible(self, other: ShiftOperator) -> None:
        if (other.lo, other.hi) != (self.lo, self.hi):
            raise WindowError(
                f"windows differ: [{self.lo}, {self.hi}] vs [{other.lo}, {other.hi}]"
            )
        if other.field != self.field and not self.field.embeds(other.field):
            raise FieldMismatchError("operators over different fields")
        if other.rho != self.rho:
            raise ValueError(f"log-radius mismatch: {self.rho} vs {other.rho}")

    # algebra

    def __matmul__(self, other: ShiftOperator) -> ShiftOperator:
        """``self`` after ``other``."""
        self._compatible(other)
        by_row: dict[int, list[tuple[int, Scalar]]] = {}
        for (i, k), a in self.entries.items():
            by_row.setdefault(k, []).append((i, a))
        out: dict[Entry, Scalar] = {}
        for (k, j), b in other.entries.items():
            for i, a in by_row.get(k, ()):
                c = a * b
                out[(i, j)] = out[(i, j)] + c if (i, j) in out else c
        return ShiftOperator(
            self.field,
            self.lo,
            self.hi,
            out,
            self.rho,
            self.bandwidth + other.bandwidth,
            self.exact_lower and other.exact_lower,
        )

    def __add__(self, other: ShiftOperator) -> ShiftOperator:
        self._compatible(other)
        out: dict[Entry, Scalar] = dict(self.entries)
        for key, value in other.entries.items():
            out[key] = out[key] + value if key in out else value
        return ShiftOperator(
            self.field,
            self.lo,
            self.hi,
            out,
            self.rho,
            max(self.bandwidth, other.bandwidth),
            self.exact_lower and other.exact_lower,
        )

    def __neg__(self) -> ShiftOperator:
        return self.scale(-1)

    def __sub__(self, other: ShiftOperator) -> ShiftOperator:
        return self + (-other)

    def scale(self, value: Any) -> ShiftOperator:
        s = self.field.coerce(value)
        return ShiftOperator(
            self.field,
            self.lo,
            self.hi,
            {key: a * s for key, a in self.entries.items()},
            self.rho,
            self.bandwidth,
            self.exact_lower,
        )

    # inspection

    def entry(self, row: int, col: int) -> Scalar:
        return self.entries.get((row, col), self.field.zero)

    def column(self, col: int) -> dict[int, Scalar]:
        return {i: a for (i, j), a in self.entries.items() if j == col}

    def interior_is_zero(self) -> bool:
        low, high = self._check_interior()
        return all(not (low <= j <= high) for (_, j) in self.entries)

    def interior_equals(self, other: ShiftOperator) -> bool:
        return (self - other).interior_is_zero()

    def to_json(self) -> dict[str, Any]:
        return {
            "window": [self.lo, self.hi],
            "rho": str(self.rho),
            "bandwidth": self.bandwidth,
            "entries": [
                [i, j, a.to_json()] for (i, j), a in sorted(self.entries.items())
            ],
        }

    def __repr__(self) -> str:
        return (
            f"ShiftOperator([{self.lo}, {self.hi}], {len(self.entries)} entries, "
            f"bandwidth={self.bandwidth})"
        )


@dataclass(frozen=True)
class OperatorNorm:
    """Operator log-norm with its stabilization flag.

    ``stable`` is False when the outer quarter of the trusted columns on a
    window side raised the sup; the value is then only a lower bound.
    """

    value: LogNorm
    stable: bool

    def to_json(self) -> dict[str, Any]:
        return {"log_norm": self.value.to_json(), "stable": self.stable}


def operator_log_norm(op: ShiftOperator) -> OperatorNorm:
    low, high = op._check_interior()
    span = high - low
    margin = span // 4
    core_low = low if op.exact_lower else low + margin
    core_high = high - margin
    per_column = {j: NEG_INF for j in range(low, high + 1)}
    for (i, j), a in op.entries.items():
        if low <= j <= high:
            value = a.log_norm() + op.rho * (i - j)
            if value > per_column[j]:
                per_column[j] = value
    overall = log_max(per_column.values())
    core = log_max(v for j, v in per_column.items() if core_low <= j <= core_high)
    return OperatorNorm(overall, bool(core == overall))


__all__ = [
    "OperatorNorm",
    "ShiftOperator",
    "operator_log_norm",
]

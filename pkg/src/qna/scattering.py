"""Wall-crossing automorphisms of the two-variable quantum torus.

The torus has ``xi eta = q eta xi`` (``xi = z_1``, ``eta = z_2``) and the
monomials ``R_(a,b) = z^(a,b)`` satisfy
``R_(a,b) R_(c,d) = q^(ad - bc) R_(c,d) R_(a,b)``.

A :class:`ScatteringFrame` fixes covectors ``alpha_1, alpha_2`` with
``alpha_1 ^ alpha_2 > 0`` and grades ``R_alpha1^-n1 R_alpha2^-n2`` in degree
``n1 + n2``. Group elements are logs ``g = sum c_(n1,n2) R_alpha1^-n1
R_alpha2^-n2`` acting by ``f -> e^g f e^-g``; everything is exact modulo
degree above the frame order.

For generic ``q`` a group element is carried by its exponential ``E = e^g``
in the truncated torus (conjugations compose like products of ``E``). At
``q = 1`` the torus is commutative and logs act through the Poisson bracket
``{z^a, z^b} = phi(a, b) z^(a+b)``, the ``q -> 1`` limit of
``[., .] / (q - 1)``; there automorphisms are carried by generator images.
"""

from __future__ import annotations

import math
import time
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import total_ordering
from typing import Any

from gmpy2 import mpq
from loguru import logger

from .exceptions import (
    AdmissibilityError,
    ContractionError,
    ConvergenceError,
    TwistMismatchError,
)
from .nascalar import LogNorm, Scalar, to_rational
from .qseries import classical_dilog, dilog_exponent, qdilog, qpochhammer_inf
from .qtorus import (
    QSeries,
    Truncation,
    TwistData,
    check_image_relations,
    qt_mul,
    substitute_hom,
)

Point = tuple[Any, Any]
Covector = tuple[int, int]
Index = tuple[int, int]

SCHEDULES = ("batch", "forward", "reverse")


def wedge(a: Sequence[Any], b: Sequence[Any]) -> Any:
    return a[0] * b[1] - a[1] * b[0]


def pairing(a: Sequence[Any], x: Sequence[Any]) -> Any:
    return a[0] * x[0] + a[1] * x[1]


def _point(x: Iterable[Any]) -> Point:
    px, py = (to_rational(v) for v in x)
    return (px, py)


@total_ordering
@dataclass(frozen=True)
class Slope:
    """Ray ``n2/n1`` in ``[0, +inf]``, stored as a primitive pair."""

    n1: int
    n2: int

    def __post_init__(self) -> None:
        if self.n1 < 0 or self.n2 < 0 or (self.n1 == 0 and self.n2 == 0):
            raise ValueError(f"({self.n1}, {self.n2}) does not define a slope")
        g = math.gcd(self.n1, self.n2)
        object.__setattr__(self, "n1", self.n1 // g)
        object.__setattr__(self, "n2", self.n2 // g)

    @classmethod
    def parse(cls, text: str) -> Slope:
        text = text.strip()
        if text in {"inf", "oo", "infinity"}:
            return cls(0, 1)
        value = to_rational(text)
        return cls(int(value.denominator), int(value.numerator))

    @property
    def is_infinite(self) -> bool:
        return self.n1 == 0

    def _key(self) -> tuple[int, Any]:
        return (1, mpq(0)) if self.n1 == 0 else (0, mpq(self.n2, self.n1))

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Slope):
            return NotImplemented
        return self._key() < other._key()

    def __str__(self) -> str:
        return "inf" if self.n1 == 0 else str(mpq(self.n2, self.n1))


SLOPE_ZERO = Slope(1, 0)
SLOPE_INFINITY = Slope(0, 1)


@dataclass(frozen=True)
class ScatteringFrame:
    """Covectors ``alpha_1, alpha_2`` and the filtration order ``N``."""

    twist: TwistData
    alpha1: Covector
    alpha2: Covector
    order: int
    _monomials: dict[Index, QSeries] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.twist.n != 2:
            raise TwistMismatchError("scattering frames need the rank-2 torus")
        object.__setattr__(self, "alpha1", tuple(int(a) for a in self.alpha1))
        object.__setattr__(self, "alpha2", tuple(int(a) for a in self.alpha2))
        if self.det <= 0:
            raise ValueError(
                f"alpha1 ^ alpha2 must be positive, got {self.det} for "
                f"{self.alpha1}, {self.alpha2}"
            )
        if self.order < 0:
            raise ValueError(f"order must be non-negative, got {self.order}")

    __hash__ = None  # type: ignore[assignment]

    @classmethod
    def standard(cls, q: Scalar, order: int) -> ScatteringFrame:
        """``xi eta = q eta xi`` with ``alpha = dx, dy``."""
        return cls(TwistData.two_variable(q), (1, 0), (0, 1), order)

    @property
    def det(self) -> int:
        return int(wedge(self.alpha1, self.alpha2))

    @property
    def weights(self) -> tuple[Any, Any]:
        (a1x, a1y), (a2x, a2y) = self.alpha1, self.alpha2
        return (mpq(a1y - a2y, self.det), mpq(a2x - a1x, self.det))

    @property
    def truncation(self) -> Truncation:
        return Truncation(self.weights, self.order)

    def with_order(self, order: int) -> ScatteringFrame:
        return ScatteringFrame(self.twist, self.alpha1, self.alpha2, order)

    def degree(self, exponent: Sequence[int]) -> Any:
        w = self.weights
        return w[0] * exponent[0] + w[1] * exponent[1]

    def exponent(self, index: Index) -> tuple[int, int]:
        n1, n2 = index
        return (
            -(n1 * self.alpha1[0] + n2 * self.alpha2[0]),
            -(n1 * self.alpha1[1] + n2 * self.alpha2[1]),
        )

    def ray_index(self, exponent: Sequence[int]) -> tuple[Any, Any]:
        """``(n1, n2)`` with ``z^exponent`` proportional to ``R_alpha1^-n1 R_alpha2^-n2``."""
        mx, my = exponent
        (a1x, a1y), (a2x, a2y) = self.alpha1, self.alpha2
        return (mpq(-a2y * mx + a2x * my, self.det), mpq(a1y * mx - a1x * my, self.det))

    def ray_monomial(self, n1: int, n2: int) -> QSeries:
        """``R_alpha1^-n1 R_alpha2^-n2`` in normal order."""
        key = (n1, n2)
        if key not in self._monomials:
            left = QSeries.monomial(self.twist, self.exponent((n1, 0)))
            right = QSeries.monomial(self.twist, self.exponent((0, n2)))
            self._monomials[key] = qt_mul(left, right)
        return self._monomials[key]

    def ray_coefficient(self, n1: int, n2: int) -> Scalar:
        """Normal-ordering factor of :meth:`ray_monomial` (a power of ``q``)."""
        return self.ray_monomial(n1, n2).coefficient(self.exponent((n1, n2)))

    def generator(self, i: int) -> QSeries:
        return QSeries.generator(self.twist, i)

    def element(self, log: GroupLog) -> QSeries:
        """``e^g`` in the truncated torus."""
        return log.exponential()

    def log(self, element: QSeries, base: Sequence[Any]) -> GroupLog:
        """Inverse of :meth:`element`: ``log E = sum (-1)^(k+1) (E - 1)^k / k``."""
        truncation = self.truncation
        x = (element - 1).truncated(truncation, self.order)
        if any(truncation.degree(e) <= 0 for e in x.terms):
            raise ValueError("element is not unipotent in this frame")
        total = QSeries.zero(self.twist)
        power = QSeries.one(self.twist)
        k = 0
        while True:
            k += 1
            power = qt_mul(power, x, truncation, self.order)
            if power.is_zero():
                break
            sign = 1 if k % 2 else -1
            total = total + power.scale(mpq(sign, k))
        return GroupLog.from_series(self, base, total)


@dataclass(eq=False)
class GroupLog:
    """``g = sum c_(n1,n2) R_alpha1^-n1 R_alpha2^-n2`` anchored at ``base``.

    Coefficients with ``n1 + n2`` above the frame order are dropped.
    Admissibility ``log|c| - <n1 alpha1 + n2 alpha2, base> <= 0`` is
    enforced for every stored coefficient.
    """

    frame: ScatteringFrame
    base: Point
    coefficients: Mapping[Index, Any]

    def __post_init__(self) -> None:
        self.base = _point(self.base)
        field_ = self.frame.twist.field
        table: dict[Index, Scalar] = {}
        for key, value in self.coefficients.items():
            n1, n2 = int(key[0]), int(key[1])
            if n1 < 0 or n2 < 0 or n1 + n2 == 0:
                raise ValueError(f"group-log index ({n1}, {n2}) outside the positive cone")
            if n1 + n2 > self.frame.order:
                continue
            c = field_.coerce(value)
            if not c.is_zero():
                table[(n1, n2)] = c
        self.coefficients = dict(sorted(table.items()))
        for (n1, n2), c in self.coefficients.items():
            covector = (
                n1 * self.frame.alpha1[0] + n2 * self.frame.alpha2[0],
                n1 * self.frame.alpha1[1] + n2 * self.frame.alpha2[1],
            )
            excess = c.log_norm() - pairing(covector, self.base)
            if excess > LogNorm(0):
                raise AdmissibilityError(
                    f"coefficient {c} at ({n1}, {n2}) is inadmissible at base "
                    f"{tuple(str(v) for v in self.base)}: excess {excess}"
                )

    @classmethod
    def zero(cls, frame: ScatteringFrame, base: Sequence[Any]) -> GroupLog:
        return cls(frame, _point(base), {})

    @classmethod
    def from_series(
        cls, frame: ScatteringFrame, base: Sequence[Any], series: QSeries
    ) -> GroupLog:
        coefficients: dict[Index, Scalar] = {}
        for exponent, c in series.terms.items():
            n1, n2 = frame.ray_index(exponent)
            if n1.denominator != 1 or n2.denominator != 1 or n1 < 0 or n2 < 0:
                raise ValueError(f"monomial z^{exponent} is not in the positive cone")
            n1, n2 = int(n1), int(n2)
            coefficients[(n1, n2)] = c / frame.ray_coefficient(n1, n2)
        return cls(frame, _point(base), coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def series(self) -> QSeries:
        total = QSeries.zero(self.frame.twist)
        for (n1, n2), c in self.coefficients.items():
            total = total + self.frame.ray_monomial(n1, n2).scale(c)
        return total

    def slopes(self) -> list[Slope]:
        return sorted({Slope(n1, n2) for n1, n2 in self.coefficients})

    def component(self, slope: Slope) -> GroupLog:
        return GroupLog(
            self.frame,
            self.base,
            {k: c for k, c in self.coefficients.items() if Slope(*k) == slope},
        )

    def at(self, base: Sequence[Any]) -> GroupLog:
        """The same element re-anchored (admissibility is re-checked)."""
        return GroupLog(self.frame, _point(base), self.coefficients)

    def exponential(self, bound: Any = None) -> QSeries:
        """``e^g`` up to degree ``bound`` (default: the frame order)."""
        limit = self.frame.order if bound is None else bound
        return _series_exp(self.series(), self.frame.truncation, limit)

    def automorphism(self) -> WallAutomorphism:
        images = [
            conjugate_by_exp(self, self.frame.generator(i)) for i in range(2)
        ]
        return WallAutomorphism(self.frame, images, check=False)

    def __add__(self, other: GroupLog) -> GroupLog:
        if other.frame != self.frame:
            raise TwistMismatchError("group logs in different frames")
        merged: dict[Index, Scalar] = dict(self.coefficients)
        for k, c in other.coefficients.items():
            merged[k] = merged[k] + c if k in merged else c
        return GroupLog(self.frame, self.base, merged)

    def same_as(self, other: GroupLog) -> bool:
        if self.coefficients.keys() != other.coefficients.keys():
            return False
        return all(c == other.coefficients[k] for k, c in self.coefficients.items())

    def to_json(self) -> dict[str, Any]:
        return {
            "frame": [list(self.frame.alpha1), list(self.frame.alpha2)],
            "coeffs": [
                [n1, n2, c.to_json()] for (n1, n2), c in self.coefficients.items()
            ],
        }


@dataclass(eq=False)
class SlopeFactor:
    """An element of the commutative slope subgroup ``G_slope``."""

    slope: Slope
    log: GroupLog

    def __post_init__(self) -> None:
        for key in self.log.coefficients:
            if Slope(*key) != self.slope:
                raise ValueError(
                    f"index {key} is off the ray of slope {self.slope}"
                )

    @property
    def frame(self) -> ScatteringFrame:
        return self.log.frame

    def ray_coefficients(self) -> dict[int, Scalar]:
        """Coefficients keyed by the multiple ``k`` of the primitive ray."""
        step = self.slope.n1 or self.slope.n2
        return {
            (n1 or n2) // step: c for (n1, n2), c in self.log.coefficients.items()
        }

    def is_identity(self) -> bool:
        return self.log.is_zero()


def slope_component(g: GroupLog, slope: Slope) -> SlopeFactor:
    return SlopeFactor(slope, g.component(slope))


# -- brackets and exponentials ----------------------------------------------


def _commutator(a: QSeries, b: QSeries, truncation: Truncation, bound: Any) -> QSeries:
    return qt_mul(a, b, truncation, bound) - qt_mul(b, a, truncation, bound)


def poisson_bracket(
    a: QSeries, b: QSeries, truncation: Truncation | None = None, bound: Any = None
) -> QSeries:
    """``{z^I, z^J} = phi(I, J) z^(I+J)`` extended bilinearly."""
    twist = a.twist
    out: dict[tuple[int, ...], Scalar] = {}
    for I, x in a.terms.items():
        for J, y in b.terms.items():
            weight = twist.phi(I, J)
            if not weight:
                continue
            K = tuple(i + j for i, j in zip(I, J))
            if truncation is not None and bound is not None:
                if truncation.degree(K) > bound:
                    continue
            c = x * y * weight
            out[K] = out[K] + c if K in out else c
    return QSeries(twist, out)


def _bracket(twist: TwistData) -> Any:
    return poisson_bracket if twist.is_classical else _commutator


def _series_exp(x: QSeries, truncation: Truncation, bound: Any) -> QSeries:
    total = QSeries.one(x.twist)
    term = total
    k = 0
    while True:
        k += 1
        term = qt_mul(term, x, truncation, bound).scale(mpq(1, k))
        if term.is_zero():
            return total
        total = total + term


def conjugate_by_exp(g: GroupLog, f: QSeries, order: int | None = None) -> QSeries:
    """``e^g f e^-g = f + [g, f] + [g, [g, f]]/2! + ...`` modulo degree > order.

    The degree is relative to the leading degree of ``f``. At ``q = 1`` the
    commutator is replaced by the Poisson bracket.
    """
    if f.is_zero():
        return f
    frame = g.frame
    truncation = frame.truncation
    depth = frame.order if order is None else order
    bound = f.min_degree(truncation) + depth
    bracket = _bracket(frame.twist)
    gs = g.series()
    term = f.truncated(truncation, bound)
    total = term
    k = 0
    while not term.is_zero() and not gs.is_zero():
        k += 1
        term = bracket(gs, term, truncation, bound).scale(mpq(1, k))
        total = total + term
    return total


# -- automorphisms ----------------------------------------------------------


class WallAutomorphism:
    """Automorphism recorded by the images of ``xi`` and ``eta``.

    Images are kept ``order`` degrees above the generator they replace and
    must be pro-unipotent: ``z_i`` itself with coefficient 1 plus terms of
    strictly higher degree.
    """

    __hash__ = None  # type: ignore[assignment]

    def __init__(
        self, frame: ScatteringFrame, images: Sequence[QSeries], check: bool = True
    ) -> None:
        if len(images) != 2:
            raise ValueError("a wall automorphism needs images of xi and eta")
        truncation = frame.truncation
        kept = []
        for i, image in enumerate(images):
            if image.twist != frame.twist:
                raise TwistMismatchError("image lives on a different twist")
            generator = frame.generator(i)
            ((exponent, _),) = generator.terms.items()
            lead = frame.degree(exponent)
            kept.append(image.truncated(truncation, lead + frame.order))
        self.frame = frame
        self.images: tuple[QSeries, QSeries] = (kept[0], kept[1])
        if check:
            self._check()

    def _check(self) -> None:
        truncation = self.frame.truncation
        for i, image in enumerate(self.images):
            ((exponent, _),) = self.frame.generator(i).terms.items()
            lead = self.frame.degree(exponent)
            if not bool(image.coefficient(exponent) == 1):
                raise ValueError(f"image of generator {i + 1} is not unipotent")
            for e in image.terms:
                if e != exponent and truncation.degree(e) <= lead:
                    raise ValueError(
                        f"image of generator {i + 1} has term z^{list(e)} "
                        "at or below the leading degree"
                    )
        check_image_relations(self.frame.twist, self.images, truncation)

    @classmethod
    def identity(cls, frame: ScatteringFrame) -> WallAutomorphism:
        return cls(frame, [frame.generator(0), frame.generator(1)], check=False)

    @property
    def order(self) -> int:
        return self.frame.order

    def __call__(self, f: QSeries) -> QSeries:
        return substitute_hom(
            self.images, f, self.frame.truncation, check_relations=False
        )

    def compose(self, other: WallAutomorphism) -> WallAutomorphism:
        """``self`` after ``other``."""
        self._same_frame(other)
        return WallAutomorphism(
            self.frame, [self(image) for image in other.images], check=False
        )

    def inverse(self) -> WallAutomorphism:
        """Fixed point of ``b(z_i) = z_i - b(a(z_i) - z_i)``, one degree per pass."""
        generators = [self.frame.generator(0), self.frame.generator(1)]
        deltas = [self.images[i] - generators[i] for i in range(2)]
        current = list(generators)
        truncation = self.frame.truncation
        for _ in range(self.frame.order + 1):
            current = [
                generators[i]
                - substitute_hom(current, deltas[i], truncation, check_relations=False)
                for i in range(2)
            ]
        return WallAutomorphism(self.frame, current, check=False)

    def is_identity(self) -> bool:
        return self == WallAutomorphism.identity(self.frame)

    def _same_frame(self, other: WallAutomorphism) -> None:
        if other.frame != self.frame:
            raise TwistMismatchError("automorphisms over different frames or orders")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WallAutomorphism):
            return NotImplemented
        if other.frame != self.frame:
            return False
        return all((a - b).is_zero() for a, b in zip(self.images, other.images))

    def __repr__(self) -> str:
        return f"WallAutomorphism(xi -> {self.images[0]!r}, eta -> {self.images[1]!r})"


def compose(a: WallAutomorphism, b: WallAutomorphism) -> WallAutomorphism:
    return a.compose(b)


def inverse(a: WallAutomorphism) -> WallAutomorphism:
    return a.inverse()


def elementary_wall(q: Scalar, variant: str = "inverse", order: int = 8) -> WallAutomorphism:
    """``xi -> xi (1 + eta^-1)`` (``"inverse"``) or ``xi -> xi (1 + eta)`` (``"direct"``).

    ``eta`` is fixed. The frames are ``(dx, dy)`` and ``((0,-1), dx)``, so the
    added monomial has degree 1 in both.
    """
    twist = TwistData.two_variable(q)
    if variant == "inverse":
        frame = ScatteringFrame(twist, (1, 0), (0, 1), order)
        shift = QSeries.generator(twist, 1, -1)
    elif variant == "direct":
        frame = ScatteringFrame(twist, (0, -1), (1, 0), order)
        shift = QSeries.generator(twist, 1, 1)
    else:
        raise ValueError(f"unknown wall variant {variant!r}; expected 'inverse' or 'direct'")
    xi, eta = frame.generator(0), frame.generator(1)
    return WallAutomorphism(frame, [qt_mul(xi, 1 + shift), eta])


# -- dilogarithm walls ------------------------------------------------------


def dilog_coefficients(twist: TwistData, order: int, power: int = 1) -> list[Scalar]:
    """Coefficients of ``power * Li_2,q(w) / (q - 1)`` in ``w`` (index 0 is zero).

    At ``q = 1`` these are the classical ``power * (-1)^n / n^2``.
    """
    field_ = twist.field
    if twist.is_classical:
        return [field_.coerce(c) for c in classical_dilog(order, power)]
    return dilog_exponent(order, power).evaluate(twist.q)


def dilog_wall(
    frame: ScatteringFrame,
    base: Sequence[Any],
    ray: Index,
    power: int = 1,
) -> SlopeFactor:
    """``exp(power * Li_2,q(w) / (q - 1))`` on ``w = R_alpha1^-a R_alpha2^-b``.

    Its exponential is ``(-w; q)_inf^power``.
    """
    slope = Slope(*ray)
    a, b = slope.n1, slope.n2
    steps = frame.order // (a + b)
    coefficients = dilog_coefficients(frame.twist, steps, power)
    w = frame.ray_monomial(a, b)
    total = QSeries.zero(frame.twist)
    w_power = QSeries.one(frame.twist)
    for k in range(1, steps + 1):
        w_power = qt_mul(w_power, w)
        total = total + w_power.scale(coefficients[k])
    return SlopeFactor(slope, GroupLog.from_series(frame, base, total))


# -- factorization ----------------------------------------------------------


def factorize(
    g_inf: SlopeFactor,
    g_0: SlopeFactor,
    order: int | None = None,
    schedule: str = "batch",
) -> list[SlopeFactor]:
    """Write ``g_inf g_0`` as the slope-ordered product ``g_0 ... g_lambda ... g_inf``.

    Works degree by degree: at degree ``d`` the current ordered product is
    compared with the target and the degree-``d`` discrepancy, which lives
    on rays of total degree ``d``, is added to the logs of those rays. Each
    ``G_lambda`` is commutative, so a degree-``d`` change to one log moves
    the product by exactly that change at degree ``d``. ``schedule`` picks
    whether all rays of a degree are corrected at once or one at a time in
    increasing or decreasing slope order.
    """
    if schedule not in SCHEDULES:
        raise ValueError(f"unknown schedule {schedule!r}; expected one of {SCHEDULES}")
    frame = g_0.frame
    if g_inf.frame != frame:
        raise TwistMismatchError("factors live in different frames")
    if g_0.slope != SLOPE_ZERO or g_inf.slope != SLOPE_INFINITY:
        raise ValueError("factorize expects factors of slope 0 and slope inf")
    if g_0.log.base != g_inf.log.base:
        raise ValueError("factors are anchored at different base points")
    depth = frame.order if order is None else min(order, frame.order)
    base = g_0.log.base
    started = time.perf_counter()

    if frame.twist.is_classical:
        logs = _factorize_classical(g_inf, g_0, depth, schedule)
    else:
        logs = _factorize_quantum(g_inf, g_0, depth, schedule)

    factors = []
    for slope in sorted(logs):
        log = GroupLog(frame, base, logs[slope])
        if not log.is_zero():
            factors.append(SlopeFactor(slope, log))
    logger.debug(
        "Factorized to order {order}: slopes {slopes} in {elapsed:.3f}s",
        order=depth,
        slopes=[str(f.slope) for f in factors],
        elapsed=time.perf_counter() - started,
    )
    return factors


def _pick(slopes: Iterable[Slope], schedule: str) -> list[Slope]:
    ordered = sorted(slopes)
    if schedule == "forward":
        return ordered[:1]
    if schedule == "reverse":
        return ordered[-1:]
    return ordered


def _degree_discrepancy(
    frame: ScatteringFrame, diff: QSeries, degree: int
) -> dict[Slope, dict[Index, Scalar]]:
    truncation = frame.truncation
    grouped: dict[Slope, dict[Index, Scalar]] = {}
    for exponent, c in diff.terms.items():
        d = truncation.degree(exponent)
        if d < degree:
            raise ConvergenceError(
                f"discrepancy z^{list(exponent)} at degree {d} below current degree {degree}"
            )
        if d > degree:
            continue
        n1, n2 = frame.ray_index(exponent)
        if n1.denominator != 1 or n2.denominator != 1 or n1 < 0 or n2 < 0:
            raise ConvergenceError(f"discrepancy z^{list(exponent)} is off the lattice cone")
        key = (int(n1), int(n2))
        grouped.setdefault(Slope(*key), {})[key] = c / frame.ray_coefficient(*key)
    return grouped


def _add_into(
    logs: dict[Slope, dict[Index, Scalar]], updates: dict[Slope, dict[Index, Scalar]]
) -> None:
    for slope, terms in updates.items():
        target = logs.setdefault(slope, {})
        for key, c in terms.items():
            target[key] = target[key] + c if key in target else c


def _factorize_quantum(
    g_inf: SlopeFactor, g_0: SlopeFactor, depth: int, schedule: str
) -> dict[Slope, dict[Index, Scalar]]:
    frame = g_0.frame
    truncation = frame.truncation
    target = qt_mul(
        g_inf.log.exponential(depth), g_0.log.exponential(depth), truncation, depth
    )
    logs: dict[Slope, dict[Index, Scalar]] = {}
    for degree in range(1, depth + 1):
        while True:
            product = QSeries.one(frame.twist)
            for slope in sorted(logs):
                log = GroupLog(frame, g_0.log.base, logs[slope])
                product = qt_mul(product, log.exponential(degree), truncation, degree)
            diff = (target - product).truncated(truncation, degree)
            grouped = _degree_discrepancy(frame, diff, degree)
            if not grouped:
                break
            chosen = _pick(grouped, schedule)
            _add_into(logs, {s: grouped[s] for s in chosen})
    return logs


def _factorize_classical(
    g_inf: SlopeFactor, g_0: SlopeFactor, depth: int, schedule: str
) -> dict[Slope, dict[Index, Scalar]]:
    frame = g_0.frame
    truncation = frame.truncation
    twist = frame.twist
    generators = [frame.generator(0), frame.generator(1)]
    leads = [frame.degree(next(iter(g.terms))) for g in generators]
    target = g_inf.log.automorphism().compose(g_0.log.automorphism())
    logs: dict[Slope, dict[Index, Scalar]] = {}
    for degree in range(1, depth + 1):
        while True:
            product = WallAutomorphism.identity(frame)
            for slope in sorted(logs):
                product = product.compose(
                    GroupLog(frame, g_0.log.base, logs[slope]).automorphism()
                )
            deltas = [
                (target.images[i] - product.images[i]).truncated(
                    truncation, leads[i] + degree
                )
                for i in range(2)
            ]
            if all(d.is_zero() for d in deltas):
                break
            hamiltonian = _recover_hamiltonian(twist, generators, deltas)
            for i in range(2):
                check = poisson_bracket(hamiltonian, generators[i])
                if not (check - deltas[i]).is_zero():
                    raise ConvergenceError(
                        f"degree-{degree} discrepancy is not a Hamiltonian derivation"
                    )
            grouped = _degree_discrepancy(frame, hamiltonian, degree)
            chosen = _pick(grouped, schedule)
            _add_into(logs, {s: grouped[s] for s in chosen})
    return logs


def _recover_hamiltonian(
    twist: TwistData, generators: Sequence[QSeries], deltas: Sequence[QSeries]
) -> QSeries:
    """``h`` with ``{h, z_i} = delta_i``, read off term by term."""
    units = [next(iter(g.terms)) for g in generators]
    found: dict[tuple[int, ...], Scalar] = {}
    for i in range(2):
        e = units[i]
        for K, a in deltas[i].terms.items():
            m = tuple(k - u for k, u in zip(K, e))
            weight = twist.phi(m, e)
            if weight and m not in found:
                found[m] = a / weight
    return QSeries(twist, found)


# -- five-term identity -----------------------------------------------------


@dataclass
class FiveTermReport:
    """Outcome of a pentagon check."""

    passed: bool
    slopes: list[str]
    middle: SlopeFactor | None
    argument: Scalar | None
    reason: str

    def to_json(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "slopes": self.slopes,
            "argument": self.argument.to_json() if self.argument is not None else None,
            "middle": self.middle.log.to_json() if self.middle is not None else None,
            "reason": self.reason,
        }


def five_term_check(
    q: Scalar, order: int, power: int = 1, schedule: str = "batch"
) -> FiveTermReport:
    """Factor the product of two dilogarithm walls on ``dx`` and ``dy``.

    Passes when exactly one middle factor appears, on slope 1, and it is a
    dilogarithm wall in ``u * R_alpha1^-1 R_alpha2^-1`` for some scalar ``u``.
    ``power = 0`` uses identity walls and passes vacuously.
    """
    frame = ScatteringFrame.standard(q, order)
    base = (1, 1)
    if power == 0:
        return FiveTermReport(True, [], None, None, "identity walls")
    g_0 = dilog_wall(frame, base, (1, 0), power)
    g_inf = dilog_wall(frame, base, (0, 1), power)
    factors = factorize(g_inf, g_0, schedule=schedule)
    slopes = [str(f.slope) for f in factors]
    middle = [f for f in factors if f.slope not in (SLOPE_ZERO, SLOPE_INFINITY)]
    if order < 2:
        passed = not middle
        return FiveTermReport(passed, slopes, None, None, "no middle degree below 2")
    if len(middle) != 1 or middle[0].slope != Slope(1, 1):
        return FiveTermReport(
            False, slopes, None, None, f"expected one middle factor of slope 1, got {slopes}"
        )
    factor = middle[0]
    outer = [f for f in factors if f.slope in (SLOPE_ZERO, SLOPE_INFINITY)]
    if len(outer) != 2 or not (
        outer[0].log.same_as(g_0.log) and outer[1].log.same_as(g_inf.log)
    ):
        return FiveTermReport(False, slopes, factor, None, "outer factors changed")
    argument, ok = _dilog_argument(frame, factor, power)
    reason = "pentagon holds" if ok else "middle factor is not a dilogarithm wall"
    return FiveTermReport(ok, slopes, factor, argument, reason)


def _dilog_argument(
    frame: ScatteringFrame, factor: SlopeFactor, power: int
) -> tuple[Scalar | None, bool]:
    """Find ``u`` with ``factor = power * Li_2,q(u M) / (q - 1)``, ``M`` the unit ray monomial."""
    a, b = factor.slope.n1, factor.slope.n2
    steps = frame.order // (a + b)
    reference = dilog_coefficients(frame.twist, steps, power)
    monomial = frame.ray_monomial(a, b)
    ((m_exp, m_coef),) = monomial.terms.items()
    series = factor.log.series()
    first = series.coefficient(m_exp)
    if first.is_zero():
        return None, False
    argument = first / (reference[1] * m_coef)
    scaled = monomial.scale(argument)
    expected = QSeries.zero(frame.twist)
    w_power = QSeries.one(frame.twist)
    for k in range(1, steps + 1):
        w_power = qt_mul(w_power, scaled)
        expected = expected + w_power.scale(reference[k])
    return argument, (expected - series).is_zero()


# -- wall transport ---------------------------------------------------------


def transport_wall(factor: SlopeFactor, constant: Scalar) -> SlopeFactor:
    """Scale the wall monomial by ``constant``: ``c_n -> constant^(n1+n2) c_n``.

    Needs ``|constant| < 1``; every coefficient norm then strictly drops.
    """
    if constant.log_norm() >= LogNorm(0):
        raise ContractionError(
            f"transport constant must have |C| < 1, got log|C| = {constant.log_norm()}"
        )
    log = factor.log
    moved = {
        (n1, n2): c * constant ** (n1 + n2) for (n1, n2), c in log.coefficients.items()
    }
    result = SlopeFactor(factor.slope, GroupLog(log.frame, log.base, moved))
    for key, c in result.log.coefficients.items():
        assert c.log_norm() < log.coefficients[key].log_norm()
    return result


# -- lines and the scattering tree ------------------------------------------


@dataclass(eq=False)
class Line:
    """Ray ``base + s * covector`` (``s >= 0``) carrying a wall.

    ``coefficients[k]`` multiplies ``z^(-k * covector)`` in the wall log.
    ``order`` is the global filtration order of one step along the ray:
    initial lines have order 1 and a term ``k`` counts ``k * order``.
    """

    ident: str
    twist: TwistData = field(repr=False)
    base: Point
    covector: Covector
    coefficients: Mapping[int, Any]
    kind: str = "initial"
    order: Any = 1
    parents: tuple[str, str] | None = None

    def __post_init__(self) -> None:
        self.base = _point(self.base)
        self.covector = (int(self.covector[0]), int(self.covector[1]))
        if math.gcd(*self.covector) != 1:
            raise ValueError(f"covector {self.covector} of line {self.ident} is not primitive")
        if self.kind not in ("initial", "composite"):
            raise ValueError(f"line kind must be 'initial' or 'composite', got {self.kind!r}")
        if self.kind == "composite" and not self.parents:
            raise ValueError(f"composite line {self.ident} needs parents")
        self.order = to_rational(self.order)
        field_ = self.twist.field
        table = {}
        for k, c in self.coefficients.items():
            if int(k) < 1:
                raise ValueError(f"line coefficient index must be positive, got {k}")
            value = field_.coerce(c)
            if not value.is_zero():
                table[int(k)] = value
        self.coefficients = dict(sorted(table.items()))

    def truncated(self, order: int) -> dict[int, Scalar]:
        return {k: c for k, c in self.coefficients.items() if k * self.order <= order}

    def point_at(self, s: Any) -> Point:
        s = to_rational(s)
        return (self.base[0] + s * self.covector[0], self.base[1] + s * self.covector[1])

    def slope_factor(
        self, frame: ScatteringFrame, slot: int, base: Point, order: int
    ) -> SlopeFactor:
        """Read the wall in ``frame`` where the covector is ``alpha_{slot+1}``."""
        keys = (lambda k: (k, 0)) if slot == 0 else (lambda k: (0, k))
        log = GroupLog(frame, base, {keys(k): c for k, c in self.truncated(order).items()})
        return SlopeFactor(SLOPE_ZERO if slot == 0 else SLOPE_INFINITY, log)


def intersection(l1: Line, l2: Line) -> tuple[Point, Any, Any] | None:
    """Common point ``p = l1(s1) = l2(s2)`` with ``s1, s2 >= 0``, or ``None``."""
    a1, a2 = l1.covector, l2.covector
    w = wedge(a1, a2)
    if w == 0:
        return None
    dx = l2.base[0] - l1.base[0]
    dy = l2.base[1] - l1.base[1]
    s1 = mpq(dx * a2[1] - dy * a2[0]) / w
    s2 = mpq(dx * a1[1] - dy * a1[0]) / w
    if s1 < 0 or s2 < 0:
        return None
    return l1.point_at(s1), s1, s2


def collide(l1: Line, l2: Line, order: int) -> list[Line]:
    """Composite lines born where ``l1`` and ``l2`` meet.

    The pair is ordered so that ``alpha_1 ^ alpha_2 > 0``; ``g_inf = l2``,
    ``g_0 = l1`` are factorized at the meeting point and each middle slope
    ``(n1, n2)`` becomes a line along ``n1 alpha_1 + n2 alpha_2``.
    """
    hit = intersection(l1, l2)
    if hit is None:
        return []
    point = hit[0]
    if wedge(l1.covector, l2.covector) < 0:
        l1, l2 = l2, l1
    if l1.twist != l2.twist:
        raise TwistMismatchError(f"lines {l1.ident} and {l2.ident} use different twists")
    frame = ScatteringFrame(l1.twist, l1.covector, l2.covector, order)
    g_0 = l1.slope_factor(frame, 0, point, order)
    g_inf = l2.slope_factor(frame, 1, point, order)
    if g_0.is_identity() or g_inf.is_identity():
        return []
    newborn = []
    for factor in factorize(g_inf, g_0, order):
        if factor.slope in (SLOPE_ZERO, SLOPE_INFINITY):
            continue
        a, b = factor.slope.n1, factor.slope.n2
        raw = (a * l1.covector[0] + b * l2.covector[0], a * l1.covector[1] + b * l2.covector[1])
        g = math.gcd(*raw)
        covector = (raw[0] // g, raw[1] // g)
        line_order = (a * l1.order + b * l2.order) / g
        coefficients: dict[int, Scalar] = {}
        for exponent, c in factor.log.series().terms.items():
            step = -exponent[0] // covector[0] if covector[0] else -exponent[1] // covector[1]
            if step * line_order <= order:
                coefficients[step] = c
        if not coefficients:
            continue
        newborn.append(
            Line(
                ident=f"({l1.ident}|{l2.ident})@{a}:{b}",
                twist=l1.twist,
                base=point,
                covector=covector,
                coefficients=coefficients,
                kind="composite",
                order=line_order,
                parents=(l1.ident, l2.ident),
            )
        )
    logger.debug(
        "Collision of {a} and {b} at {p}: {n} new lines",
        a=l1.ident,
        b=l2.ident,
        p=tuple(str(v) for v in point),
        n=len(newborn),
    )
    return newborn


@dataclass(frozen=True)
class Region:
    """Closed box ``[xmin, xmax] x [ymin, ymax]``."""

    xmin: Any
    ymin: Any
    xmax: Any
    ymax: Any

    def __post_init__(self) -> None:
        for name in ("xmin", "ymin", "xmax", "ymax"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))

    def contains(self, point: Point) -> bool:
        return bool(
            self.xmin <= point[0] <= self.xmax and self.ymin <= point[1] <= self.ymax
        )


def _related(l1: Line, l2: Line) -> bool:
    return bool(
        (l1.parents and l2.ident in l1.parents) or (l2.parents and l1.ident in l2.parents)
    )


def build_scattering_tree(
    initial: Sequence[Line], order: int, region: Region | None = None
) -> list[Line]:
    """Collide lines pairwise until no new wall of order ``<= order`` appears.

    Each round takes every unprocessed pair meeting inside ``region`` and
    processes the meeting points sorted by point, then by the pair's idents.
    Pairs where one line descends from the other, and meetings at the birth
    point of a composite line, are skipped.
    """
    lines = list(initial)
    if order <= 0 or len(lines) < 2:
        return lines
    # pairs whose walls are already present (re-ingested diagrams)
    seen: set[tuple[str, str]] = {
        tuple(sorted(ln.parents))  # type: ignore[misc]
        for ln in lines
        if ln.parents
    }
    rounds = 0
    while True:
        rounds += 1
        events = []
        for i in range(len(lines)):
            for j in range(i + 1, len(lines)):
                l1, l2 = lines[i], lines[j]
                key = tuple(sorted((l1.ident, l2.ident)))
                if key in seen:
                    continue
                seen.add(key)  # type: ignore[arg-type]
                if _related(l1, l2):
                    continue
                hit = intersection(l1, l2)
                if hit is None:
                    continue
                point = hit[0]
                if region is not None and not region.contains(point):
                    continue
                if any(ln.kind == "composite" and ln.base == point for ln in (l1, l2)):
                    continue
                events.append((point, key, l1, l2))
        if not events:
            break
        events.sort(key=lambda e: (e[0], e[1]))
        for _, _, l1, l2 in events:
            lines.extend(collide(l1, l2, order))
    logger.debug(
        "Scattering tree: {n} lines after {r} rounds", n=len(lines), r=rounds
    )
    return lines


__all__ = [
    "SCHEDULES",
    "SLOPE_INFINITY",
    "SLOPE_ZERO",
    "FiveTermReport",
    "GroupLog",
    "Line",
    "Region",
    "ScatteringFrame",
    "Slope",
    "SlopeFactor",
    "WallAutomorphism",
    "build_scattering_tree",
    "collide",
    "compose",
    "conjugate_by_exp",
    "dilog_coefficients",
    "dilog_wall",
    "elementary_wall",
    "factorize",
    "five_term_check",
    "intersection",
    "inverse",
    "poisson_bracket",
    "qdilog",
    "qpochhammer_inf",
    "slope_component",
    "transport_wall",
]

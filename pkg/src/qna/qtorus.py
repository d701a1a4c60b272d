"""Quantum tori and quantum affinoid series.

Elements are finitely supported tables ``{I: a_I}`` over normal-ordered
monomials ``z^I = z_1^{I_1} ... z_n^{I_n}``. The twist fixes the relations
``z_i z_j = q^{c_ij} z_j z_i`` for ``i > j`` so that

    z^I z^J = q^{kappa(I, J)} z^{I+J},   kappa(I, J) = sum_{i>j} c_ij I_i J_j.

Nothing infinite is ever stored: inversion and substitution take a
:class:`Truncation` (a rational weight vector plus a relative depth) and
drop every term whose weighted degree exceeds the leading degree by more
than the depth.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import sympy
from gmpy2 import mpq
from loguru import logger

from .exceptions import (
    NotInvertibleError,
    RelationError,
    TruncationError,
    TwistError,
    TwistMismatchError,
)
from .nascalar import (
    Field,
    LogNorm,
    Scalar,
    log_max,
    scalar_from_json,
    to_rational,
)

Exponent = tuple[int, ...]


@dataclass(eq=False)
class TwistData:
    """Commutation data ``z_i z_j = q^{c_ij} z_j z_i`` (``i > j``, zero-based)."""

    n: int
    commutation: Mapping[tuple[int, int], int]
    q: Scalar
    _pairs: tuple[tuple[int, int, int], ...] = dataclasses.field(init=False, repr=False)
    _q_powers: dict[int, Scalar] = dataclasses.field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise TwistError(f"rank must be positive, got {self.n}")
        pairs = []
        for (i, j), c in sorted(self.commutation.items()):
            if not (0 <= j < i < self.n):
                raise TwistError(
                    f"commutation index ({i}, {j}) must satisfy 0 <= j < i < {self.n}"
                )
            if int(c) != c:
                raise TwistError(f"commutation exponent c[{i},{j}] = {c} is not an integer")
            if c:
                pairs.append((i, j, int(c)))
        if self.q.log_norm() != LogNorm(0):
            raise TwistError(f"|q| must be 1, got log|q| = {self.q.log_norm()}")
        self.commutation = {(i, j): c for i, j, c in pairs}
        self._pairs = tuple(pairs)
        self._q_powers = {0: self.q.field.one, 1: self.q}

    @classmethod
    def two_variable(cls, q: Scalar, c21: int = -1) -> TwistData:
        """Rank-2 twist ``z_2 z_1 = q^{c21} z_1 z_2``; the default gives ``xi eta = q eta xi``."""
        return cls(2, {(1, 0): c21}, q)

    @classmethod
    def commutative(cls, n: int, field: Field) -> TwistData:
        return cls(n, {}, field.one)

    @property
    def field(self) -> Field:
        return self.q.field

    @property
    def is_classical(self) -> bool:
        """True when ``q == 1`` exactly, so the torus is commutative."""
        return bool(self.q == 1) or not self._pairs

    def kappa(self, a: Exponent, b: Exponent) -> int:
        return sum(c * a[i] * b[j] for i, j, c in self._pairs)

    def phi(self, a: Exponent, b: Exponent) -> int:
        """Skew form with ``z^a z^b = q^{phi(a, b)} z^b z^a``."""
        return self.kappa(a, b) - self.kappa(b, a)

    def q_power(self, k: int) -> Scalar:
        cached = self._q_powers.get(k)
        if cached is None:
            cached = self.q**k
            self._q_powers[k] = cached
        return cached

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, TwistData):
            return NotImplemented
        return (
            self.n == other.n
            and self.commutation == other.commutation
            and self.q.field == other.q.field
            and bool(self.q == other.q)
        )

    __hash__ = None  # type: ignore[assignment]

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "c": [[i + 1, j + 1, c] for (i, j), c in sorted(self.commutation.items())],
            "q": self.q.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], field: Field | None = None) -> TwistData:
        q = scalar_from_json(data["q"], field)
        return cls(int(data["n"]), {(i - 1, j - 1): c for i, j, c in data.get("c", [])}, q)


@dataclass(frozen=True)
class Truncation:
    """Support bound: weighted degree ``<w, I>`` at most ``lead + order``."""

    weights: tuple[Any, ...]
    order: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(to_rational(w) for w in self.weights))
        if self.order < 0:
            raise ValueError(f"truncation order must be non-negative, got {self.order}")

    @classmethod
    def total_degree(cls, n: int, order: int) -> Truncation:
        return cls(tuple([1] * n), order)

    def degree(self, exponent: Exponent) -> Any:
        return sum((w * e for w, e in zip(self.weights, exponent) if e), mpq(0))


class QSeries:
    """Finitely supported element of the quantum torus of ``twist``."""

    __slots__ = ("twist", "terms")
    __hash__ = None  # type: ignore[assignment]

    def __init__(
        self,
        twist: TwistData,
        terms: Mapping[Sequence[int], Any] | Iterable[tuple[Sequence[int], Any]] = (),
    ) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        table: dict[Exponent, Scalar] = {}
        coerce = twist.field.coerce
        for exponent, coefficient in items:
            key = tuple(int(e) for e in exponent)
            if len(key) != twist.n:
                raise TwistError(
                    f"exponent {key} has length {len(key)}, twist rank is {twist.n}"
                )
            value = coerce(coefficient)
            table[key] = table[key] + value if key in table else value
        self.twist = twist
        self.terms = {k: v for k, v in table.items() if not v.is_zero()}

    @classmethod
    def _raw(cls, twist: TwistData, terms: dict[Exponent, Scalar]) -> QSeries:
        obj = cls.__new__(cls)
        obj.twist = twist
        obj.terms = terms
        return obj

    # constructors

    @classmethod
    def zero(cls, twist: TwistData) -> QSeries:
        return cls._raw(twist, {})

    @classmethod
    def one(cls, twist: TwistData) -> QSeries:
        return cls.monomial(twist, (0,) * twist.n)

    @classmethod
    def constant(cls, twist: TwistData, value: Any) -> QSeries:
        return cls(twist, {(0,) * twist.n: value})

    @classmethod
    def monomial(
        cls, twist: TwistData, exponent: Sequence[int], coefficient: Any = 1
    ) -> QSeries:
        return cls(twist, {tuple(exponent): coefficient})

    @classmethod
    def generator(cls, twist: TwistData, index: int, power: int = 1) -> QSeries:
        exponent = [0] * twist.n
        exponent[index] = power
        return cls.monomial(twist, exponent)

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def is_polydisc(self) -> bool:
        """All exponents non-negative (an element of the polydisc algebra)."""
        return all(min(exponent) >= 0 for exponent in self.terms)

    def coefficient(self, exponent: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(exponent), self.twist.field.zero)

    def support(self) -> list[Exponent]:
        return sorted(self.terms)

    def __iter__(self) -> Iterator[tuple[Exponent, Scalar]]:
        return iter(sorted(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def min_degree(self, truncation: Truncation) -> Any:
        if not self.terms:
            raise NotInvertibleError("the zero series has no leading degree")
        return min(truncation.degree(e) for e in self.terms)

    def truncated(self, truncation: Truncation, bound: Any) -> QSeries:
        """Drop terms of weighted degree above ``bound``."""
        return QSeries._raw(
            self.twist,
            {e: c for e, c in self.terms.items() if truncation.degree(e) <= bound},
        )

    def map_coefficients(self, fn: Any) -> QSeries:
        return QSeries(self.twist, {e: fn(c) for e, c in self.terms.items()})

    # arithmetic

    def _check(self, other: QSeries) -> None:
        if other.twist is not self.twist and other.twist != self.twist:
            raise TwistMismatchError("series over different twists cannot be combined")

    def __add__(self, other: Any) -> QSeries:
        if not isinstance(other, QSeries):
            other = QSeries.constant(self.twist, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return QSeries._raw(self.twist, {e: c for e, c in out.items() if not c.is_zero()})

    __radd__ = __add__

    def __neg__(self) -> QSeries:
        return QSeries._raw(self.twist, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> QSeries:
        if not isinstance(other, QSeries):
            other = QSeries.constant(self.twist, other)
        return self + (-other)

    def __rsub__(self, other: Any) -> QSeries:
        return (-self) + other

    def scale(self, value: Any) -> QSeries:
        s = self.twist.field.coerce(value)
        if s.is_zero():
            return QSeries.zero(self.twist)
        return QSeries._raw(
            self.twist,
            {e: p for e, c in self.terms.items() if not (p := c * s).is_zero()},
        )

    def __mul__(self, other: Any) -> QSeries:
        if isinstance(other, QSeries):
            return qt_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> QSeries:
        # scalars are central
        return self.scale(other)

    def __pow__(self, k: int) -> QSeries:
        if k < 0:
            raise ValueError("use qt_invert for negative powers")
        result = QSeries.one(self.twist)
        base = self
        while k:
            if k & 1:
                result = qt_mul(result, base)
            k >>= 1
            if k:
                base = qt_mul(base, base)
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            if isinstance(other, (int, Scalar)):
                other = QSeries.constant(self.twist, other)
            else:
                return NotImplemented
        if other.twist != self.twist or self.terms.keys() != other.terms.keys():
            return False
        return all(c == other.terms[e] for e, c in self.terms.items())

    def to_json(self) -> dict[str, Any]:
        return {
            "twist": self.twist.to_json(),
            "terms": [[list(e), c.to_json()] for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any], field: Field | None = None) -> QSeries:
        twist = TwistData.from_json(data["twist"], field)
        return cls(
            twist, [(e, scalar_from_json(c, twist.field)) for e, c in data.get("terms", [])]
        )

    def __repr__(self) -> str:
        if not self.terms:
            return "QSeries(0)"
        body = " + ".join(f"({c})*z^{list(e)}" for e, c in sorted(self.terms.items()))
        return f"QSeries({body})"


def qt_mul(
    f: QSeries,
    g: QSeries,
    truncation: Truncation | None = None,
    bound: Any = None,
) -> QSeries:
    """Normal-ordered product ``f * g``; with ``bound`` drops degrees above it."""
    f._check(g)
    twist = f.twist
    out: dict[Exponent, Scalar] = {}
    if not f.terms or not g.terms:
        return QSeries._raw(twist, out)
    pruning = truncation is not None and bound is not None
    if pruning:
        assert truncation is not None
        g_items = [(J, b, truncation.degree(J)) for J, b in g.terms.items()]
    else:
        g_items = [(J, b, 0) for J, b in g.terms.items()]
    classical = twist.is_classical
    n = twist.n
    for I, a in f.terms.items():
        di = truncation.degree(I) if pruning else 0  # type: ignore[union-attr]
        for J, b, dj in g_items:
            if pruning and di + dj > bound:
                continue
            K = tuple(I[k] + J[k] for k in range(n))
            c = a * b
            if not classical:
                power = twist.kappa(I, J)
                if power:
                    c = c * twist.q_power(power)
            out[K] = out[K] + c if K in out else c
    return QSeries._raw(twist, {e: c for e, c in out.items() if not c.is_zero()})


def qt_invert(f: QSeries, truncation: Truncation | None = None) -> QSeries:
    """Two-sided inverse of ``f`` within ``truncation``.

    A single term ``u z^I`` inverts exactly to ``u^{-1} q^{kappa(I,I)} z^{-I}``.
    Otherwise ``f`` needs a unique term of least weighted degree; with it as
    ``lead``, ``f = lead (1 + h)`` and the geometric series in ``h`` is summed
    up to ``order`` degrees above ``deg(lead^{-1})``.
    """
    twist = f.twist
    if not f.terms:
        raise NotInvertibleError("the zero series is not invertible")
    if len(f.terms) == 1:
        ((exponent, coefficient),) = f.terms.items()
        inverse = coefficient.invert()
        power = twist.kappa(exponent, exponent)
        if power and not twist.is_classical:
            inverse = inverse * twist.q_power(power)
        return QSeries._raw(twist, {tuple(-e for e in exponent): inverse})
    if truncation is None:
        raise TruncationError("inverting a non-monomial series needs a truncation")
    degrees = {e: truncation.degree(e) for e in f.terms}
    d0 = min(degrees.values())
    leading = [e for e, d in degrees.items() if d == d0]
    if len(leading) != 1:
        raise NotInvertibleError(
            f"leading part of degree {d0} is not a unit monomial: {sorted(leading)}"
        )
    lead = QSeries._raw(twist, {leading[0]: f.terms[leading[0]]})
    lead_inv = qt_invert(lead)
    h = qt_mul(lead_inv, f) - 1
    minus_h = -h
    total = QSeries.one(twist)
    power = total
    order = truncation.order
    while True:
        power = qt_mul(power, minus_h, truncation, order)
        if power.is_zero():
            break
        total = total + power
    logger.debug(
        "Inverted series with {terms} terms to depth {order}",
        terms=len(f.terms),
        order=order,
    )
    return qt_mul(total, lead_inv)


@dataclass(frozen=True)
class PolyRadius:
    """Log-radii ``(log r_1, ..., log r_n)``; all finite."""

    log_radii: tuple[Any, ...]

    def __post_init__(self) -> None:
        values = []
        for r in self.log_radii:
            if isinstance(r, LogNorm):
                if not r.is_finite:
                    raise ValueError("radii must be positive (log-radius NEG_INF given)")
                r = r.value
            values.append(to_rational(r))
        object.__setattr__(self, "log_radii", tuple(values))

    @classmethod
    def parse(cls, text: str) -> PolyRadius:
        return cls(tuple(part.strip() for part in text.split(",") if part.strip()))

    def __len__(self) -> int:
        return len(self.log_radii)


def gauss_norm(f: QSeries, r: PolyRadius | Sequence[Any]) -> LogNorm:
    """``max_I (log|a_I| + <I, log r>)``; NEG_INF for zero."""
    radius = r if isinstance(r, PolyRadius) else PolyRadius(tuple(r))
    if len(radius) != f.twist.n:
        raise ValueError(f"radius has {len(radius)} entries, series rank is {f.twist.n}")
    return log_max(
        c.log_norm() + sum((i * x for i, x in zip(I, radius.log_radii)), mpq(0))
        for I, c in f.terms.items()
    )


def point_seminorm(f: QSeries, x: Sequence[Any]) -> LogNorm:
    """Max-plus seminorm of ``f`` at the rational point ``x``."""
    return gauss_norm(f, PolyRadius(tuple(x)))


@dataclass(frozen=True, eq=False)
class TorsorElement:
    """``(A, lambda)`` in ``GL(n, Z) x| (k^x)^n``.

    Exponents are column vectors moved by ``I -> A I`` with the coefficient
    scaled by ``prod lambda_i^{I_i}``. The base moves by
    ``x -> A^{-T} (x + val(lambda))``, the unique affine map for which point
    seminorms are preserved. ``oriented`` demands ``det A = +1``.
    """

    matrix: tuple[tuple[int, ...], ...]
    scalars: tuple[Scalar, ...]
    oriented: bool = True

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(a) for a in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "scalars", tuple(self.scalars))
        n = len(rows)
        if any(len(row) != n for row in rows) or len(self.scalars) != n:
            raise ValueError("torsor element needs an n x n matrix and n scalars")
        det = sympy.Matrix(rows).det()
        if abs(det) != 1:
            raise ValueError(f"matrix is not invertible over Z (det = {det})")
        if self.oriented and det != 1:
            raise ValueError(f"oriented torsor element needs det = 1, got {det}")
        for k, s in enumerate(self.scalars):
            if s.is_zero():
                raise NotInvertibleError(f"torsor scalar {k} is zero")

    @property
    def n(self) -> int:
        return len(self.matrix)

    @classmethod
    def identity(cls, field: Field, n: int) -> TorsorElement:
        rows = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
        return cls(rows, tuple(field.one for _ in range(n)))

    def _matrix_inverse(self) -> tuple[tuple[int, ...], ...]:
        inv = sympy.Matrix(self.matrix).inv()
        return tuple(tuple(int(inv[i, j]) for j in range(self.n)) for i in range(self.n))

    def _pull(self, column: Sequence[Sequence[int]], i: int) -> Scalar:
        """``prod_j lambda_j^{column[j][i]}``."""
        value = self.scalars[0].field.one
        for j in range(self.n):
            if column[j][i]:
                value = value * self.scalars[j] ** column[j][i]
        return value

    def inverse(self) -> TorsorElement:
        rows = self._matrix_inverse()
        scalars = tuple(self._pull(rows, i).invert() for i in range(self.n))
        return TorsorElement(rows, scalars, self.oriented)

    def compose(self, other: TorsorElement) -> TorsorElement:
        """``self`` after ``other``: ``act(compose(g, h), f) = act(g, act(h, f))``."""
        prod = sympy.Matrix(self.matrix) * sympy.Matrix(other.matrix)
        rows = tuple(tuple(int(prod[i, j]) for j in range(self.n)) for i in range(self.n))
        scalars = tuple(
            other.scalars[i] * self._pull(other.matrix, i) for i in range(self.n)
        )
        return TorsorElement(rows, scalars, self.oriented and other.oriented)


def torsor_act(g: TorsorElement, f: QSeries) -> QSeries:
    """``z^I -> (prod lambda_i^{I_i}) z^{A I}``."""
    if g.n != f.twist.n:
        raise ValueError(f"rank mismatch: torsor {g.n}, series {f.twist.n}")
    n = g.n
    out: dict[Exponent, Scalar] = {}
    for I, c in f.terms.items():
        value = c
        for i in range(n):
            if I[i]:
                value = value * g.scalars[i] ** I[i]
        J = tuple(sum(g.matrix[i][j] * I[j] for j in range(n)) for i in range(n))
        out[J] = out[J] + value if J in out else value
    return QSeries(f.twist, out)


def torsor_act_base(g: TorsorElement, x: Sequence[Any]) -> tuple[Any, ...]:
    """``x -> A^{-T} (x + (val(lambda_1), ..., val(lambda_n)))``."""
    point = [to_rational(v) for v in x]
    if len(point) != g.n:
        raise ValueError(f"point has {len(point)} coordinates, torsor rank is {g.n}")
    shifted = []
    for i in range(g.n):
        val = g.scalars[i].valuation()
        if val is None:
            raise NotInvertibleError(f"torsor scalar {i} is zero modulo precision")
        shifted.append(point[i] + val)
    inv = g._matrix_inverse()
    # (A^{-T} v)_i = sum_j (A^{-1})_{ji} v_j
    return tuple(
        sum((inv[j][i] * shifted[j] for j in range(g.n)), mpq(0)) for i in range(g.n)
    )


def substitute_hom(
    images: Sequence[QSeries],
    f: QSeries,
    truncation: Truncation | None = None,
    check_relations: bool = True,
) -> QSeries:
    """Substitute ``z_i -> images[i]`` into the normal-ordered expansion of ``f``.

    Images live on the target twist and may be non-monomial; negative powers
    go through :func:`qt_invert`. With a truncation, every factor is kept
    ``order`` degrees above its leading degree and the result is cut at the
    least such bound over the terms of ``f``.
    """
    source = f.twist
    if len(images) != source.n:
        raise ValueError(f"{len(images)} images given for {source.n} generators")
    target = images[0].twist
    for image in images:
        if image.twist != target:
            raise TwistMismatchError("generator images must share one twist")
        if image.is_zero():
            raise NotInvertibleError("generator image is zero")
    if check_relations:
        check_image_relations(source, images, truncation)

    leads = [image.min_degree(truncation) for image in images] if truncation else None

    def bound_for(lead_degree: Any) -> Any:
        return lead_degree + truncation.order if truncation else None

    powers: dict[tuple[int, int], QSeries] = {}

    def power(i: int, k: int) -> QSeries:
        key = (i, k)
        if key not in powers:
            if k == 1:
                powers[key] = images[i]
            elif k == -1:
                powers[key] = qt_invert(images[i], truncation)
            else:
                step = 1 if k > 0 else -1
                bound = bound_for(leads[i] * k) if leads else None
                powers[key] = qt_mul(
                    power(i, k - step), power(i, step), truncation, bound
                )
        return powers[key]

    result = QSeries.zero(target)
    global_bound = None
    for I, c in f.terms.items():
        term = QSeries.constant(target, c)
        bound = None
        if leads:
            bound = bound_for(sum((leads[i] * I[i] for i in range(source.n)), mpq(0)))
            global_bound = bound if global_bound is None else min(global_bound, bound)
        for i, k in enumerate(I):
            if k:
                term = qt_mul(term, power(i, k), truncation, bound)
        result = result + term
    if truncation is not None and global_bound is not None:
        result = result.truncated(truncation, global_bound)
    return result


def check_image_relations(
    source: TwistData, images: Sequence[QSeries], truncation: Truncation | None
) -> None:
    for i in range(source.n):
        for j in range(i):
            c = source.commutation.get((i, j), 0)
            lhs = qt_mul(images[i], images[j])
            rhs = qt_mul(images[j], images[i]).scale(
                images[0].twist.field.coerce(source.q_power(c))
                if c
                else 1
            )
            diff = lhs - rhs
            if truncation is not None and not diff.is_zero():
                bound = (
                    images[i].min_degree(truncation)
                    + images[j].min_degree(truncation)
                    + truncation.order
                )
                diff = diff.truncated(truncation, bound)
            if not diff.is_zero():
                raise RelationError(
                    f"images of z_{i + 1}, z_{j + 1} violate z_{i + 1} z_{j + 1} = "
                    f"q^{c} z_{j + 1} z_{i + 1}"
                )


def to_symmetric_basis(f: QSeries, sqrt_q: Scalar) -> dict[Exponent, Scalar]:
    """Coefficients ``b_l`` with ``f = sum b_l e(l)``, ``e(l) = sqrt_q^{kappa(l,l)} z^l``."""
    _check_sqrt(f.twist, sqrt_q)
    return {
        e: c * sqrt_q ** (-f.twist.kappa(e, e)) for e, c in sorted(f.terms.items())
    }


def from_symmetric_basis(
    twist: TwistData, coefficients: Mapping[Exponent, Any], sqrt_q: Scalar
) -> QSeries:
    _check_sqrt(twist, sqrt_q)
    return QSeries(
        twist,
        {
            tuple(e): twist.field.coerce(c) * sqrt_q ** twist.kappa(tuple(e), tuple(e))
            for e, c in coefficients.items()
        },
    )


def _check_sqrt(twist: TwistData, sqrt_q: Scalar) -> None:
    if not bool(sqrt_q * sqrt_q == twist.q):
        raise ValueError("sqrt_q does not square to q")


__all__ = [
    "PolyRadius",
    "QSeries",
    "TorsorElement",
    "Truncation",
    "TwistData",
    "from_symmetric_basis",
    "gauss_norm",
    "point_seminorm",
    "qt_invert",
    "qt_mul",
    "check_image_relations",
    "substitute_hom",
    "to_symmetric_basis",
    "torsor_act",
    "torsor_act_base",
]

"""Quantum GL2 over ``Q_p`` and its weighted-shift representations.

The quantum coordinate ring is generated by ``t11, t12, t21, t22`` with

    t11 t12 = q^-1 t12 t11,   t11 t21 = q^-1 t21 t11,
    t12 t22 = q^-1 t22 t12,   t21 t22 = q^-1 t22 t21,
    t12 t21 = t21 t12,        t11 t22 - t22 t11 = (q^-1 - q) t12 t21.

Elements are kept in the PBW basis ``t11^a t12^b t21^c t22^d``. The leaf
``S_{c,t}`` (``det_q = c``, ``t12 = t^2 t21``) is represented on
``e_0, e_1, ...`` by

    t11 e_m = a11(m) e_{m-1},  t22 e_m = a22(m) e_{m+1},
    t21 e_m = a21(0) q^-m e_m,  t12 e_m = t^2 a21(0) q^-m e_m,

where ``a21(0)^2 t^2 = -c/q`` forces ``a21(0)`` into ``Q_p(sqrt(-c/q))``.
"""

from __future__ import annotations

import dataclasses
import multiprocessing
from abc import ABC, abstractmethod
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, ClassVar

from gmpy2 import mpq
from loguru import logger

from .exceptions import FieldMismatchError, InadmissibleLeafError
from .nascalar import (
    NEG_INF,
    Field,
    LogNorm,
    PadicField,
    PadicScalar,
    QuadraticExtension,
    Scalar,
    is_square_qp,
    log_max,
    rational_str,
    to_rational,
)
from .operators import OperatorNorm, ShiftOperator, operator_log_norm

GENERATORS = ("t11", "t12", "t21", "t22")
Monomial = tuple[int, int, int, int]
Poly = dict[Monomial, Scalar]

_UNIT: dict[str, Monomial] = {
    "t11": (1, 0, 0, 0),
    "t12": (0, 1, 0, 0),
    "t21": (0, 0, 1, 0),
    "t22": (0, 0, 0, 1),
}


def parse_gl2_word(text: str | Sequence[str]) -> tuple[str, ...]:
    tokens = text.replace("*", " ").split() if isinstance(text, str) else list(text)
    for token in tokens:
        if token not in GENERATORS:
            raise ValueError(f"unknown generator {token!r}; expected one of {GENERATORS}")
    return tuple(tokens)


def _word_of(monomial: Monomial) -> tuple[str, ...]:
    return tuple(g for g, k in zip(GENERATORS, monomial) for _ in range(k))


def _accumulate(out: Poly, monomial: Monomial, coefficient: Scalar) -> None:
    if monomial in out:
        total = out[monomial] + coefficient
        if total.is_zero():
            del out[monomial]
        else:
            out[monomial] = total
    elif not coefficient.is_zero():
        out[monomial] = coefficient


class QuantumGL2:
    """``K[GL_2]_q`` for a fixed ``q`` with ``|1 - q| < 1``; owns the rewrite caches."""

    STRATEGIES: ClassVar[tuple[str, ...]] = ("right", "left")

    def __init__(self, q: PadicScalar) -> None:
        if not isinstance(q, PadicScalar):
            raise TypeError("quantum GL2 is defined over Q_p")
        v = (1 - q).valuation()
        if v is not None and v < 1:
            raise ValueError(f"q must satisfy |1 - q| < 1, got val(1 - q) = {v}")
        self.q = q
        self.field: PadicField = q.field
        self.q_inv = q.invert()
        self.commutator = self.q_inv - q
        self._powers: dict[int, Scalar] = {0: self.field.one}
        self._right: dict[tuple[Monomial, str], Poly] = {}
        self._left: dict[tuple[str, Monomial], Poly] = {}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuantumGL2):
            return NotImplemented
        return self.q == other.q

    __hash__ = None  # type: ignore[assignment]

    def q_power(self, k: int) -> Scalar:
        if k not in self._powers:
            self._powers[k] = self.q**k
        return self._powers[k]

    # single-generator products on PBW monomials

    def mul_right(self, monomial: Monomial, gen: str) -> Poly:
        """Normal form of ``monomial * gen``."""
        key = (monomial, gen)
        cached = self._right.get(key)
        if cached is not None:
            return cached
        a, b, c, d = monomial
        out: Poly = {}
        if gen == "t22":
            out[(a, b, c, d + 1)] = self.field.one
        elif gen == "t21":
            out[(a, b, c + 1, d)] = self.q_power(d)
        elif gen == "t12":
            out[(a, b + 1, c, d)] = self.q_power(d)
        elif d == 0:
            out[(a + 1, b, c, 0)] = self.q_power(b + c)
        else:
            # t22 t11 = t11 t22 - (q^-1 - q) t12 t21
            prefix = (a, b, c, d - 1)
            for m, x in self.mul_right(prefix, "t11").items():
                for m2, y in self.mul_right(m, "t22").items():
                    _accumulate(out, m2, x * y)
            for m, x in self.mul_right(prefix, "t12").items():
                for m2, y in self.mul_right(m, "t21").items():
                    _accumulate(out, m2, -(self.commutator * x * y))
        self._right[key] = out
        return out

    def mul_left(self, gen: str, monomial: Monomial) -> Poly:
        """Normal form of ``gen * monomial``."""
        key = (gen, monomial)
        cached = self._left.get(key)
        if cached is not None:
            return cached
        a, b, c, d = monomial
        out: Poly = {}
        if gen == "t11":
            out[(a + 1, b, c, d)] = self.field.one
        elif gen == "t12":
            out[(a, b + 1, c, d)] = self.q_power(a)
        elif gen == "t21":
            out[(a, b, c + 1, d)] = self.q_power(a)
        elif a == 0:
            out[(0, b, c, d + 1)] = self.q_power(b + c)
        else:
            rest = (a - 1, b, c, d)
            for m, x in self.mul_left("t22", rest).items():
                for m2, y in self.mul_left("t11", m).items():
                    _accumulate(out, m2, x * y)
            for m, x in self.mul_left("t21", rest).items():
                for m2, y in self.mul_left("t12", m).items():
                    _accumulate(out, m2, -(self.commutator * x * y))
        self._left[key] = out
        return out

    # elements

    def element(self, terms: Mapping[Sequence[int], Any] | Iterable[tuple[Sequence[int], Any]]) -> GL2Element:
        return GL2Element(self, terms)

    def one(self) -> GL2Element:
        return GL2Element(self, {(0, 0, 0, 0): 1})

    def generator(self, name: str) -> GL2Element:
        if name not in _UNIT:
            raise ValueError(f"unknown generator {name!r}")
        return GL2Element(self, {_UNIT[name]: 1})

    def normal_form(self, word: Sequence[str] | str, strategy: str = "right") -> GL2Element:
        letters = parse_gl2_word(word)
        if strategy not in self.STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}; expected {self.STRATEGIES}")
        poly: Poly = {(0, 0, 0, 0): self.field.one}
        if strategy == "right":
            for gen in letters:
                poly = self._apply(poly, lambda m, g=gen: self.mul_right(m, g))
        else:
            for gen in reversed(letters):
                poly = self._apply(poly, lambda m, g=gen: self.mul_left(g, m))
        return GL2Element._from_poly(self, poly)

    @staticmethod
    def _apply(poly: Poly, step: Any) -> Poly:
        out: Poly = {}
        for m, x in poly.items():
            for m2, y in step(m).items():
                _accumulate(out, m2, x * y)
        return out

    def det_q(self) -> GL2Element:
        """``t11 t22 - q^-1 t12 t21``."""
        return GL2Element(self, {(1, 0, 0, 1): 1, (0, 1, 1, 0): -self.q_inv})

    def __repr__(self) -> str:
        return f"QuantumGL2(q={self.q.value}, p={self.field.p})"


class GL2Element:
    """``sum c_abcd t11^a t12^b t21^c t22^d`` in PBW normal form."""

    __slots__ = ("algebra", "terms")
    __hash__ = None  # type: ignore[assignment]

    def __init__(
        self,
        algebra: QuantumGL2,
        terms: Mapping[Sequence[int], Any] | Iterable[tuple[Sequence[int], Any]] = (),
    ) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        table: Poly = {}
        for monomial, coefficient in items:
            key = tuple(int(k) for k in monomial)
            if len(key) != 4 or min(key) < 0:
                raise ValueError(f"PBW exponent must be four non-negative ints, got {key}")
            _accumulate(table, key, algebra.field.coerce(coefficient))  # type: ignore[arg-type]
        self.algebra = algebra
        self.terms = table

    @classmethod
    def _from_poly(cls, algebra: QuantumGL2, poly: Poly) -> GL2Element:
        obj = cls.__new__(cls)
        obj.algebra = algebra
        obj.terms = poly
        return obj

    def _check(self, other: GL2Element) -> None:
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise FieldMismatchError("elements for different q cannot be combined")

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, monomial: Sequence[int]) -> Scalar:
        return self.terms.get(tuple(monomial), self.algebra.field.zero)  # type: ignore[arg-type]

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    def __add__(self, other: GL2Element) -> GL2Element:
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            _accumulate(out, m, c)
        return GL2Element._from_poly(self.algebra, out)

    def __neg__(self) -> GL2Element:
        return self.scale(-1)

    def __sub__(self, other: GL2Element) -> GL2Element:
        return self + (-other)

    def scale(self, value: Any) -> GL2Element:
        s = self.algebra.field.coerce(value)
        out: Poly = {}
        for m, c in self.terms.items():
            _accumulate(out, m, c * s)
        return GL2Element._from_poly(self.algebra, out)

    def __mul__(self, other: GL2Element) -> GL2Element:
        return gl2_mul(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GL2Element):
            return NotImplemented
        return self.algebra == other.algebra and self.terms.keys() == other.terms.keys() and all(
            c == other.terms[m] for m, c in self.terms.items()
        )

    def to_json(self) -> list[list[Any]]:
        return [
            [*m, rational_str(c.value)]  # type: ignore[attr-defined]
            for m, c in sorted(self.terms.items())
        ]

    def __repr__(self) -> str:
        if not self.terms:
            return "GL2Element(0)"
        body = " + ".join(
            f"({c.value})*" + "*".join(_word_of(m) or ("1",))  # type: ignore[attr-defined]
            for m, c in sorted(self.terms.items())
        )
        return f"GL2Element({body})"


def gl2_normal_form(
    word: Sequence[str] | str, q: PadicScalar | QuantumGL2, strategy: str = "right"
) -> GL2Element:
    algebra = q if isinstance(q, QuantumGL2) else QuantumGL2(q)
    return algebra.normal_form(word, strategy)


def gl2_mul(x: GL2Element, y: GL2Element) -> GL2Element:
    """PBW-normalized ``x * y``: right-multiply ``x`` by the letters of each monomial of ``y``."""
    x._check(y)
    algebra = x.algebra
    out: Poly = {}
    for m_y, c_y in y.terms.items():
        partial = dict(x.terms)
        for gen in _word_of(m_y):
            partial = QuantumGL2._apply(partial, lambda m, g=gen: algebra.mul_right(m, g))
        for m, c in partial.items():
            _accumulate(out, m, c * c_y)
    return GL2Element._from_poly(algebra, out)


def det_q(algebra: QuantumGL2) -> GL2Element:
    return algebra.det_q()


# Relations as sums coef(q) * word.
RELATIONS: tuple[tuple[str, tuple[tuple[Any, tuple[str, ...]], ...]], ...] = (
    ("t11 t12 = q^-1 t12 t11", ((1, ("t11", "t12")), ("-q^-1", ("t12", "t11")))),
    ("t11 t21 = q^-1 t21 t11", ((1, ("t11", "t21")), ("-q^-1", ("t21", "t11")))),
    ("t12 t22 = q^-1 t22 t12", ((1, ("t12", "t22")), ("-q^-1", ("t22", "t12")))),
    ("t21 t22 = q^-1 t22 t21", ((1, ("t21", "t22")), ("-q^-1", ("t22", "t21")))),
    ("t12 t21 = t21 t12", ((1, ("t12", "t21")), (-1, ("t21", "t12")))),
    (
        "t11 t22 - t22 t11 = (q^-1 - q) t12 t21",
        ((1, ("t11", "t22")), (-1, ("t22", "t11")), ("q-q^-1", ("t12", "t21"))),
    ),
)


def _relation_coefficient(symbol: Any, algebra: QuantumGL2) -> Scalar:
    if symbol == "-q^-1":
        return -algebra.q_inv
    if symbol == "q-q^-1":
        return -algebra.commutator
    return algebra.field.coerce(symbol)


# -- leaves and representations ---------------------------------------------


@dataclass
class LeafReport:
    """Admissibility of the leaf ``S_{c,t}``: ``|c| <= 1``, ``t`` a unit, ``-c/q`` a square."""

    c: Any
    t: Any
    bounded: bool
    unit_t: bool
    square: bool

    @property
    def admissible(self) -> bool:
        return self.bounded and self.unit_t and self.square

    def reasons(self) -> list[str]:
        out = []
        if not self.bounded:
            out.append("|c| > 1 or c = 0")
        if not self.unit_t:
            out.append("t is not a p-adic unit")
        if not self.square:
            out.append("-c/q is not a square in Q_p")
        return out

    def to_json(self) -> dict[str, Any]:
        return {
            "c": rational_str(self.c),
            "t": rational_str(self.t),
            "admissible": self.admissible,
            "reasons": self.reasons(),
        }


def leaf_constraints_check(c: Any, t: Any, q: PadicScalar) -> LeafReport:
    base = q.field
    c_s = base.coerce(c) if not isinstance(c, PadicScalar) else c
    t_s = base.coerce(t) if not isinstance(t, PadicScalar) else t
    vc = c_s.valuation()
    bounded = vc is not None and vc >= 0
    unit_t = t_s.valuation() == 0
    square = bool(vc is not None and is_square_qp(-(c_s / q)))
    return LeafReport(c_s.value, t_s.value, bounded, unit_t, square)


class GL2Representation(ABC):
    """Action of the generators on a window ``e_lo .. e_hi``."""

    field: Field
    lo: int
    hi: int
    c: Any
    q: PadicScalar

    @abstractmethod
    def generator(self, name: str) -> ShiftOperator: ...

    def identity(self) -> ShiftOperator:
        return ShiftOperator.identity(self.field, self.lo, self.hi, 0, exact_lower=True)


SPLITS = ("unit-upper", "unit-lower")


@dataclass(eq=False)
class GL2Rep(GL2Representation):
    """The weighted-shift module ``V_{c,t}`` on ``e_0 .. e_M``.

    ``a11(m) a22(m-1) = c (1 - q^{-2m})`` is split as ``a22 = 1`` (unit-upper)
    or ``a11 = 1`` (unit-lower).
    """

    c: Any
    t: Any
    q: PadicScalar
    window: int
    split: str = "unit-upper"
    field: QuadraticExtension = dataclasses.field(init=False)
    a21_0: Scalar = dataclasses.field(init=False)
    _generators: dict[str, ShiftOperator] = dataclasses.field(init=False, default_factory=dict)

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}; expected one of {SPLITS}")
        if self.window < 1:
            raise ValueError(f"window must be positive, got {self.window}")
        report = leaf_constraints_check(self.c, self.t, self.q)
        if not report.admissible:
            raise InadmissibleLeafError(
                f"leaf (c={report.c}, t={report.t}) is inadmissible: "
                + "; ".join(report.reasons())
            )
        self.c, self.t = report.c, report.t
        d = -(self.c / self.q.value)
        self.field = QuadraticExtension(self.q.field, d)
        self.a21_0 = self.field.sqrt_d() * self.field.coerce(1 / self.t)
        self.lo, self.hi = 0, self.window
        self._q = self.field.coerce(self.q)
        self._q_inv = self._q.invert()
        self._c = self.field.coerce(self.c)

    def s(self, m: int) -> Scalar:
        """``a11(m) a22(m-1) = c (1 - q^{-2m})``."""
        return self._c * (1 - self._q_inv ** (2 * m))

    def a11(self, m: int) -> Scalar:
        if m <= 0:
            return self.field.zero
        return self.s(m) if self.split == "unit-upper" else self.field.one

    def a22(self, m: int) -> Scalar:
        return self.field.one if self.split == "unit-upper" else self.s(m + 1)

    def a21(self, m: int) -> Scalar:
        return self.a21_0 * self._q_inv**m

    def a12(self, m: int) -> Scalar:
        return self.a21(m) * self.t * self.t

    def h0(self) -> Scalar:
        """``a21(0) a12(0) = -c/q``."""
        return self.a21(0) * self.a12(0)

    def generator(self, name: str) -> ShiftOperator:
        if name not in self._generators:
            actions = {
                "t11": (lambda m: [(m - 1, self.a11(m))], 1),
                "t22": (lambda m: [(m + 1, self.a22(m))], 1),
                "t21": (lambda m: [(m, self.a21(m))], 0),
                "t12": (lambda m: [(m, self.a12(m))], 0),
            }
            if name not in actions:
                raise ValueError(f"unknown generator {name!r}")
            action, bandwidth = actions[name]
            self._generators[name] = ShiftOperator.from_action(
                self.field, 0, self.window, action, 0, bandwidth, exact_lower=True
            )
        return self._generators[name]


def build_rep(
    c: Any, t: Any, q: PadicScalar, window: int = 64, split: str = "unit-upper"
) -> GL2Rep:
    rep = GL2Rep(c, t, q, window, split)
    logger.debug(
        "Built V_(c,t) for c={c}, t={t} on e_0..e_{window}",
        c=rep.c,
        t=rep.t,
        window=window,
    )
    return rep


@dataclass(eq=False)
class OneDimRep(GL2Representation):
    """``W_{c,t}``: ``t11 = t``, ``t22 = c/t``, ``t12 = t21 = 0`` on one vector."""

    c: Any
    t: Any
    q: PadicScalar

    def __post_init__(self) -> None:
        self.field = self.q.field
        self.c, self.t = to_rational(self.c), to_rational(self.t)
        if self.t == 0:
            raise ValueError("t must be nonzero")
        self.lo = self.hi = 0

    def generator(self, name: str) -> ShiftOperator:
        value = {"t11": self.t, "t22": self.c / self.t}.get(name, mpq(0))
        if name not in GENERATORS:
            raise ValueError(f"unknown generator {name!r}")
        return ShiftOperator(self.field, 0, 0, {(0, 0): value}, 0, 0, exact_lower=True)


def one_dim_rep(c: Any, t: Any, q: PadicScalar) -> OneDimRep:
    return OneDimRep(c, t, q)


def rep_apply(rep: GL2Representation, x: GL2Element) -> ShiftOperator:
    """Matrix of ``x`` on the window; column ``j`` is exact once ``j <= hi - (a + d)``."""
    total = ShiftOperator(rep.field, rep.lo, rep.hi, {}, 0, 0, exact_lower=True)
    powers: dict[tuple[str, int], ShiftOperator] = {}

    def power(name: str, k: int) -> ShiftOperator:
        if (name, k) not in powers:
            powers[(name, k)] = (
                rep.identity() if k == 0 else power(name, k - 1) @ rep.generator(name)
            )
        return powers[(name, k)]

    for (a, b, c, d), coefficient in x.terms.items():
        op = power("t11", a) @ power("t12", b) @ power("t21", c) @ power("t22", d)
        total = total + op.scale(rep.field.coerce(coefficient))
    return total


@dataclass
class RepRelationReport:
    results: dict[str, bool]
    det_q_central: bool
    det_q_value: bool

    @property
    def passed(self) -> bool:
        return all(self.results.values()) and self.det_q_central and self.det_q_value

    def to_json(self) -> dict[str, Any]:
        return {
            "relations": self.results,
            "det_q_central": self.det_q_central,
            "det_q_equals_c": self.det_q_value,
            "passed": self.passed,
        }


def rep_relations_check(rep: GL2Representation) -> RepRelationReport:
    """The six relations, and ``det_q = c``, entrywise on the trusted columns."""
    algebra = QuantumGL2(rep.q)
    results = {}
    for name, terms in RELATIONS:
        total = ShiftOperator(rep.field, rep.lo, rep.hi, {}, 0, 0, exact_lower=True)
        for symbol, word in terms:
            op = rep.identity()
            for gen in word:
                op = op @ rep.generator(gen)
            coefficient = rep.field.coerce(_relation_coefficient(symbol, algebra))
            total = total + op.scale(coefficient)
        results[name] = total.interior_is_zero()
    det = rep_apply(rep, algebra.det_q())
    c_identity = rep.identity().scale(rep.field.coerce(rep.c))
    det_value = det.interior_equals(c_identity)
    central = True
    for gen in GENERATORS:
        g = rep.generator(gen)
        central = central and (det @ g).interior_equals(g @ det)
    return RepRelationReport(results, central, det_value)


def sl2_check(rep: GL2Representation) -> bool:
    """Leaf of the ``SL_2`` quotient: ``det_q`` acts as ``1``."""
    return bool(to_rational(rep.c) == 1)


# -- sample family and norms --------------------------------------------------


def _coprime_residues(p: int, count: int) -> list[int]:
    out, r = [], 1
    while len(out) < count:
        if r % p:
            out.append(r)
        r += 1
    return out


def default_samples(p: int, q: Any) -> list[tuple[Any, Any]]:
    """Admissible ``(c, t)``: ``c = -q p^{2k} r_k^2`` for ``k = 0, 1, 2``, ``t`` in ``{1, 2, p-1}``."""
    q_value = to_rational(q.value if isinstance(q, PadicScalar) else q)
    residues = _coprime_residues(p, 3)
    ts: list[int] = []
    for t in (1, 2, p - 1):
        if t % p and t not in ts:
            ts.append(t)
    samples = []
    for k, r in enumerate(residues):
        c = -q_value * mpq(p) ** (2 * k) * r * r
        samples.extend((c, mpq(t)) for t in ts)
    return samples


@dataclass(frozen=True)
class SampleNorm:
    c: Any
    t: Any
    norm: OperatorNorm

    def to_json(self) -> dict[str, Any]:
        return {
            "c": rational_str(self.c),
            "t": rational_str(self.t),
            "log_norm": self.norm.value.to_json(),
            "stable": self.norm.stable,
        }


@dataclass
class GL2NormResult:
    """``sup`` over sampled leaves of ``log ||pi_{c,t}(f)||``."""

    log_norm: LogNorm
    per_sample: list[SampleNorm]

    @property
    def stable(self) -> bool:
        return all(s.norm.stable for s in self.per_sample)

    def to_json(self) -> dict[str, Any]:
        return {
            "log_norm": self.log_norm.to_json(),
            "per_sample": [s.to_json() for s in self.per_sample],
            "stable": self.stable,
        }


def _sample_norm(job: tuple[int, Any, list[tuple[Monomial, Any]], Any, Any, int, str]) -> SampleNorm:
    p, q_value, terms, c, t, window, split = job
    base = PadicField(p)
    q = base.coerce(q_value)
    element = GL2Element(_algebra(p, q_value), terms)
    rep = GL2Rep(c, t, q, window, split)
    return SampleNorm(rep.c, rep.t, operator_log_norm(rep_apply(rep, element)))


@lru_cache(maxsize=16)
def _algebra(p: int, q_value: Any) -> QuantumGL2:
    return QuantumGL2(PadicField(p).coerce(q_value))


def gl2_sup_norm(
    f: GL2Element,
    samples: Sequence[tuple[Any, Any]] | None = None,
    window: int = 64,
    split: str = "unit-upper",
    workers: int = 1,
) -> GL2NormResult:
    """Max over admissible leaves of the operator log-norm of ``f``.

    Every sample is checked first; one inadmissible leaf aborts the run.
    With ``workers > 1`` the leaves are evaluated in a process pool.
    """
    algebra = f.algebra
    q = algebra.q
    p = algebra.field.p
    if samples is None:
        samples = default_samples(p, q)
    for c, t in samples:
        report = leaf_constraints_check(c, t, q)
        if not report.admissible:
            raise InadmissibleLeafError(
                f"sample (c={report.c}, t={report.t}): " + "; ".join(report.reasons())
            )
    terms = [(m, coefficient.value) for m, coefficient in f.terms.items()]  # type: ignore[attr-defined]
    jobs = [
        (p, q.value, terms, to_rational(c), to_rational(t), window, split)
        for c, t in samples
    ]
    if workers > 1 and len(jobs) > 1:
        workers = min(workers, multiprocessing.cpu_count(), len(jobs))
        logger.debug("Evaluating {n} leaves with {workers} workers", n=len(jobs), workers=workers)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            per_sample = list(executor.map(_sample_norm, jobs))
    else:
        per_sample = [_sample_norm(job) for job in jobs]
    result = GL2NormResult(log_max(s.norm.value for s in per_sample), per_sample)
    logger.debug(
        "GL2 sup-norm {value} over {n} leaves (stable={stable})",
        value=result.log_norm,
        n=len(per_sample),
        stable=result.stable,
    )
    return result


# -- norms on U_q coefficient data ---------------------------------------------


@dataclass
class UqCoeffData:
    """Coefficients ``c_{m,s,p}`` of ``t^m/m! prod F^(p) E^(s)`` with a radius ``log r``."""

    coefficients: dict[tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]], Scalar]
    log_r: Any = 0

    def __post_init__(self) -> None:
        for key in self.coefficients:
            if any(k < 0 for part in key for k in part):
                raise ValueError(f"multi-index {key} has a negative entry")
        self.log_r = to_rational(
            self.log_r.value if isinstance(self.log_r, LogNorm) else self.log_r
        )


def uq_r_norm(xi: UqCoeffData) -> LogNorm:
    """``max log|c_{m,s,p}| - (|s| + |p| + |m|) log r``."""
    return log_max(
        (c.log_norm() - xi.log_r * (sum(m) + sum(s) + sum(p)))
        if not c.is_zero()
        else NEG_INF
        for (m, s, p), c in xi.coefficients.items()
    )


__all__ = [
    "GENERATORS",
    "RELATIONS",
    "SPLITS",
    "GL2Element",
    "GL2NormResult",
    "GL2Rep",
    "GL2Representation",
    "LeafReport",
    "OneDimRep",
    "QuantumGL2",
    "RepRelationReport",
    "SampleNorm",
    "UqCoeffData",
    "build_rep",
    "default_samples",
    "det_q",
    "gl2_mul",
    "gl2_normal_form",
    "gl2_sup_norm",
    "is_square_qp",
    "leaf_constraints_check",
    "one_dim_rep",
    "parse_gl2_word",
    "rep_apply",
    "rep_relations_check",
    "sl2_check",
    "uq_r_norm",
]

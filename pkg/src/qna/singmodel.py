"""Local model of a focus-focus singularity: the algebra ``A_q(S)``.

``A_q(S)`` is generated by ``alpha, beta, gamma`` with

    alpha gamma = q gamma alpha,   q beta gamma = gamma beta,
    beta alpha - q alpha beta = 1 - q,   (alpha beta - 1) gamma = 1.

Elements are handled through the embedding into the quantum torus in
``beta^{+-1}, gamma^{+-1}`` (``gamma beta = q beta gamma``) sending
``alpha -> (1 + gamma^-1) beta^-1``, the specialization ``delta = 1`` of the
algebra ``B`` with central ``delta``. Words are also mapped into the chart
tori ``xi_i eta_i = q eta_i xi_i`` and represented on ``sum a_i T^i`` by
shift operators.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any

from gmpy2 import mpq
from loguru import logger

from .exceptions import RelationError
from .nascalar import LogNorm, Scalar, to_rational
from .operators import OperatorNorm, ShiftOperator, operator_log_norm
from .qtorus import (
    PolyRadius,
    QSeries,
    Truncation,
    TwistData,
    gauss_norm,
    qt_mul,
    substitute_hom,
)

Letter = str
Word = tuple[Letter, ...]
Point2 = tuple[Any, Any]
Triple = tuple[Any, Any, Any]

LETTERS = ("alpha", "beta", "gamma", "beta^-1", "gamma^-1")
_ALIASES = {
    "a": "alpha",
    "b": "beta",
    "g": "gamma",
    "b^-1": "beta^-1",
    "g^-1": "gamma^-1",
    "beta_inv": "beta^-1",
    "gamma_inv": "gamma^-1",
}


def parse_word(text: str | Sequence[str]) -> Word:
    """``"beta alpha"``, ``"beta*alpha"`` or a sequence of letters."""
    tokens = re.split(r"[\s*]+", text.strip()) if isinstance(text, str) else list(text)
    word = []
    for token in tokens:
        if not token:
            continue
        letter = _ALIASES.get(token, token)
        if letter not in LETTERS:
            raise ValueError(f"unknown letter {token!r}; expected one of {LETTERS}")
        word.append(letter)
    return tuple(word)


# Defining relations as linear combinations sum coef(q) * word.
Relation = tuple[str, tuple[tuple[Callable[[Scalar], Any], Word], ...]]

RELATIONS: tuple[Relation, ...] = (
    (
        "alpha gamma = q gamma alpha",
        ((lambda q: 1, ("alpha", "gamma")), (lambda q: -q, ("gamma", "alpha"))),
    ),
    (
        "q beta gamma = gamma beta",
        ((lambda q: q, ("beta", "gamma")), (lambda q: -1, ("gamma", "beta"))),
    ),
    (
        "beta alpha - q alpha beta = 1 - q",
        (
            (lambda q: 1, ("beta", "alpha")),
            (lambda q: -q, ("alpha", "beta")),
            (lambda q: q - 1, ()),
        ),
    ),
    (
        "(alpha beta - 1) gamma = 1",
        (
            (lambda q: 1, ("alpha", "beta", "gamma")),
            (lambda q: -1, ("gamma",)),
            (lambda q: -1, ()),
        ),
    ),
)


def _evaluate_relation(
    relation: Relation, q: Scalar, image: Callable[[Word], Any]
) -> Any:
    _, terms = relation
    total = None
    for coefficient, word in terms:
        term = image(word).scale(coefficient(q))
        total = term if total is None else total + term
    return total


@dataclass
class RelationReport:
    """Per-relation verdicts of an identity check."""

    results: dict[str, bool]

    @property
    def passed(self) -> bool:
        return all(self.results.values())

    def failures(self) -> list[str]:
        return [name for name, ok in self.results.items() if not ok]

    def raise_on_failure(self) -> None:
        if not self.passed:
            raise RelationError(f"relations fail: {', '.join(self.failures())}")


# -- the algebra B and the embedding ----------------------------------------


def b_twist(q: Scalar) -> TwistData:
    """``beta, gamma, delta`` with ``gamma beta = q beta gamma`` and ``delta`` central."""
    return TwistData(3, {(1, 0): 1}, q)


def aqs_twist(q: Scalar) -> TwistData:
    """``beta, gamma`` with ``gamma beta = q beta gamma``."""
    return TwistData.two_variable(q, c21=1)


@dataclass(eq=False)
class BElement:
    """``sum c_nml beta^n gamma^m delta^l``; ``l >= 0`` unless ``delta_inverted``."""

    series: QSeries
    delta_inverted: bool = False

    def __post_init__(self) -> None:
        if self.series.twist.n != 3:
            raise ValueError("B elements live on the rank-3 twist")
        if not self.delta_inverted and any(e[2] < 0 for e in self.series.terms):
            raise ValueError("negative delta power outside the delta-inverted algebra")

    def __mul__(self, other: BElement) -> BElement:
        return BElement(
            qt_mul(self.series, other.series), self.delta_inverted or other.delta_inverted
        )

    def __add__(self, other: BElement) -> BElement:
        return BElement(
            self.series + other.series, self.delta_inverted or other.delta_inverted
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BElement):
            return NotImplemented
        return self.series == other.series

    __hash__ = None  # type: ignore[assignment]


def _b_letter(q: Scalar, letter: Letter) -> QSeries:
    twist = b_twist(q)
    if letter == "alpha":
        beta_inv = QSeries.generator(twist, 0, -1)
        delta_gamma_inv = QSeries.monomial(twist, (0, -1, 1))
        return qt_mul(1 + delta_gamma_inv, beta_inv)
    exponent = {
        "beta": (1, 0, 0),
        "gamma": (0, 1, 0),
        "beta^-1": (-1, 0, 0),
        "gamma^-1": (0, -1, 0),
    }[letter]
    return QSeries.monomial(twist, exponent)


def b_embed_word(word: Sequence[Letter] | str, q: Scalar) -> BElement:
    """Image of a word in ``B`` under ``alpha -> (1 + delta gamma^-1) beta^-1``."""
    letters = parse_word(word) if isinstance(word, str) else tuple(word)
    result = QSeries.one(b_twist(q))
    for letter in letters:
        result = qt_mul(result, _b_letter(q, letter))
    return BElement(result)


def b_delta(q: Scalar) -> BElement:
    """``delta = (alpha beta - 1) gamma``."""
    return BElement(QSeries.monomial(b_twist(q), (0, 0, 1)))


def b_specialize(x: BElement) -> AqsElement:
    """Quotient by ``delta - 1``."""
    twist = x.series.twist
    target = aqs_twist(twist.q)
    terms: dict[tuple[int, int], Scalar] = {}
    for (n, m, _), c in x.series.terms.items():
        terms[(n, m)] = terms[(n, m)] + c if (n, m) in terms else c
    return AqsElement(QSeries(target, terms))


def b_gauss_norm(x: BElement, r1: Any, r2: Any, r3: Any) -> LogNorm:
    """``max log|c_nml| + n r1 + m r2 + l r3`` (log-radii)."""
    return gauss_norm(x.series, PolyRadius((r1, r2, r3)))


@dataclass(eq=False)
class AqsElement:
    """Image of ``A_q(S)`` in the ``beta, gamma`` torus."""

    series: QSeries

    def __mul__(self, other: AqsElement) -> AqsElement:
        return AqsElement(qt_mul(self.series, other.series))

    def __add__(self, other: AqsElement) -> AqsElement:
        return AqsElement(self.series + other.series)

    def __sub__(self, other: AqsElement) -> AqsElement:
        return AqsElement(self.series - other.series)

    def scale(self, value: Any) -> AqsElement:
        return AqsElement(self.series.scale(value))

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def gauss_norm(self, u: Any, v: Any) -> LogNorm:
        """Gauss seminorm with ``log|beta| = u``, ``log|gamma| = v``."""
        return gauss_norm(self.series, PolyRadius((u, v)))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AqsElement):
            return NotImplemented
        return self.series == other.series

    __hash__ = None  # type: ignore[assignment]


def aqs_embed_word(
    word: Sequence[Letter] | str, q: Scalar, truncation: Truncation | None = None
) -> AqsElement:
    """Normal-ordered image of a word; exact, since every letter maps to a Laurent polynomial."""
    element = b_specialize(b_embed_word(word, q))
    if truncation is not None:
        bound = element.series.min_degree(truncation) + truncation.order
        element = AqsElement(element.series.truncated(truncation, bound))
    return element


def aqs_relations_check(q: Scalar, truncation: Truncation | None = None) -> RelationReport:
    """Each relation evaluated through the embedding.

    With a truncation only terms up to ``truncation.order`` above the lowest
    leading degree among the relation's words have to cancel.
    """
    results = {}
    for relation in RELATIONS:
        residual = _evaluate_relation(relation, q, lambda w: aqs_embed_word(w, q))
        if truncation is not None and not residual.is_zero():
            lead = min(
                aqs_embed_word(word, q).series.min_degree(truncation)
                for _, word in relation[1]
            )
            residual = AqsElement(
                residual.series.truncated(truncation, lead + truncation.order)
            )
        results[relation[0]] = residual.is_zero()
    return RelationReport(results)


# -- charts ------------------------------------------------------------------


@dataclass(frozen=True)
class ChartAtlas:
    """Open cover of the punctured plane by ``U_1, U_2, U_3`` and the shrunken ``U_2'``."""

    epsilon: Any = mpq(1, 2)

    def __post_init__(self) -> None:
        eps = to_rational(self.epsilon)
        if not (0 < eps < 1):
            raise ValueError(f"epsilon must lie in (0, 1), got {eps}")
        object.__setattr__(self, "epsilon", eps)

    def contains(self, chart: int | str, point: Sequence[Any]) -> bool:
        x, y = (to_rational(v) for v in point)
        eps = self.epsilon
        if chart in (1, "1"):
            return bool(x < eps * abs(y))
        if chart in (2, "2"):
            return bool(x > 0 and y < eps * x)
        if chart in (3, "3"):
            return bool(x > 0 and y > 0)
        if chart in ("2'", "2p"):
            return bool(x > 0 and y < eps / (1 + eps) * x)
        raise ValueError(f"unknown chart {chart!r}")

    def charts_of(self, point: Sequence[Any]) -> list[int]:
        return [i for i in (1, 2, 3) if self.contains(i, point)]

    def covers(self, points: Iterable[Sequence[Any]]) -> bool:
        """Every nonzero point lies in some chart."""
        return all(
            self.charts_of(p) for p in points if any(to_rational(v) != 0 for v in p)
        )


def chart_project(chart: int, logs: Sequence[Any]) -> Point2:
    """``pi_i`` on ``(log|xi_i|, log|eta_i|)``; ``pi_2`` shears when ``|eta_2| >= 1``."""
    x, y = (to_rational(v) for v in logs)
    if chart in (1, 3):
        return (x, y)
    if chart == 2:
        return (x - y, y) if y >= 0 else (x, y)
    raise ValueError(f"unknown chart {chart!r}")


def chart_twist(q: Scalar) -> TwistData:
    """``xi eta = q eta xi``."""
    return TwistData.two_variable(q)


def _chart_images(chart: int, q: Scalar) -> dict[Letter, QSeries]:
    twist = chart_twist(q)
    xi = QSeries.generator(twist, 0)
    xi_inv = QSeries.generator(twist, 0, -1)
    eta = QSeries.generator(twist, 1)
    eta_inv = QSeries.generator(twist, 1, -1)
    if chart == 1:
        alpha, beta, gamma = xi_inv, qt_mul(xi, 1 + eta), eta_inv
    elif chart == 2:
        alpha, beta, gamma = qt_mul(1 + eta, xi_inv), xi, eta_inv
    elif chart == 3:
        xi_eta = qt_mul(xi, eta)
        xi_eta_inv = qt_mul(eta_inv, xi_inv)
        alpha, beta, gamma = qt_mul(1 + eta, xi_eta_inv), xi_eta, eta_inv
    else:
        raise ValueError(f"chart must be 1, 2 or 3, got {chart!r}")
    return {"alpha": alpha, "beta": beta, "gamma": gamma}


def gi_chart_hom(chart: int, word: Sequence[Letter] | str, q: Scalar) -> QSeries:
    """``g_i`` of a word in ``alpha, beta, gamma`` (and ``gamma^-1``)."""
    images = _chart_images(chart, q)
    twist = chart_twist(q)
    images["gamma^-1"] = QSeries.generator(twist, 1)
    letters = parse_word(word) if isinstance(word, str) else tuple(word)
    result = QSeries.one(twist)
    for letter in letters:
        if letter not in images:
            raise ValueError(f"{letter} has no image in chart {chart}")
        result = qt_mul(result, images[letter])
    return result


def gi_relations_check(chart: int, q: Scalar) -> RelationReport:
    results = {}
    for relation in RELATIONS:
        residual = _evaluate_relation(relation, q, lambda w: gi_chart_hom(chart, w, q))
        results[relation[0]] = residual.is_zero()
    return RelationReport(results)


@dataclass
class GluingReport:
    """Per overlap and generator: does the coordinate change carry one ``g_i`` to the other."""

    overlaps: dict[str, dict[str, bool]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(all(v.values()) for v in self.overlaps.values())


def _coordinate_changes(q: Scalar) -> list[tuple[str, int, int, list[QSeries], Truncation | None]]:
    twist = chart_twist(q)
    xi = QSeries.generator(twist, 0)
    eta = QSeries.generator(twist, 1)
    eta_inv = QSeries.generator(twist, 1, -1)
    return [
        # (xi_2, eta_2) = (xi_3 eta_3, eta_3)
        ("U2 & U3", 2, 3, [qt_mul(xi, eta), eta], None),
        # (xi_2, eta_2) -> (xi_1 (1 + eta_1), eta_1)
        ("U1 & U2", 2, 1, [qt_mul(xi, 1 + eta), eta], Truncation((0, 1), 0)),
        # (xi_3, eta_3) -> (xi_1 (1 + eta_1^-1), eta_1)
        ("U1 & U3", 3, 1, [qt_mul(xi, 1 + eta_inv), eta], Truncation((0, -1), 0)),
    ]


def gluing_compat_check(q: Scalar, order: int = 8) -> GluingReport:
    """Compare ``change(g_src(x))`` with ``g_dst(x)`` for ``x = alpha, beta, gamma``.

    Overlaps with the modification are compared modulo degree ``> order``
    above the leading degree, in the grading where the added monomial
    (``eta`` or ``eta^-1``) has degree 1.
    """
    report = GluingReport()
    for name, source, target, images, grading in _coordinate_changes(q):
        truncation = Truncation(grading.weights, order) if grading else None
        verdicts = {}
        for letter in ("alpha", "beta", "gamma"):
            moved = substitute_hom(images, gi_chart_hom(source, (letter,), q), truncation)
            expected = gi_chart_hom(target, (letter,), q)
            diff = moved - expected
            if truncation is not None and not diff.is_zero():
                bound = expected.min_degree(truncation) + order
                diff = diff.truncated(truncation, bound)
            verdicts[letter] = diff.is_zero()
        report.overlaps[name] = verdicts
    logger.debug("Gluing check to order {order}: {overlaps}", order=order, overlaps=report.overlaps)
    return report


# -- shift representation ----------------------------------------------------


def shift_representation(
    word: Sequence[Letter] | str,
    rho: Any,
    q: Scalar,
    window: int,
    scale: tuple[Any, Any] = (1, 1),
) -> ShiftOperator:
    """Matrix of a word on ``T^i``, ``|i| <= window``.

    ``alpha = u1 T``, ``gamma = -u2 tau^-1`` and
    ``beta = u1^-1 T^-1 (1 - u2^-1 tau)`` with ``tau f(T) = f(qT)``; the
    default ``u1 = u2 = 1`` is the unscaled representation.
    """
    letters = parse_word(word) if isinstance(word, str) else tuple(word)
    field_ = q.field
    u1, u2 = (field_.coerce(u) for u in scale)
    u1_inv, u2_inv = u1.invert(), u2.invert()
    powers: dict[int, Scalar] = {}

    def q_pow(i: int) -> Scalar:
        if i not in powers:
            powers[i] = q**i
        return powers[i]

    actions: dict[Letter, tuple[Callable[[int], list[tuple[int, Any]]], int]] = {
        "alpha": (lambda i: [(i + 1, u1)], 1),
        "beta": (lambda i: [(i - 1, u1_inv * (1 - u2_inv * q_pow(i)))], 1),
        "gamma": (lambda i: [(i, -(u2 * q_pow(-i)))], 0),
        "gamma^-1": (lambda i: [(i, -(u2_inv * q_pow(i)))], 0),
    }
    result = ShiftOperator.identity(field_, -window, window, rho)
    for letter in letters:
        if letter not in actions:
            raise ValueError(f"{letter} does not act on V_r (beta is not invertible)")
        action, bandwidth = actions[letter]
        op = ShiftOperator.from_action(field_, -window, window, action, rho, bandwidth)
        result = result @ op
    return result


def shift_relations_check(
    q: Scalar, rho: Any, window: int, scale: tuple[Any, Any] = (1, 1)
) -> RelationReport:
    """Every defining relation vanishes on the trusted columns of the window."""
    identity = ShiftOperator.identity(q.field, -window, window, rho)
    results = {}
    for name, terms in RELATIONS:
        total = None
        for coefficient, word in terms:
            op = (
                shift_representation(word, rho, q, window, scale)
                if word
                else identity
            ).scale(coefficient(q))
            total = op if total is None else total + op
        assert total is not None
        results[name] = total.interior_is_zero()
    return RelationReport(results)


# -- the maps f and j --------------------------------------------------------


def f_map(norms: Sequence[Any]) -> Triple:
    """``(log|alpha|, log|alpha beta - 1|, log|beta|) -> (a, b, c)``."""
    log_alpha, log_ab1, log_beta = (_finite(v) for v in norms)
    return (max(mpq(0), log_alpha), max(mpq(0), log_beta), -log_ab1)


def _finite(value: Any) -> Any:
    if isinstance(value, LogNorm):
        if not value.is_finite:
            raise ValueError("f is only defined on nonzero seminorm values")
        return value.value
    return to_rational(value)


def j_embed(x: Any, y: Any) -> Triple:
    x, y = to_rational(x), to_rational(y)
    if x <= 0:
        return (-x, max(x + y, mpq(0)), -y)
    return (mpq(0), x + max(y, mpq(0)), -y)


def j_preimage(point: Sequence[Any]) -> Point2 | None:
    a, b, c = (to_rational(v) for v in point)
    y = -c
    if a > 0:
        x = -a
    elif a == 0:
        x = b - max(y, mpq(0))
        if x < 0:
            return None
    else:
        return None
    return (x, y) if j_embed(x, y) == (a, b, c) else None


def case_table(point: Sequence[Any]) -> str | None:
    """``"S-"``, ``"S0"`` or ``"S+"`` when ``point`` fits that row, else ``None``."""
    a, b, c = (to_rational(v) for v in point)
    if a < 0 or b < 0:
        return None
    if c < 0:
        return "S-" if a * b * (a + b + c) == 0 else None
    if a * b != 0:
        return None
    return "S0" if c == 0 else "S+"


def gauss_triple(u: Any, v: Any, q: Scalar) -> Triple:
    """``f``-inputs of the Gauss seminorm with ``log|beta| = u``, ``log|gamma| = v``."""
    alpha = aqs_embed_word(("alpha",), q)
    beta = aqs_embed_word(("beta",), q)
    alpha_beta_1 = alpha * beta - AqsElement(QSeries.one(alpha.series.twist))
    return (
        alpha.gauss_norm(u, v),
        alpha_beta_1.gauss_norm(u, v),
        beta.gauss_norm(u, v),
    )


@dataclass(frozen=True)
class OperatorTriple:
    norms: Triple
    stable: bool


def operator_triple(
    rho: Any, q: Scalar, window: int, scale: tuple[Any, Any] = (1, 1)
) -> OperatorTriple:
    """``f``-inputs of the operator seminorm of the shift representation."""
    alpha = shift_representation(("alpha",), rho, q, window, scale)
    beta = shift_representation(("beta",), rho, q, window, scale)
    identity = ShiftOperator.identity(q.field, -window, window, rho)
    results: list[OperatorNorm] = [
        operator_log_norm(alpha),
        operator_log_norm(alpha @ beta - identity),
        operator_log_norm(beta),
    ]
    return OperatorTriple(
        (results[0].value, results[1].value, results[2].value),
        all(r.stable for r in results),
    )


@dataclass
class SpectrumRow:
    """One sampled seminorm: its ``f`` image and membership in the image of ``j``."""

    source: str
    parameters: tuple[Any, ...]
    f: Triple
    case: str | None
    preimage: Point2 | None
    stable: bool = True

    @property
    def in_image(self) -> bool:
        return self.case is not None and self.preimage is not None

    def to_json(self) -> dict[str, Any]:
        row: dict[str, Any] = {"source": self.source}
        if self.source == "gauss":
            row["u"], row["v"] = (str(p) for p in self.parameters)
        else:
            row["rho"] = str(self.parameters[0])
            row["scale"] = [str(p) for p in self.parameters[1:]]
            row["stable"] = self.stable
        row.update(
            {
                "f": [str(v) for v in self.f],
                "case": self.case,
                "in_image": self.in_image,
                "preimage": None
                if self.preimage is None
                else [str(v) for v in self.preimage],
            }
        )
        return row


def _row(source: str, parameters: tuple[Any, ...], norms: Triple, stable: bool) -> SpectrumRow:
    point = f_map(norms)
    return SpectrumRow(source, parameters, point, case_table(point), j_preimage(point), stable)


def spectrum_gauss_row(u: Any, v: Any, q: Scalar) -> SpectrumRow:
    u, v = to_rational(u), to_rational(v)
    return _row("gauss", (u, v), gauss_triple(u, v, q), True)


def spectrum_shift_row(
    rho: Any, q: Scalar, window: int, scale: tuple[Any, Any] = (1, 1)
) -> SpectrumRow:
    triple = operator_triple(rho, q, window, scale)
    return _row(
        "shift",
        (to_rational(rho), *(str(s) for s in scale)),
        triple.norms,
        triple.stable,
    )


def rational_grid(lo: Any, hi: Any, n: int) -> list[Any]:
    """``n`` evenly spaced rationals from ``lo`` to ``hi`` inclusive."""
    lo, hi = to_rational(lo), to_rational(hi)
    if n < 1:
        raise ValueError(f"grid size must be positive, got {n}")
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + step * k for k in range(n)]


def sample_spectrum(
    q: Scalar,
    points: Iterable[tuple[Any, Any]],
    shift_radii: Iterable[Any] = (),
    window: int = 32,
    scales: Mapping[Any, tuple[Any, Any]] | None = None,
) -> list[SpectrumRow]:
    rows = [spectrum_gauss_row(u, v, q) for u, v in points]
    for rho in shift_radii:
        scale = (scales or {}).get(rho, (1, 1))
        rows.append(spectrum_shift_row(rho, q, window, scale))
    failures = sum(not r.in_image for r in rows)
    logger.debug(
        "Sampled {n} seminorms, {failures} outside the image of j",
        n=len(rows),
        failures=failures,
    )
    return rows


__all__ = [
    "LETTERS",
    "RELATIONS",
    "AqsElement",
    "BElement",
    "ChartAtlas",
    "GluingReport",
    "OperatorTriple",
    "RelationReport",
    "SpectrumRow",
    "aqs_embed_word",
    "aqs_relations_check",
    "aqs_twist",
    "b_delta",
    "b_embed_word",
    "b_gauss_norm",
    "b_specialize",
    "b_twist",
    "case_table",
    "chart_project",
    "chart_twist",
    "f_map",
    "gauss_triple",
    "gi_chart_hom",
    "gi_relations_check",
    "gluing_compat_check",
    "j_embed",
    "j_preimage",
    "operator_triple",
    "parse_word",
    "rational_grid",
    "sample_spectrum",
    "shift_relations_check",
    "shift_representation",
    "spectrum_gauss_row",
    "spectrum_shift_row",
]

"""Randomized checks of the algebraic laws the exact algorithms rely on.

Every test draws from ``numpy.random.default_rng(test_seed)`` so failures
reproduce. The wider sweeps are marked ``slow``.
"""

import numpy as np
import pytest
from gmpy2 import mpq

from qna.nascalar import PadicField
from qna.qgl2 import GENERATORS, QuantumGL2
from qna.qtorus import (
    PolyRadius,
    QSeries,
    TorsorElement,
    TwistData,
    gauss_norm,
    point_seminorm,
    qt_mul,
    torsor_act,
    torsor_act_base,
)
from qna.scattering import (
    SLOPE_INFINITY,
    SLOPE_ZERO,
    GroupLog,
    ScatteringFrame,
    SlopeFactor,
    factorize,
)


def _random_series(rng, twist, size=4, span=2):
    field = twist.field
    terms = {}
    for _ in range(size):
        exponent = tuple(int(e) for e in rng.integers(-span, span + 1, twist.n))
        coefficient = int(rng.integers(1, 10)) * int(rng.choice([-1, 1]))
        terms[exponent] = field.t ** int(rng.integers(-2, 3)) * coefficient
    return QSeries(twist, terms)


def _random_rational(rng, bound=5):
    return mpq(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def _random_sl2(rng, steps=3):
    matrix = np.eye(2, dtype=int)
    for _ in range(steps):
        a, b = (int(v) for v in rng.integers(-2, 3, 2))
        matrix = matrix @ np.array([[1, a], [0, 1]]) @ np.array([[1, 0], [b, 1]])
    return tuple(tuple(int(v) for v in row) for row in matrix)


class TestGaussNormLaws:
    """|fg|_r = |f|_r |g|_r and the torsor carries norms along with the base."""

    @staticmethod
    def _twists(laurent, q_laurent):
        return {
            "commutative": TwistData.commutative(2, laurent),
            "two-variable": TwistData.two_variable(q_laurent),
            "rank-3": TwistData(3, {(1, 0): 1, (2, 0): -1, (2, 1): 2}, q_laurent),
        }

    def _check_multiplicative(self, rng, twist):
        f = _random_series(rng, twist)
        g = _random_series(rng, twist)
        r = PolyRadius(tuple(_random_rational(rng) for _ in range(twist.n)))
        assert gauss_norm(f * g, r) == gauss_norm(f, r) + gauss_norm(g, r)

    def _check_equivariance(self, rng, laurent):
        twist = TwistData.commutative(2, laurent)
        f = _random_series(rng, twist, size=5)
        g = TorsorElement(
            _random_sl2(rng),
            tuple(
                laurent.t ** int(k) * int(u)
                for k, u in zip(rng.integers(-3, 4, 2), rng.integers(1, 5, 2))
            ),
        )
        x = (_random_rational(rng), _random_rational(rng))
        assert point_seminorm(torsor_act(g, f), torsor_act_base(g, x)) == point_seminorm(f, x)

    @pytest.mark.parametrize("trial", range(5))
    def test_multiplicative(self, twist2, test_seed, trial):
        self._check_multiplicative(np.random.default_rng(test_seed + trial), twist2)

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["commutative", "two-variable", "rank-3"])
    def test_multiplicative_sweep(self, laurent, q_laurent, test_seed, name):
        twist = self._twists(laurent, q_laurent)[name]
        rng = np.random.default_rng(test_seed)
        for _ in range(334):
            self._check_multiplicative(rng, twist)

    @pytest.mark.parametrize("trial", range(5))
    def test_torsor_equivariance(self, laurent, test_seed, trial):
        self._check_equivariance(np.random.default_rng(test_seed + trial), laurent)

    @pytest.mark.slow
    def test_torsor_equivariance_sweep(self, laurent, test_seed):
        rng = np.random.default_rng(test_seed)
        for _ in range(100):
            self._check_equivariance(rng, laurent)


def _random_pair(rng, frame, base=(1, 1)):
    def log(ray):
        coefficients = {
            (k * ray[0], k * ray[1]): _random_rational(rng)
            for k in range(1, frame.order + 1)
            if rng.random() < 0.7
        }
        return GroupLog(frame, base, coefficients)

    return SlopeFactor(SLOPE_INFINITY, log((0, 1))), SlopeFactor(SLOPE_ZERO, log((1, 0)))


def _assert_factorization(frame, g_inf, g_0):
    factors = factorize(g_inf, g_0)
    truncation, order = frame.truncation, frame.order
    target = qt_mul(g_inf.log.exponential(), g_0.log.exponential(), truncation, order)
    product = QSeries.one(frame.twist)
    for factor in factors:
        product = qt_mul(product, factor.log.exponential(), truncation, order)
    assert (target - product).truncated(truncation, order).is_zero()
    assert [f.slope for f in factors] == sorted(f.slope for f in factors)


class TestFactorizationRoundTrip:
    """The ordered product of the factors reproduces g_inf g_0."""

    def test_random_pair(self, q_laurent, test_seed):
        frame = ScatteringFrame.standard(q_laurent, 4)
        rng = np.random.default_rng(test_seed)
        _assert_factorization(frame, *_random_pair(rng, frame))

    @pytest.mark.slow
    @pytest.mark.parametrize("trial", range(6))
    def test_random_pairs(self, q_laurent, laurent, test_seed, trial):
        rng = np.random.default_rng(test_seed + trial)
        q = q_laurent if trial % 2 else laurent.one
        frame = ScatteringFrame.standard(q, 5)
        _assert_factorization(frame, *_random_pair(rng, frame))

    @pytest.mark.slow
    def test_random_pairs_order_six(self, q_laurent, laurent, test_seed):
        rng = np.random.default_rng(test_seed)
        frames = [ScatteringFrame.standard(q, 6) for q in (q_laurent, laurent.one)]
        for trial in range(100):
            frame = frames[trial % 2]
            g_inf, g_0 = _random_pair(rng, frame)
            _assert_factorization(frame, g_inf, g_0)
            batch = factorize(g_inf, g_0)
            reverse = factorize(g_inf, g_0, schedule="reverse")
            assert [f.slope for f in reverse] == [f.slope for f in batch]
            assert all(a.log.same_as(b.log) for a, b in zip(batch, reverse))


class TestGL2Confluence:
    """Both rewrite orders reach the same PBW normal form."""

    @pytest.fixture(scope="class")
    def algebra(self):
        return QuantumGL2(PadicField(5).coerce(6))

    def _word(self, rng, length):
        return [str(g) for g in rng.choice(GENERATORS, length)]

    @pytest.mark.parametrize("length", [2, 4, 6])
    def test_strategies_agree(self, algebra, test_seed, length):
        rng = np.random.default_rng(test_seed + length)
        for _ in range(5):
            word = self._word(rng, length)
            assert algebra.normal_form(word, "right") == algebra.normal_form(word, "left")

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [5, 7])
    def test_strategies_agree_sweep(self, test_seed, p):
        algebra = QuantumGL2(PadicField(p).coerce(1 + p))
        rng = np.random.default_rng(test_seed + p)
        for _ in range(500):
            word = self._word(rng, int(rng.integers(1, 7)))
            assert algebra.normal_form(word, "right") == algebra.normal_form(word, "left")

    @pytest.mark.slow
    def test_product_of_normal_forms(self, algebra, test_seed):
        rng = np.random.default_rng(test_seed)
        for _ in range(20):
            u = self._word(rng, int(rng.integers(1, 5)))
            v = self._word(rng, int(rng.integers(1, 5)))
            assert algebra.normal_form(u) * algebra.normal_form(v) == algebra.normal_form(u + v)

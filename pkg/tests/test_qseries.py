"""Tests for formal q-series and the q-dilogarithm."""

import pytest
from gmpy2 import mpq

from qna.exceptions import RootOfUnityError
from qna.nascalar import LaurentField, LogNorm
from qna.qseries import (
    Q_ONE,
    classical_dilog,
    dilog_exponent,
    q_integer,
    q_pochhammer,
    qdilog,
    qpochhammer_inf,
    series_exp,
    series_log,
)


class TestFormalSeries:
    def test_exp_inverts_log(self):
        coeffs = [mpq(1), mpq(2), mpq(-1, 3), mpq(5, 7), mpq(0), mpq(1, 2)]
        logged = series_log(coeffs, mpq(0))
        assert logged[0] == 0
        assert series_exp(logged, mpq(1), mpq(0)) == coeffs

    def test_log_of_geometric_series(self):
        # log(1/(1-x)) = sum x^n / n
        logged = series_log([mpq(1)] * 6, mpq(0))
        assert logged[1:] == [mpq(1, n) for n in range(1, 6)]

    def test_constant_terms_checked(self):
        with pytest.raises(ValueError):
            series_log([mpq(2), mpq(1)], mpq(0))
        with pytest.raises(ValueError):
            series_exp([mpq(1), mpq(1)], mpq(1), mpq(0))


class TestQDilogarithm:
    """Li_2,q and the quantum Pochhammer symbol."""

    def test_coefficients_closed_form(self):
        series = qdilog(6)
        for n in range(1, 7):
            expected = Q_ONE * (-1) ** n / (q_integer(n) * n)
            assert series.coefficient(n) == expected

    def test_classical_limit(self):
        limit = qdilog(6).limit_at_one()
        assert limit[1:] == [mpq((-1) ** n, n * n) for n in range(1, 7)]
        assert classical_dilog(6)[1:] == limit[1:]

    def test_pochhammer_leading_terms(self):
        series = qpochhammer_inf(3)
        assert series.coefficient(0) == Q_ONE
        assert series.coefficient(1) == -Q_ONE / q_pochhammer(1)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            qpochhammer_inf(-1)

    def test_wall_coefficients_at_one_plus_t(self):
        field = LaurentField(16)
        coefficients = dilog_exponent(6).evaluate(field.default_q())
        assert coefficients[0].is_zero()
        # q^n - 1 = n t + ..., so every coefficient has log-norm +1
        assert all(c.log_norm() == LogNorm(1) for c in coefficients[1:])

    def test_power_scales(self):
        field = LaurentField(16)
        once = dilog_exponent(4).evaluate(field.default_q())
        twice = dilog_exponent(4, power=2).evaluate(field.default_q())
        assert all(b == a * 2 for a, b in zip(once, twice))

    def test_root_of_unity(self):
        field = LaurentField(8)
        with pytest.raises(RootOfUnityError):
            dilog_exponent(3).evaluate(field.coerce(-1))

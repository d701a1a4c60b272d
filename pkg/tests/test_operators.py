"""Tests for windowed operators and their log-norms."""

import pytest

from qna.exceptions import WindowError
from qna.nascalar import LogNorm
from qna.operators import ShiftOperator, operator_log_norm


def _shift(field, lo, hi, rho):
    return ShiftOperator.from_action(field, lo, hi, lambda j: [(j + 1, 1)], rho=rho)


class TestShiftOperator:
    def test_identity_norm(self, laurent):
        norm = operator_log_norm(ShiftOperator.identity(laurent, -4, 4, rho="1/3"))
        assert norm.value == LogNorm(0)
        assert norm.stable

    def test_shift_norm_is_rho(self, laurent):
        norm = operator_log_norm(_shift(laurent, -6, 6, "1/2"))
        assert norm.value == LogNorm("1/2")
        assert norm.stable

    def test_composition(self, laurent):
        shift = _shift(laurent, -6, 6, 1)
        square = shift @ shift
        assert square.bandwidth == 2
        assert square.entry(2, 0) == 1
        assert operator_log_norm(square).value == LogNorm(2)

    def test_growth_at_edge_is_unstable(self, laurent):
        op = ShiftOperator(laurent, 0, 8, {(j, j): laurent.t ** (-j) for j in range(9)})
        norm = operator_log_norm(op)
        assert norm.value == LogNorm(8)
        assert not norm.stable

    def test_exact_lower_edge(self, laurent):
        op = ShiftOperator.from_action(
            laurent, 0, 8, lambda j: [(j - 1, 1)] if j else [], exact_lower=True
        )
        assert op.interior == (0, 7)

    def test_window_too_small(self, laurent):
        op = ShiftOperator(laurent, 0, 1, {}, bandwidth=1)
        with pytest.raises(WindowError):
            operator_log_norm(op)

    def test_windows_must_match(self, laurent):
        with pytest.raises(WindowError):
            _shift(laurent, 0, 6, 0) @ _shift(laurent, 0, 8, 0)

    def test_interior_equality(self, laurent):
        shift = _shift(laurent, -6, 6, 0)
        assert (shift + shift).interior_equals(shift.scale(2))
        assert not shift.interior_equals(ShiftOperator.identity(laurent, -6, 6))

    def test_entries_outside_window_dropped(self, laurent):
        op = ShiftOperator(laurent, 0, 2, {(5, 0): 1, (1, 1): 0, (2, 1): 3})
        assert op.entries == {(2, 1): laurent.coerce(3)}

    def test_json(self, laurent):
        data = _shift(laurent, 0, 3, "1/2").to_json()
        assert data["window"] == [0, 3]
        assert data["rho"] == "1/2"
        assert len(data["entries"]) == 3

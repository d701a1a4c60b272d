"""Tests for the singular-model algebra, its charts and its spectrum."""

import pytest
from gmpy2 import mpq

from qna.exceptions import RelationError
from qna.nascalar import NEG_INF, LogNorm
from qna.qtorus import QSeries, Truncation
from qna.singmodel import (
    AqsElement,
    BElement,
    ChartAtlas,
    RelationReport,
    aqs_embed_word,
    aqs_relations_check,
    aqs_twist,
    b_delta,
    b_embed_word,
    b_gauss_norm,
    b_specialize,
    b_twist,
    case_table,
    chart_project,
    f_map,
    gauss_triple,
    gi_chart_hom,
    gi_relations_check,
    gluing_compat_check,
    j_embed,
    j_preimage,
    operator_triple,
    parse_word,
    rational_grid,
    sample_spectrum,
    shift_relations_check,
    shift_representation,
)


class TestWords:
    def test_parse(self):
        assert parse_word("b*a") == ("beta", "alpha")
        assert parse_word("alpha  gamma^-1") == ("alpha", "gamma^-1")
        assert parse_word(["g", "beta"]) == ("gamma", "beta")

    def test_unknown_letter(self):
        with pytest.raises(ValueError, match="unknown letter"):
            parse_word("alpha delta")

    def test_report(self):
        report = RelationReport({"ok": True, "broken": False})
        assert not report.passed
        assert report.failures() == ["broken"]
        with pytest.raises(RelationError, match="broken"):
            report.raise_on_failure()


class TestAlgebra:
    """A_q(S) through its embedding into the beta, gamma torus."""

    def test_relations_hold(self, q_laurent):
        report = aqs_relations_check(q_laurent)
        assert report.passed, report.failures()

    def test_relations_hold_truncated(self, q_laurent):
        for truncation in (Truncation.total_degree(2, 8), Truncation((1, 1), 0)):
            report = aqs_relations_check(q_laurent, truncation)
            assert report.passed, report.failures()

    def test_beta_alpha(self, q_laurent):
        expected = AqsElement(QSeries(aqs_twist(q_laurent), {(0, 0): 1, (0, -1): q_laurent}))
        assert aqs_embed_word("beta alpha", q_laurent) == expected

    def test_alpha_beta_minus_one_inverts_gamma(self, q_laurent):
        one = AqsElement(QSeries.one(aqs_twist(q_laurent)))
        product = (aqs_embed_word("alpha beta", q_laurent) - one) * aqs_embed_word(
            "gamma", q_laurent
        )
        assert product == one

    def test_gauss_norm_of_alpha(self, q_laurent):
        alpha = aqs_embed_word("alpha", q_laurent)
        assert alpha.gauss_norm(1, -1) == LogNorm(0)
        assert alpha.gauss_norm(-1, 2) == LogNorm(1)


class TestBAlgebra:
    """The rank-3 algebra B with central delta."""

    def test_delta_is_the_defect(self, q_laurent):
        lhs = b_embed_word("alpha beta gamma", q_laurent)
        rhs = b_embed_word("gamma", q_laurent) + b_delta(q_laurent)
        assert lhs == rhs

    def test_specialization(self, q_laurent):
        one = AqsElement(QSeries.one(aqs_twist(q_laurent)))
        assert b_specialize(b_delta(q_laurent)) == one

    def test_gauss_norm(self, q_laurent):
        assert b_gauss_norm(b_delta(q_laurent), 0, 0, "3/2") == LogNorm("3/2")

    def test_negative_delta_power(self, q_laurent):
        series = QSeries.monomial(b_twist(q_laurent), (0, 0, -1))
        with pytest.raises(ValueError):
            BElement(series)
        assert BElement(series, delta_inverted=True).delta_inverted


class TestCharts:
    """The cover U_1, U_2, U_3 and the chart homomorphisms."""

    def test_membership(self):
        atlas = ChartAtlas()
        assert atlas.charts_of((-1, 0)) == [1]
        assert atlas.charts_of((1, 1)) == [3]
        assert 2 in atlas.charts_of((4, -1))
        assert atlas.contains("2'", (3, "1/2"))
        assert not atlas.contains("2'", (3, "3/2"))

    def test_cover(self):
        atlas = ChartAtlas()
        axis = rational_grid(-3, 3, 13)
        assert atlas.covers((x, y) for x in axis for y in axis)

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            ChartAtlas(epsilon=2)

    def test_projection(self):
        assert chart_project(2, (3, 1)) == (2, 1)
        assert chart_project(2, (3, -1)) == (3, -1)
        assert chart_project(3, (1, 2)) == (1, 2)

    @pytest.mark.parametrize("chart", [1, 2, 3])
    def test_chart_relations(self, q_laurent, chart):
        report = gi_relations_check(chart, q_laurent)
        assert report.passed, report.failures()

    def test_chart_rejects_beta_inverse(self, q_laurent):
        with pytest.raises(ValueError):
            gi_chart_hom(1, "beta^-1", q_laurent)

    def test_gluing(self, q_laurent):
        report = gluing_compat_check(q_laurent, order=6)
        assert set(report.overlaps) == {"U2 & U3", "U1 & U2", "U1 & U3"}
        assert report.passed, report.overlaps


class TestShiftRepresentation:
    """A_q(S) acting on sum a_i T^i."""

    def test_relations(self, q_laurent):
        report = shift_relations_check(q_laurent, "1/2", 10)
        assert report.passed, report.failures()

    def test_scaled_relations(self, q_laurent, laurent):
        report = shift_relations_check(q_laurent, 0, 10, scale=(laurent.t, 3))
        assert report.passed, report.failures()

    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [-2, -1, 0, 1, 2])
    def test_relations_on_wide_window(self, q_laurent, rho):
        report = shift_relations_check(q_laurent, rho, 128)
        assert report.passed, report.failures()

    def test_alpha_is_a_shift(self, q_laurent):
        op = shift_representation("alpha", 0, q_laurent, 6)
        assert op.entry(3, 2) == 1
        assert op.entry(2, 2) == 0

    def test_beta_inverse_does_not_act(self, q_laurent):
        with pytest.raises(ValueError):
            shift_representation("beta^-1", 0, q_laurent, 6)

    def test_operator_triple(self, q_laurent):
        triple = operator_triple("1/2", q_laurent, 8)
        assert triple.norms == (LogNorm("1/2"), LogNorm(0), LogNorm("-3/2"))
        assert triple.stable


class TestSpectrumMaps:
    """The maps f and j and the case table."""

    def test_f(self):
        assert f_map((LogNorm(1), LogNorm(-2), LogNorm(-1))) == (1, 0, 2)
        with pytest.raises(ValueError):
            f_map((NEG_INF, 0, 0))

    def test_j(self):
        assert j_embed(-1, 2) == (1, 1, -2)
        assert j_embed(2, -1) == (0, 2, 1)
        assert j_embed(2, 3) == (0, 5, -3)

    @pytest.mark.parametrize(
        "point", [(-1, 2), (2, -1), (0, 0), (0, 3), (mpq(-1, 2), mpq(-5, 3)), (3, 0)]
    )
    def test_preimage_inverts_j(self, point):
        assert j_preimage(j_embed(*point)) == point

    def test_outside_image(self):
        assert j_preimage((-1, 0, 0)) is None
        assert j_preimage((1, 5, 0)) is None

    def test_case_table(self):
        assert case_table((0, 0, 0)) == "S0"
        assert case_table((0, 2, 3)) == "S+"
        assert case_table((1, 1, -2)) == "S-"
        assert case_table((1, 1, 0)) is None
        assert case_table((1, 1, -1)) is None

    def test_gauss_triple(self, q_laurent):
        assert gauss_triple(1, -2, q_laurent) == (LogNorm(1), LogNorm(2), LogNorm(1))


class TestSampling:
    def test_grid(self):
        assert rational_grid(-2, 2, 5) == [-2, -1, 0, 1, 2]
        assert rational_grid("1/2", 3, 1) == [mpq(1, 2)]
        with pytest.raises(ValueError):
            rational_grid(0, 1, 0)

    def test_gauss_grid_lands_in_image(self, q_laurent):
        axis = rational_grid(-2, 2, 10)
        rows = sample_spectrum(q_laurent, [(u, v) for u in axis for v in axis])
        assert len(rows) == 100
        assert all(row.in_image for row in rows)

    def test_mixed_quadrant(self, q_laurent):
        (row,) = sample_spectrum(q_laurent, [(1, -2)])
        assert row.f == (1, 1, -2)
        assert row.case == "S-"
        assert row.to_json()["preimage"] == ["-1", "2"]

    def test_shift_rows(self, q_laurent):
        rows = sample_spectrum(q_laurent, [], shift_radii=[-2, 0, "3/2"], window=12)
        assert [row.source for row in rows] == ["shift"] * 3
        assert all(row.in_image and row.stable for row in rows)
        assert all(row.case == "S0" for row in rows)
        assert rows[0].to_json()["scale"] == ["1", "1"]

"""Tests for quantum GL2 over Q_p and its leaf representations."""

import pytest
from gmpy2 import mpq

from qna.exceptions import FieldMismatchError, InadmissibleLeafError
from qna.nascalar import LaurentField, LogNorm, PadicField, is_square_qp
from qna.qgl2 import (
    GENERATORS,
    RELATIONS,
    GL2Representation,
    QuantumGL2,
    UqCoeffData,
    build_rep,
    default_samples,
    gl2_mul,
    gl2_normal_form,
    gl2_sup_norm,
    leaf_constraints_check,
    one_dim_rep,
    parse_gl2_word,
    rep_apply,
    rep_relations_check,
    sl2_check,
    uq_r_norm,
)


@pytest.fixture
def q6(qp5):
    return qp5.coerce(6)


@pytest.fixture
def algebra(q6):
    return QuantumGL2(q6)


class TestAlgebra:
    """PBW normal forms of K[GL2]_q."""

    def test_q_must_be_close_to_one(self, qp5):
        with pytest.raises(ValueError):
            QuantumGL2(qp5.coerce(2))
        with pytest.raises(TypeError):
            QuantumGL2(LaurentField(8).default_q())

    def test_parse(self):
        assert parse_gl2_word("t11*t22") == ("t11", "t22")
        with pytest.raises(ValueError):
            parse_gl2_word("t13")

    def test_straightening(self, algebra):
        result = algebra.normal_form("t22 t11")
        expected = algebra.element(
            {(1, 0, 0, 1): 1, (0, 1, 1, 0): -(algebra.q_inv - algebra.q)}
        )
        assert result == expected

    def test_strategies_agree(self, algebra):
        word = "t22 t21 t11 t12 t22 t11"
        assert algebra.normal_form(word, "right") == algebra.normal_form(word, "left")
        with pytest.raises(ValueError):
            algebra.normal_form(word, "middle")

    def test_relations(self, algebra):
        for name, terms in RELATIONS:
            total = algebra.element({})
            for symbol, word in terms:
                coefficient = {
                    "-q^-1": -algebra.q_inv,
                    "q-q^-1": algebra.q - algebra.q_inv,
                }.get(symbol, symbol)
                total = total + algebra.normal_form(word).scale(coefficient)
            assert total.is_zero(), name

    def test_product_is_associative(self, algebra):
        x = algebra.normal_form("t22 t11") + algebra.generator("t12")
        y = algebra.normal_form("t21 t22")
        z = algebra.generator("t11").scale(5)
        assert (x * y) * z == x * (y * z)

    def test_det_q_is_central(self, algebra):
        det = algebra.det_q()
        for name in GENERATORS:
            g = algebra.generator(name)
            assert det * g == g * det, name

    def test_mul_reorders(self, algebra, qp5):
        t11, t12 = algebra.generator("t11"), algebra.generator("t12")
        assert gl2_mul(t12, t11) == algebra.normal_form("t11 t12").scale(algebra.q)
        other = QuantumGL2(qp5.coerce(11))
        with pytest.raises(FieldMismatchError):
            gl2_mul(t11, other.generator("t11"))

    def test_functional_form(self, q6):
        assert gl2_normal_form("t11 t12", q6) == QuantumGL2(q6).normal_form("t11 t12")


class TestLeaves:
    """Admissible (c, t) and the modules V_(c,t)."""

    def test_admissible_leaf(self, q6):
        assert leaf_constraints_check(1, 1, q6).admissible

    @pytest.mark.parametrize(
        "c, t, reason",
        [
            (2, 1, "-c/q is not a square in Q_p"),
            (mpq(1, 5), 1, "|c| > 1 or c = 0"),
            (1, 5, "t is not a p-adic unit"),
        ],
    )
    def test_inadmissible_leaves(self, q6, c, t, reason):
        report = leaf_constraints_check(c, t, q6)
        assert not report.admissible
        assert reason in report.reasons()

    def test_build_rejects_inadmissible(self, q6):
        with pytest.raises(InadmissibleLeafError):
            build_rep(2, 1, q6, window=8)

    def test_weights(self, q6):
        rep = build_rep(1, 1, q6, window=8)
        assert rep.a11(1).log_norm() == LogNorm(-1)
        assert rep.a11(0).is_zero()
        assert rep.a22(3) == 1
        assert rep.h0() == rep.field.coerce(mpq(-1, 6))

    def test_representation_base_is_abstract(self, q6):
        with pytest.raises(TypeError):
            GL2Representation()
        assert isinstance(build_rep(1, 1, q6, window=4), GL2Representation)
        assert isinstance(one_dim_rep(6, 2, q6), GL2Representation)

    def test_unknown_split(self, q6):
        with pytest.raises(ValueError):
            build_rep(1, 1, q6, window=8, split="diagonal")

    @pytest.mark.parametrize("split", ["unit-upper", "unit-lower"])
    def test_relations_on_window(self, q6, split):
        report = rep_relations_check(build_rep(1, 1, q6, window=10, split=split))
        assert report.passed, report.to_json()
        assert report.det_q_central

    def test_det_q_acts_as_c(self, q6, algebra):
        c = -6 * 25
        rep = build_rep(c, 2, q6, window=10)
        det = rep_apply(rep, algebra.det_q())
        assert det.entry(4, 4) == rep.field.coerce(c)
        assert not sl2_check(rep)

    def test_one_dimensional(self, q6, algebra):
        rep = one_dim_rep(6, 2, q6)
        assert rep_apply(rep, algebra.det_q()).entry(0, 0) == 6
        assert rep_relations_check(rep).passed

    @pytest.mark.slow
    @pytest.mark.parametrize("p", [5, 7])
    def test_weight_identities(self, p):
        q = PadicField(p).coerce(1 + p)
        for c, t in default_samples(p, q):
            for split in ("unit-upper", "unit-lower"):
                rep = build_rep(c, t, q, window=8, split=split)
                q_ext = rep.field.coerce(q)
                h0 = rep.h0()
                assert h0 == rep.field.coerce(-c) * q_ext.invert()
                for m in range(1, 51):
                    assert rep.s(m) == q_ext * (q_ext.invert() ** (2 * m) - 1) * h0
                    assert rep.a11(m) * rep.a22(m - 1) == rep.s(m)

    @pytest.mark.slow
    def test_relations_on_default_samples(self):
        q = PadicField(7).coerce(8)
        for c, t in default_samples(7, q):
            report = rep_relations_check(build_rep(c, t, q, window=64))
            assert report.passed, report.to_json()


class TestSupNorm:
    """sup over leaves of the operator log-norm."""

    def test_default_samples(self, q6):
        samples = default_samples(5, q6)
        assert len(samples) == 9
        assert all(leaf_constraints_check(c, t, q6).admissible for c, t in samples)

    def test_only_the_square_class_is_admissible(self, q6):
        admissible = {
            (u, k): leaf_constraints_check(-6 * u * 5**k, 1, q6).admissible
            for u in (1, 2)
            for k in (0, 1)
        }
        assert admissible == {(1, 0): True, (2, 0): False, (1, 1): False, (2, 1): False}
        for c, _ in default_samples(5, q6):
            assert is_square_qp(q6.field.coerce(-c) / q6)

    def test_t11(self, algebra):
        result = gl2_sup_norm(algebra.generator("t11"), window=16)
        assert result.log_norm == LogNorm(-1)
        assert result.stable
        for sample in result.per_sample:
            val_c = PadicField(5).coerce(sample.c).valuation()
            assert sample.norm.value == LogNorm(-val_c - 1)

    def test_unit_lower_moves_weight_to_t22(self, algebra):
        t11 = gl2_sup_norm(algebra.generator("t11"), [(-6, 1)], window=12, split="unit-lower")
        t22 = gl2_sup_norm(algebra.generator("t22"), [(-6, 1)], window=12, split="unit-lower")
        assert t11.log_norm == LogNorm(0)
        assert t22.log_norm == LogNorm(-1)

    def test_inadmissible_sample_aborts(self, algebra):
        with pytest.raises(InadmissibleLeafError):
            gl2_sup_norm(algebra.one(), [(1, 1), (2, 1)], window=8)

    def test_json(self, algebra):
        data = gl2_sup_norm(algebra.generator("t21"), [(1, 1)], window=8).to_json()
        assert data["log_norm"] == "0"
        assert data["per_sample"][0]["c"] == "1"


class TestUqNorm:
    def test_weighted_max(self, qp5):
        data = UqCoeffData({((1,), (0,), (2,)): qp5.coerce(5), ((0,), (1,), (0,)): qp5.one}, log_r=1)
        assert uq_r_norm(data) == LogNorm(-1)

    def test_negative_index(self, qp5):
        with pytest.raises(ValueError):
            UqCoeffData({((-1,), (0,), (0,)): qp5.one})

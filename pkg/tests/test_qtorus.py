"""Tests for quantum tori, Gauss norms and the torsor action."""

import pytest
from gmpy2 import mpq

from qna.exceptions import (
    NotInvertibleError,
    RelationError,
    TruncationError,
    TwistError,
    TwistMismatchError,
)
from qna.nascalar import NEG_INF, LogNorm, parse_scalar
from qna.qtorus import (
    PolyRadius,
    QSeries,
    TorsorElement,
    Truncation,
    TwistData,
    from_symmetric_basis,
    gauss_norm,
    point_seminorm,
    qt_invert,
    qt_mul,
    substitute_hom,
    to_symmetric_basis,
    torsor_act,
    torsor_act_base,
)


def _series(twist, terms):
    field = twist.field
    return QSeries(twist, {e: parse_scalar(c, field) for e, c in terms.items()})


class TestTwist:
    """Commutation data."""

    def test_q_must_be_a_unit(self, laurent):
        with pytest.raises(TwistError):
            TwistData.two_variable(laurent.t)

    def test_bad_index(self, q_laurent):
        with pytest.raises(TwistError):
            TwistData(2, {(0, 1): 1}, q_laurent)

    def test_classical(self, laurent, q_laurent):
        assert TwistData.commutative(3, laurent).is_classical
        assert TwistData.two_variable(laurent.one).is_classical
        assert not TwistData.two_variable(q_laurent).is_classical


class TestMultiplication:
    """Normal-ordered products."""

    def test_generators_q_commute(self, twist2, q_laurent):
        xi = QSeries.generator(twist2, 0)
        eta = QSeries.generator(twist2, 1)
        assert xi * eta == (eta * xi).scale(q_laurent)
        assert twist2.phi((1, 0), (0, 1)) == 1

    def test_associative(self, twist2):
        f = _series(twist2, {(0, 0): "1", (1, 0): "t"})
        g = _series(twist2, {(0, 1): "1", (1, -1): "2"})
        h = _series(twist2, {(2, 1): "t**-1", (-1, 0): "3"})
        assert (f * g) * h == f * (g * h)

    def test_twists_do_not_mix(self, twist2, laurent):
        other = TwistData.commutative(2, laurent)
        with pytest.raises(TwistMismatchError):
            QSeries.one(twist2) + QSeries.one(other)

    def test_exponent_length_checked(self, twist2):
        with pytest.raises(TwistError):
            QSeries(twist2, {(1, 0, 0): 1})

    def test_json_document(self, twist2, laurent):
        f = _series(twist2, {(0, 0): "1", (2, -1): "t**-1 + 3/2"})
        data = f.to_json()
        assert data["twist"]["c"] == [[2, 1, -1]]
        assert QSeries.from_json(data, laurent) == f


class TestInversion:
    """Monomial and geometric-series inverses."""

    def test_monomial_inverse_is_exact(self, twist2):
        z = _series(twist2, {(1, 1): "t"})
        inv = qt_invert(z)
        assert z * inv == 1
        assert inv * z == 1

    def test_geometric_inverse(self, twist2):
        f = _series(twist2, {(0, 0): "1", (1, 0): "t", (0, 1): "1"})
        trunc = Truncation((1, 1), 5)
        inv = qt_invert(f, trunc)
        residue = qt_mul(f, inv) - 1
        assert residue.truncated(trunc, 5).is_zero()
        assert not residue.is_zero()

    def test_non_monomial_needs_truncation(self, twist2):
        f = _series(twist2, {(0, 0): "1", (1, 0): "1"})
        with pytest.raises(TruncationError):
            qt_invert(f)

    def test_ambiguous_lead_rejected(self, twist2):
        f = _series(twist2, {(1, 0): "1", (0, 1): "1"})
        with pytest.raises(NotInvertibleError):
            qt_invert(f, Truncation.total_degree(2, 4))


class TestGaussNorm:
    """max_I (log|a_I| + <I, log r>)."""

    def test_values(self, laurent):
        twist = TwistData.commutative(2, laurent)
        f = _series(twist, {(0, 0): "1", (1, 0): "t", (0, 2): "t**-1"})
        assert gauss_norm(f, PolyRadius((0, 0))) == LogNorm(1)
        assert gauss_norm(f, ("0", "-1")) == LogNorm(0)
        assert point_seminorm(f, ("-2", "-1")) == LogNorm(0)
        assert gauss_norm(QSeries.zero(twist), (0, 0)) == NEG_INF

    def test_multiplicative(self, twist2):
        f = _series(twist2, {(0, 0): "1", (1, 0): "t"})
        g = _series(twist2, {(0, 1): "1", (1, 1): "t**-1", (-1, 0): "2"})
        r = PolyRadius(("1/2", "1/3"))
        assert gauss_norm(f * g, r) == gauss_norm(f, r) + gauss_norm(g, r)

    def test_radius_rank_checked(self, twist2):
        with pytest.raises(ValueError):
            gauss_norm(QSeries.one(twist2), (0,))

    def test_parse_radius(self):
        assert PolyRadius.parse("0, 1/2").log_radii == (mpq(0), mpq(1, 2))
        with pytest.raises(ValueError):
            PolyRadius((NEG_INF,))


class TestTorsor:
    """GL(n, Z) x| (k^x)^n acting on series and on the base."""

    def test_identity(self, twist2, laurent):
        f = _series(twist2, {(0, 0): "1", (2, -1): "t"})
        assert torsor_act(TorsorElement.identity(laurent, 2), f) == f

    def test_scalar_part(self, laurent):
        twist = TwistData.commutative(2, laurent)
        g = TorsorElement(((1, 0), (0, 1)), (laurent.t, laurent.one))
        image = torsor_act(g, QSeries.generator(twist, 0))
        assert image == QSeries.monomial(twist, (1, 0), laurent.t)
        assert torsor_act_base(g, (0, 0)) == (1, 0)

    def test_matrix_moves_column_exponents(self, laurent):
        twist = TwistData.commutative(2, laurent)
        g = TorsorElement(((1, 1), (0, 1)), (laurent.one, laurent.one))
        assert torsor_act(g, QSeries.generator(twist, 0)).support() == [(1, 0)]
        assert torsor_act(g, QSeries.generator(twist, 1)).support() == [(1, 1)]
        assert torsor_act_base(g, (2, 5)) == (2, 3)

    def test_compose(self, laurent):
        twist = TwistData.commutative(2, laurent)
        f = _series(twist, {(1, 0): "1", (0, 1): "t", (1, 2): "3"})
        g = TorsorElement(((1, 1), (0, 1)), (laurent.t, laurent.one))
        h = TorsorElement(((1, 0), (1, 1)), (laurent.one, laurent.t**2))
        x = (mpq(1, 3), mpq(-2))
        assert torsor_act(g.compose(h), f) == torsor_act(g, torsor_act(h, f))
        assert torsor_act(g.inverse(), torsor_act(g, f)) == f
        assert torsor_act(g, torsor_act(g.inverse(), f)) == f
        assert torsor_act_base(g.compose(h), x) == torsor_act_base(g, torsor_act_base(h, x))

    def test_norm_equivariance(self, laurent):
        twist = TwistData.commutative(2, laurent)
        f = _series(twist, {(0, 0): "1", (1, 0): "t", (0, 2): "t**-1", (1, -1): "5"})
        g = TorsorElement(((2, 1), (1, 1)), (laurent.t, laurent.t**-3))
        x = (mpq(1, 2), mpq(-1, 3))
        assert point_seminorm(torsor_act(g, f), torsor_act_base(g, x)) == point_seminorm(f, x)

    def test_rejects_singular_matrix(self, laurent):
        with pytest.raises(ValueError):
            TorsorElement(((1, 1), (1, 1)), (laurent.one, laurent.one))
        with pytest.raises(ValueError, match="det = 1"):
            TorsorElement(((0, 1), (1, 0)), (laurent.one, laurent.one))


class TestSubstitution:
    """Homomorphisms given by generator images."""

    def test_identity_images(self, twist2):
        f = _series(twist2, {(0, 0): "1", (2, 1): "t", (-1, 3): "2"})
        images = [QSeries.generator(twist2, 0), QSeries.generator(twist2, 1)]
        assert substitute_hom(images, f) == f

    def test_inverse_through_truncation(self, twist2):
        z1 = QSeries.generator(twist2, 0)
        z2 = QSeries.generator(twist2, 1)
        image2 = z2 * (1 + z1)
        trunc = Truncation((1, 1), 4)
        f = QSeries.monomial(twist2, (0, -1))
        g = substitute_hom([z1, image2], f, trunc)
        residue = qt_mul(g, image2) - 1
        assert residue.truncated(trunc, 4).is_zero()

    def test_relations_checked(self, twist2):
        z2 = QSeries.generator(twist2, 1)
        with pytest.raises(RelationError):
            substitute_hom([z2, z2], QSeries.one(twist2))


class TestSymmetricBasis:
    def test_round_trip(self, laurent):
        s = laurent.default_q()
        twist = TwistData.two_variable(s * s)
        f = _series(twist, {(1, 1): "1", (2, -1): "t", (0, 0): "3"})
        coefficients = to_symmetric_basis(f, s)
        assert from_symmetric_basis(twist, coefficients, s) == f

    def test_requires_square_root(self, twist2, laurent):
        with pytest.raises(ValueError):
            to_symmetric_basis(QSeries.one(twist2), laurent.one)

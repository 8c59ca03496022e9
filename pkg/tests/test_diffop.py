"""Operator algebra: normal forms, Euler rewrite, serialization."""

import pytest

from picardfuchs.diffop import (
    DiffOperator,
    EulerForm,
    euler_rewrite,
    normalize,
    op_shift_bounds,
    proportional,
)
from picardfuchs.scalars import ParamPolynomial, Q

PSI_CHI = ("psi", "chi")
ABC = ("psi", "phi", "chi")


def theta_poly(text, params):
    return ParamPolynomial.parse(text, params)


def involution_style_op():
    # 4(4-psi^2) d_psi^2 + 4 psi chi d_psi d_chi + chi^2 d_chi^2
    return DiffOperator.from_text(PSI_CHI, {
        (2, 0): "4*(4-psi^2)",
        (1, 1): "4*psi*chi",
        (0, 2): "chi^2",
    })


class TestConstruction:
    def test_rejects_zero_coefficient(self):
        zero = ParamPolynomial.zero(PSI_CHI)
        with pytest.raises(ValueError, match="zero"):
            DiffOperator(PSI_CHI, {(1, 0): zero})

    def test_rejects_negative_index(self):
        one = ParamPolynomial.const(PSI_CHI, 1)
        with pytest.raises(ValueError, match="index"):
            DiffOperator(PSI_CHI, {(-1, 0): one})

    def test_from_text_drops_zero(self):
        op = DiffOperator.from_text(PSI_CHI, {(1, 0): "psi-psi", (0, 1): "1"})
        assert list(op.terms) == [(0, 1)]

    def test_order(self):
        assert involution_style_op().order() == 2
        assert DiffOperator.zero(PSI_CHI).order() == 0


class TestAlgebra:
    def test_add_cancels(self):
        op = involution_style_op()
        assert (op - op).is_zero

    def test_scaled_by_polynomial(self):
        op = DiffOperator.from_text(PSI_CHI, {(1, 0): "1"})
        two_psi = ParamPolynomial.parse("2*psi", PSI_CHI)
        assert op.scaled(two_psi).coefficient((1, 0)) == two_psi

    def test_str_mentions_derivatives(self):
        txt = str(involution_style_op())
        assert "d_psi^2" in txt and "d_psi*d_chi" in txt


class TestNormalize:
    def test_strips_common_content(self):
        a = DiffOperator.from_text(PSI_CHI, {(2, 0): "6*psi", (0, 0): "-12"})
        b = DiffOperator.from_text(PSI_CHI, {(2, 0): "psi", (0, 0): "-2"})
        assert normalize(a) == normalize(b)

    def test_strips_common_polynomial_factor(self):
        a = DiffOperator.from_text(PSI_CHI, {(1, 0): "psi^2-psi", (0, 0): "psi"})
        b = DiffOperator.from_text(PSI_CHI, {(1, 0): "psi-1", (0, 0): "1"})
        assert normalize(a) == normalize(b)

    def test_sign_fixed_by_leading_term(self):
        a = DiffOperator.from_text(PSI_CHI, {(2, 0): "-psi", (0, 1): "3"})
        n = normalize(a)
        lead = n.coefficient((2, 0))
        assert lead.terms[lead.leading_exponent()] > 0

    def test_proportional_accepts_rational_scalars(self):
        op = involution_style_op()
        assert proportional(op, op.scaled(Q(-7, 3)))
        other = DiffOperator.from_text(PSI_CHI, {(2, 0): "1"})
        assert not proportional(op, other)


class TestEulerRewrite:
    def test_theta_cubed_identity(self):
        # x^3 d^3 = theta (theta-1) (theta-2)
        op = DiffOperator.from_text(("x",), {(3,): "x^3"})
        ef = euler_rewrite(op)
        assert ef.shifts() == [(0,)]
        assert ef.terms[(0,)] == theta_poly("x^3-3*x^2+2*x", ("x",))

    def test_pure_derivative_shift(self):
        # d^2 at output exponent o multiplies by (o+2)(o+1)
        op = DiffOperator.from_text(("x",), {(2,): "1"})
        ef = euler_rewrite(op)
        assert ef.shifts() == [(-2,)]
        assert ef.terms[(-2,)] == theta_poly("x^2+3*x+2", ("x",))

    def test_multiplication_only(self):
        op = DiffOperator.from_text(("x",), {(0,): "5*x^2"})
        ef = euler_rewrite(op)
        assert ef.terms[(2,)] == theta_poly("5", ("x",))

    def test_involution_style_euler_form(self):
        # All monomials with matching powers collapse to the zero-shift
        # theta block; only the constant-coefficient part keeps a shift.
        ef = euler_rewrite(involution_style_op())
        assert set(ef.shifts()) == {(-2, 0), (0, 0)}
        zero_block = theta_poly("-4*psi^2+4*psi+4*psi*chi+chi^2-chi", PSI_CHI)
        assert ef.terms[(0, 0)] == zero_block
        down = theta_poly("16*psi^2+48*psi+32", PSI_CHI)  # 16(t+2)(t+1)
        assert ef.terms[(-2, 0)] == down

    def test_rewrite_cancellation_drops_term(self):
        # x*d - theta rewrites to nothing
        op = DiffOperator.from_text(("x",), {(1,): "x", (0,): "0-0"})
        ef = euler_rewrite(op)
        theta = theta_poly("x", ("x",))
        assert ef.terms[(0,)] == theta


class TestShiftBounds:
    def test_mixed_shifts(self):
        op = DiffOperator.from_text(ABC, {
            (2, 0, 0): "1+psi^2",     # shifts -2 and 0 in psi
            (0, 0, 1): "chi^2",       # shift +1 in chi
            (0, 1, 0): "psi",         # -1 in phi, +1 in psi
        })
        assert op_shift_bounds(op) == (-2, -1, 0)


class TestJson:
    def test_round_trip_identity(self):
        op = involution_style_op()
        text = op.to_json()
        again = DiffOperator.from_json(text)
        assert again == op
        assert again.to_json() == text

    def test_derivs_omit_zero_entries(self):
        text = involution_style_op().to_json()
        assert '"phi"' not in text  # two-parameter operator
        assert '"derivs": {}' not in text

    def test_duplicate_indices_rejected(self):
        bad = ('{"parameters": ["psi"], "terms": ['
               '{"coeff": "1", "derivs": {"psi": 1}},'
               '{"coeff": "2", "derivs": {"psi": 1}}]}')
        with pytest.raises(ValueError, match="duplicate"):
            DiffOperator.from_json(bad)

    def test_coefficient_text_is_canonical(self):
        op = DiffOperator.from_text(PSI_CHI, {(2, 0): "4*(4-psi^2)"})
        assert '"-4*psi^2+16"' in op.to_json() or '"16-4*psi^2"' in op.to_json()

"""Pole reduction and one-parameter operator derivation."""

import random

import pytest

from picardfuchs.diffop import DiffOperator, normalize, proportional
from picardfuchs.family import CurveSpec, FamilySpec, K3Spec, \
    standard_deformations, twist
from picardfuchs.gdwork import RationalForm, ReductionContext, \
    ReductionError, derive_pf_1param, jacobian_ideal, reduce_pole, \
    restrict_to_parameter
from picardfuchs.groebner import GroebnerBasis
from picardfuchs.scalars import ParamPolynomial, Q
from picardfuchs.wpoly import WeightedRing


def quartic_sextic_family() -> FamilySpec:
    curve = CurveSpec.from_text((2, 1, 1), "Y^4 + Z^4")
    k3 = K3Spec.from_text((3, 1, 1, 1), "y^6 + z^6 + w^6")
    return standard_deformations(twist(curve, k3))


def cubic_sextic_family() -> FamilySpec:
    curve = CurveSpec.from_text((3, 2, 1), "Y^3 + Z^6")
    k3 = K3Spec.from_text((5, 2, 2, 1), "y^5 + z^5 + w^10")
    return standard_deformations(twist(curve, k3))


def quintic_family() -> FamilySpec:
    ring = WeightedRing(["x0", "x1", "x2", "x3", "x4"], [1] * 5)
    return FamilySpec(
        variables=("x0", "x1", "x2", "x3", "x4"),
        weights=(1, 1, 1, 1, 1),
        base=ring.parse("x0^5 + x1^5 + x2^5 + x3^5 + x4^5"),
        degree=5,
        deformations=(("psi", (1, 1, 1, 1, 1)),),
    )


# -- rational forms -------------------------------------------------------

def test_holomorphic_form():
    fs = quintic_family()
    q = fs.polynomial()
    form = RationalForm.holomorphic(q)
    assert form.pole == 1
    assert form.numerator == q.ring.parse("1")
    # degree invariant: numerator degree = pole*d - sum(weights) = 0
    assert RationalForm.expected_degree(q, 1) == 0


def test_form_degree_invariant_enforced():
    fs = quintic_family()
    q = fs.polynomial()
    with pytest.raises(ValueError):
        RationalForm(q, q.ring.parse("x0"), 1, ParamPolynomial.const(("psi",), 1))
    # pole 2 wants degree 5: x0^5 is fine, x0^4 is not
    RationalForm(q, q.ring.parse("x0^5"), 2, ParamPolynomial.const(("psi",), 1))
    with pytest.raises(ValueError):
        RationalForm(q, q.ring.parse("x0^4"), 2, ParamPolynomial.const(("psi",), 1))
    with pytest.raises(ValueError):
        RationalForm(q, q.ring.parse("1"), 0, ParamPolynomial.const(("psi",), 1))


# -- Jacobian ideals ------------------------------------------------------

def test_jacobian_ideal_quartic_sextic():
    fs = quartic_sextic_family()
    partials = {v: p for v, p in zip(fs.variables, jacobian_ideal(fs))}
    ring = fs.ring()
    assert partials["Y"] == ring.parse("4*Y^3 + 2*psi*Y*Z^2 + chi*Z*y*z*w")
    assert partials["w"] == ring.parse("6*w^5 + 2*phi*y^2*z^2*w + chi*Y*Z*y*z")


def test_jacobian_ideal_cubic_sextic():
    fs = cubic_sextic_family()
    partials = {v: p for v, p in zip(fs.variables, jacobian_ideal(fs))}
    ring = fs.ring()
    assert partials["w"] == ring.parse("10*w^9 + 2*phi*y^2*z^2*w + chi*Y*Z*y*z")
    assert partials["Z"] == ring.parse("6*Z^5 + 2*psi*Y^2*Z + chi*Y*y*z*w")


def test_jacobian_ideal_fermat_is_monomial():
    fs = quartic_sextic_family()
    for p in jacobian_ideal(fs, values={"psi": 0, "phi": 0, "chi": 0}):
        assert len(p.terms) == 1


def test_euler_identity_random_families():
    # sum w_i x_i dQ/dx_i = d*Q for any quasi-homogeneous Q
    rng = random.Random(7)
    for fs in (quartic_sextic_family(), cubic_sextic_family(), quintic_family()):
        ring = fs.ring()
        q = fs.polynomial()
        for p in (q, q * q):
            total = ring.zero()
            for v, w in zip(fs.variables, fs.weights):
                total = total + ring.parse(f"{w}*{v}") * p.derivative(v)
            assert total == p * Q(p.weighted_degree())
        del rng  # families are fixed; the loop itself is the sweep
        break


# -- single reduction steps ----------------------------------------------

def test_reduce_pole_single_cofactor():
    fs = quintic_family()
    sub = restrict_to_parameter(fs, "psi")
    ctx = ReductionContext(sub)
    q = ctx.q
    ring = q.ring
    # numerator dQ/dx0 * h drops to (1/r) dh/dx0 at the lower pole
    h = ring.parse("x0^2*x1^4")
    numer = q.derivative("x0") * h
    form = RationalForm(q, numer, 3, ParamPolynomial.const(("psi",), 1))
    reduced, mem = reduce_pole(form, ctx.gb)
    assert reduced.pole == 2
    # soundness: scale * numerator == sum cofactor_i * dQ/dx_i
    lhs = numer * mem.scale
    rhs = ring.zero()
    for cof, gen in zip(mem.cofactors, ctx.generators):
        rhs = rhs + cof * gen
    assert lhs == rhs
    # the reduced numerator is the cofactor divergence over scale*(pole-1)
    div = ring.zero()
    for cof, v in zip(mem.cofactors, ring.vars):
        div = div + cof.derivative(v)
    assert reduced.numerator == div
    assert reduced.den == mem.scale * Q(2)


def test_reduce_pole_zero_numerator():
    fs = quintic_family()
    sub = restrict_to_parameter(fs, "psi")
    ctx = ReductionContext(sub)
    form = RationalForm(ctx.q, ctx.q.ring.zero(), 2,
                        ParamPolynomial.const(("psi",), 1))
    reduced, mem = reduce_pole(form, ctx.gb)
    assert reduced.numerator.is_zero and reduced.pole == 1
    assert mem.cofactors == []


def test_reduce_pole_rejects_nonmember():
    fs = quintic_family()
    sub = restrict_to_parameter(fs, "psi")
    ctx = ReductionContext(sub)
    ring = ctx.q.ring
    # x0*...*x4 is a standard monomial, so not in the Jacobian ideal
    bad = RationalForm(ctx.q, ring.parse("x0*x1*x2*x3*x4"), 2,
                       ParamPolynomial.const(("psi",), 1))
    with pytest.raises(ReductionError):
        reduce_pole(bad, ctx.gb)
    holo = RationalForm.holomorphic(ctx.q)
    with pytest.raises(ReductionError):
        reduce_pole(holo, ctx.gb)


def test_restrict_to_parameter():
    fs = quartic_sextic_family()
    sub = restrict_to_parameter(fs, "phi")
    assert sub.parameters() == ("phi",)
    assert sub.base == fs.base
    with pytest.raises(ValueError):
        restrict_to_parameter(fs, "nope")


# -- full derivations -----------------------------------------------------

def test_derive_quintic_operator():
    # classical quintic mirror operator in the plain deformation coordinate
    op = derive_pf_1param(quintic_family(), max_order=6)
    want = DiffOperator.from_text(("psi",), {
        (0,): "psi",
        (1,): "15*psi^2",
        (2,): "25*psi^3",
        (3,): "10*psi^4",
        (4,): "psi^5 + 3125",
    })
    assert proportional(op, want)


def test_derive_cubic_sextic_psi():
    fs = restrict_to_parameter(cubic_sextic_family(), "psi")
    op = derive_pf_1param(fs, max_order=4)
    want = DiffOperator.from_text(("psi",), {
        (0,): "psi^2",
        (1,): "8*psi^3 - 27",
        (2,): "4*psi^4 + 27*psi",
    })
    assert proportional(op, want)


def test_psi_operator_matches_curve_factor():
    # the psi deformation only touches the genus-one curve factor, so the
    # threefold operator must equal the curve family's operator
    ring = WeightedRing(["X", "Y", "Z"], [3, 2, 1])
    curve_fs = FamilySpec(
        variables=("X", "Y", "Z"),
        weights=(3, 2, 1),
        base=ring.parse("X^2 + Y^3 + Z^6"),
        degree=6,
        deformations=(("psi", (0, 2, 2)),),
    )
    op_curve = derive_pf_1param(curve_fs, max_order=4)
    op_threefold = derive_pf_1param(
        restrict_to_parameter(cubic_sextic_family(), "psi"), max_order=4)
    assert proportional(op_curve, op_threefold)


def test_psi_flag_independent_at_order_one():
    # no first-order relation: the order-2 operator is minimal
    fs = restrict_to_parameter(cubic_sextic_family(), "psi")
    with pytest.raises(ReductionError):
        derive_pf_1param(fs, max_order=1)


def test_derive_cubic_sextic_phi():
    fs = restrict_to_parameter(cubic_sextic_family(), "phi")
    op = derive_pf_1param(fs, max_order=6)
    want = DiffOperator.from_text(("phi",), {
        (0,): "6*phi^3",
        (1,): "210*phi^4",
        (2,): "412*phi^5 + 6250",
        (3,): "168*phi^6 - 6250*phi",
        (4,): "16*phi^7 + 3125*phi^2",
    })
    assert proportional(op, want)


def test_derive_cubic_sextic_chi_order_and_singular_locus():
    fs = restrict_to_parameter(cubic_sextic_family(), "chi")
    op = derive_pf_1param(fs, max_order=18)
    assert op.order() == 16
    lead = normalize(op).coefficient((16,))
    want = ParamPolynomial.parse(
        "chi^44 - 112100835937500000000*chi^14", ("chi",))
    assert lead == want or lead == -want


def test_derive_reports_exhaustion():
    fs = restrict_to_parameter(cubic_sextic_family(), "chi")
    with pytest.raises(ReductionError):
        derive_pf_1param(fs, max_order=3)


def test_derivative_cascade_degree_bookkeeping():
    # every coordinate the cascade produces sits on a standard monomial of
    # the right weighted degree for its pole level
    fs = restrict_to_parameter(cubic_sextic_family(), "psi")
    ctx = ReductionContext(fs)
    parts = ctx.holomorphic_parts()
    for _ in range(3):
        parts = ctx.parameter_derivative(parts)
        for pole, level in parts.items():
            for e in level:
                assert ctx.is_standard(pole, e)
                assert ctx.ring.weighted_degree(e) == \
                    RationalForm.expected_degree(ctx.q, pole)

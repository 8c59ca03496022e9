"""Weighted rings: parsing, grading, monomial enumeration, orders."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from picardfuchs.scalars import ParamPolynomial, Q
from picardfuchs.wpoly import ParseError, WeightedRing


@pytest.fixture
def ring():
    # the (3,3,2,2,2)-weighted ring carrying three deformation parameters
    return WeightedRing(("Y", "Z", "y", "z", "w"), (3, 3, 2, 2, 2),
                        ("psi", "phi", "chi"))


def test_parse_deformation_family(ring):
    p = ring.parse("Y^4 + Z^4 + y^6 + z^6 + w^6"
                   " + psi*Y^2*Z^2 + phi*y^2*z^2*w^2 + chi*Y*Z*y*z*w")
    assert p.is_quasi_homogeneous()
    assert p.weighted_degree() == 12
    assert len(p.terms) == 8


def test_parse_rational_literal(ring):
    p = ring.parse("3/4*Y - 2*Y")
    ((exp, coeff),) = p.terms.items()
    assert coeff.constant_value() == Q(-5, 4)


def test_parse_parenthoses_and_unary_minus(ring):
    p = ring.parse("-(Y - Z)*(Y + Z)")
    assert p == ring.parse("Z^2 - Y^2")


def test_parse_error_position(ring):
    with pytest.raises(ParseError) as exc:
        ring.parse("Y^2 +\n Q*Z")
    assert exc.value.line == 2
    assert exc.value.column == 2
    with pytest.raises(ParseError):
        ring.parse("Y^-2")
    with pytest.raises(ParseError):
        ring.parse("Y Z")
    with pytest.raises(ParseError):
        ring.parse("Y / Z")


def test_weighted_degree(ring):
    assert ring.weighted_degree((2, 2, 0, 0, 0)) == 12
    assert ring.weighted_degree((1, 1, 1, 1, 1)) == 12
    assert not ring.parse("Y^4 + y^2").is_quasi_homogeneous()


def test_enumeration_matches_generating_function(ring):
    for d in (0, 1, 2, 3, 6, 12, 24):
        monos = ring.monomials_of_degree(d)
        assert len(monos) == ring.graded_dimension(d)
        assert all(ring.weighted_degree(e) == d for e in monos)
        assert len(set(monos)) == len(monos)


def test_enumeration_small_case():
    r = WeightedRing(("a", "b"), (1, 2))
    monos = r.monomials_of_degree(4)
    # a^4, a^2 b, b^2
    assert set(monos) == {(4, 0), (2, 1), (0, 2)}
    assert monos == sorted(monos, key=r.order_key, reverse=True)


def test_graded_dimension_degenerate():
    r = WeightedRing(("a", "b"), (2, 3))
    assert r.graded_dimension(1) == 0
    assert r.monomials_of_degree(1) == []
    assert r.graded_dimension(0) == 1


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=4),
       st.integers(0, 14))
def test_enumeration_count_property(weights, degree):
    names = tuple(f"x{i}" for i in range(len(weights)))
    r = WeightedRing(names, weights)
    assert len(r.monomials_of_degree(degree)) == r.graded_dimension(degree)


def test_grevlex_vs_grlex():
    rev = WeightedRing(("a", "b", "c"), (1, 1, 1), order="grevlex")
    lex = WeightedRing(("a", "b", "c"), (1, 1, 1), order="grlex")
    # a*c vs b^2: grevlex ranks b^2 higher (smaller last exponent wins),
    # grlex ranks a*c higher (lexicographically larger tuple)
    ac, b2 = (1, 0, 1), (0, 2, 0)
    assert rev.order_key(b2) > rev.order_key(ac)
    assert lex.order_key(ac) > lex.order_key(b2)


def test_weighted_order_grades_first():
    r = WeightedRing(("a", "b"), (5, 1))
    assert r.order_key((1, 0)) > r.order_key((0, 4))  # wdeg 5 > 4


def test_derivative(ring):
    p = ring.parse("psi*Y^2*Z^2 + y^6")
    assert p.derivative("Y") == ring.parse("2*psi*Y*Z^2")
    assert p.derivative("w").is_zero


def test_arithmetic_and_pow(ring):
    q = ring.parse("Y + Z")
    assert q**3 == ring.parse("Y^3 + 3*Y^2*Z + 3*Y*Z^2 + Z^3")
    assert (q - q).is_zero
    assert q * 0 == ring.zero()


def test_specialize_params(ring):
    p = ring.parse("Y^4 + psi*Y^2*Z^2 + chi*Y*Z*y*z*w")
    q = p.specialize_params({"psi": Q(0), "chi": Q(3)})
    assert q.ring.params == ("phi",)
    assert q == q.ring.parse("Y^4 + 3*Y*Z*y*z*w")
    full = p.specialize_params({"psi": Q(2), "phi": Q(0), "chi": Q(0)})
    assert full.ring.params == ()
    assert full == full.ring.parse("Y^4 + 2*Y^2*Z^2")


def test_parse_roundtrip_through_str(ring):
    texts = [
        "Y^4 + Z^4 + y^6 + z^6 + w^6 + psi*Y^2*Z^2",
        "(psi^2 - 4)*Y*Z + 1/2*w^3",
        "-Y^2*Z^2 + 3*psi*chi*y*z*w^2 - 7/3",
    ]
    for t in texts:
        p = ring.parse(t)
        assert ring.parse(str(p)) == p


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(0, 3), st.integers(0, 2)),
                min_size=1, max_size=5))
def test_param_poly_roundtrip(items):
    params = ("psi", "chi")
    p = ParamPolynomial(params, {(i, j): Q(c) for c, i, j in items})
    assert ParamPolynomial.parse(str(p), params) == p


def test_ring_validation():
    with pytest.raises(ValueError):
        WeightedRing(("a",), (0,))
    with pytest.raises(ValueError):
        WeightedRing(("a", "b"), (1,))
    with pytest.raises(ValueError):
        WeightedRing(("a",), (1,), ("a",))
    with pytest.raises(ValueError):
        WeightedRing(("a",), (1,), order="lex")

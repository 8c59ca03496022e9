import pytest

from picardfuchs.family import (
    CurveSpec,
    FamilySpec,
    K3Spec,
    hodge_numbers,
    invariant_monomials,
    standard_deformations,
    twist,
)


def quartic_sextic_family() -> FamilySpec:
    e = CurveSpec.from_text((2, 1, 1), "Y^4 + Z^4")
    k = K3Spec.from_text((3, 1, 1, 1), "y^6 + z^6 + w^6")
    return twist(e, k)


def cubic_quintic_family() -> FamilySpec:
    e = CurveSpec.from_text((3, 2, 1), "Y^3 + Z^6")
    k = K3Spec.from_text((5, 2, 2, 1), "y^5 + z^5 + w^10")
    return twist(e, k)


class TestTwist:
    def test_quartic_sextic(self):
        fs = quartic_sextic_family()
        assert fs.weights == (3, 3, 2, 2, 2)
        assert fs.degree == 12
        assert str(fs.base) == "Y^4+Z^4+y^6+z^6+w^6"

    def test_cubic_quintic(self):
        fs = cubic_quintic_family()
        assert fs.weights == (10, 5, 6, 6, 3)
        assert fs.degree == 30
        assert str(fs.base) == "Y^3+Z^6+y^5+z^5+w^10"

    def test_shared_cover_weight_rejected(self):
        e = CurveSpec.from_text((2, 1, 1), "Y^4 + Z^4")
        k = K3Spec.from_text((4, 2, 1, 1), "y^4 + z^8 + w^8")
        with pytest.raises(ValueError, match="share a factor"):
            twist(e, k)

    def test_calabi_yau_output(self):
        for fs in (quartic_sextic_family(), cubic_quintic_family()):
            assert sum(fs.weights) == fs.degree
            assert fs.base.weighted_degree() == fs.degree

    def test_non_calabi_yau_curve_rejected(self):
        with pytest.raises(ValueError, match="not Calabi-Yau"):
            CurveSpec.from_text((3, 1, 1), "Y^6 + Z^6")

    def test_wrong_branch_degree_rejected(self):
        with pytest.raises(ValueError, match="degree"):
            CurveSpec.from_text((2, 1, 1), "Y^6 + Z^6")


class TestStandardDeformations:
    def test_three_deformations_degree_12(self):
        fs = standard_deformations(quartic_sextic_family())
        assert fs.parameters() == ("psi", "phi", "chi")
        exps = [e for _, e in fs.deformations]
        assert exps == [(2, 2, 0, 0, 0), (0, 0, 2, 2, 2), (1, 1, 1, 1, 1)]
        ring = fs.bare_ring()
        assert all(ring.weighted_degree(e) == 12 for e in exps)

    def test_three_deformations_degree_30(self):
        fs = standard_deformations(cubic_quintic_family())
        ring = fs.bare_ring()
        assert all(ring.weighted_degree(e) == 30 for _, e in fs.deformations)

    def test_degree_mismatch_rejected(self):
        fs = quartic_sextic_family()
        with pytest.raises(ValueError, match="degree"):
            fs.with_deformations([("t", (1, 1, 0, 0, 0))])

    def test_duplicate_parameter_rejected(self):
        fs = standard_deformations(quartic_sextic_family())
        with pytest.raises(ValueError, match="duplicate"):
            fs.with_deformations([("psi", (4, 0, 0, 0, 0))])

    def test_full_polynomial(self):
        fs = standard_deformations(quartic_sextic_family())
        q = fs.polynomial()
        assert len(q.terms) == 8
        assert q.is_quasi_homogeneous()
        assert q.weighted_degree() == 12
        assert str(q) == ("Y^4+psi*Y^2*Z^2+Z^4+y^6+z^6"
                          "+chi*Y*Z*y*z*w+phi*y^2*z^2*w^2+w^6")


class TestInvariantMonomials:
    def test_contains_distinguished_monomials(self):
        fs = standard_deformations(quartic_sextic_family())
        inv = invariant_monomials(fs, 12)
        for e in [(2, 2, 0, 0, 0), (0, 0, 2, 2, 2), (1, 1, 1, 1, 1),
                  (4, 0, 0, 0, 0), (0, 0, 6, 0, 0), (0, 0, 0, 6, 0)]:
            assert e in inv
        # the extra K3-side cross terms show up too
        assert (0, 0, 3, 3, 0) in inv

    def test_every_family_degree_monomial_lifts(self):
        # at degree 2*v0*w0 the divisibility is automatic, so the list is
        # the full graded piece
        for fs in (quartic_sextic_family(), cubic_quintic_family()):
            ring = fs.bare_ring()
            inv = invariant_monomials(fs, fs.degree)
            assert len(inv) == ring.graded_dimension(fs.degree)
            assert inv == ring.monomials_of_degree(fs.degree)

    def test_degree_zero(self):
        fs = quartic_sextic_family()
        assert invariant_monomials(fs, 0) == [(0, 0, 0, 0, 0)]

    def test_lift_filter_bites_off_family_degree(self):
        # weights (10,5,6,6,3), curve weights v=(3,2,1): at degree 20 the
        # monomial Y*z*w with curve-block degree 2 is not a multiple of 3
        fs = cubic_quintic_family()
        inv = invariant_monomials(fs, 20)
        assert (1, 0, 0, 1, 1) not in inv
        ring = fs.bare_ring()
        assert len(inv) < ring.graded_dimension(20)


class TestHodgeNumbers:
    def test_self_mirror_points(self):
        assert hodge_numbers(0, 0) == (11, 11)
        assert hodge_numbers(2, 2) == (19, 19)

    def test_mirror_swap(self):
        for n, g in [(0, 0), (1, 3), (5, 2), (10, 0)]:
            h11, h21 = hodge_numbers(n, g)
            assert hodge_numbers(g, n) == (h21, h11)

    def test_negative_inputs_rejected(self):
        with pytest.raises(ValueError):
            hodge_numbers(-1, 0)

    def test_negative_result_rejected(self):
        with pytest.raises(ValueError):
            hodge_numbers(0, 12)


class TestJsonRoundTrip:
    def test_round_trip(self):
        fs = standard_deformations(quartic_sextic_family())
        text = fs.to_json()
        back = FamilySpec.from_json(text)
        assert back.variables == fs.variables
        assert back.weights == fs.weights
        assert back.degree == fs.degree
        assert back.deformations == fs.deformations
        assert back.base == fs.base
        # byte-identical on a second pass
        assert back.to_json() == text

    def test_json_shape(self):
        import json

        fs = standard_deformations(quartic_sextic_family())
        doc = json.loads(fs.to_json())
        assert doc["variables"][0] == {"name": "Y", "weight": 3}
        assert doc["deformations"][0] == {"param": "psi",
                                          "monomial": "Y^2*Z^2"}

    def test_non_monomial_deformation_rejected(self):
        fs = standard_deformations(quartic_sextic_family())
        text = fs.to_json().replace("Y^2*Z^2", "Y^2*Z^2 + Z^4")
        with pytest.raises(ValueError, match="single monomial"):
            FamilySpec.from_json(text)

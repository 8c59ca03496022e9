"""Twisted hypersurface models built from an elliptic curve and a K3 surface.

A double cover X^2 + f(Y, Z) = 0 in weights (v0, v1, v2) and a double cover
x^2 + g(y, z, w) = 0 in weights (w0, w1, w2, w3), with gcd(v0, w0) = 1,
combine into a single hypersurface f(Y, Z) + g(y, z, w) = 0 of degree
2*v0*w0 in the five twisted coordinates with weights

    (w0*v1, w0*v2, v0*w1, v0*w2, v0*w3).

This module handles the weight bookkeeping of that construction, the
deformation families obtained by adding parameter-weighted monomials to the
base polynomial, selection of monomials that lift to deformations invariant
under the pair of covering involutions, and the fixed-locus Hodge-number
count for the quotient threefold.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .scalars import Exponent
from .wpoly import WeightedRing, WPolynomial

CURVE_VARS = ("Y", "Z")
K3_VARS = ("y", "z", "w")
TWISTED_VARS = CURVE_VARS + K3_VARS


def _check_cover(label: str, weights: Sequence[int], p: WPolynomial,
                 var_names: Tuple[str, ...]) -> None:
    w0, rest = weights[0], tuple(weights[1:])
    if w0 != sum(rest):
        raise ValueError(
            f"{label}: covering weight {w0} != sum of branch weights {rest}, "
            "the double cover is not Calabi-Yau")
    if tuple(p.ring.vars) != var_names:
        raise ValueError(f"{label}: branch polynomial must use variables "
                         f"{var_names}, got {tuple(p.ring.vars)}")
    if tuple(p.ring.weights) != rest:
        raise ValueError(f"{label}: branch polynomial ring weights "
                         f"{tuple(p.ring.weights)} != {rest}")
    if p.is_zero or not p.is_quasi_homogeneous():
        raise ValueError(f"{label}: branch polynomial must be nonzero and "
                         "quasi-homogeneous")
    if p.weighted_degree() != 2 * w0:
        raise ValueError(f"{label}: branch degree {p.weighted_degree()} != "
                         f"2*{w0}")


@dataclass(frozen=True)
class CurveSpec:
    """Elliptic double cover X^2 + f(Y, Z) with weights (v0, v1, v2)."""

    weights: Tuple[int, int, int]
    f: WPolynomial

    def __post_init__(self):
        _check_cover("curve", self.weights, self.f, CURVE_VARS)

    @classmethod
    def from_text(cls, weights: Sequence[int], text: str) -> "CurveSpec":
        v0, v1, v2 = weights
        ring = WeightedRing(list(CURVE_VARS), [v1, v2])
        return cls((v0, v1, v2), ring.parse(text))


@dataclass(frozen=True)
class K3Spec:
    """K3 double cover x^2 + g(y, z, w) with weights (w0, w1, w2, w3)."""

    weights: Tuple[int, int, int, int]
    g: WPolynomial

    def __post_init__(self):
        _check_cover("K3", self.weights, self.g, K3_VARS)

    @classmethod
    def from_text(cls, weights: Sequence[int], text: str) -> "K3Spec":
        w0, w1, w2, w3 = weights
        ring = WeightedRing(list(K3_VARS), [w1, w2, w3])
        return cls((w0, w1, w2, w3), ring.parse(text))


@dataclass(frozen=True)
class FamilySpec:
    """A deformation family: base polynomial plus parameter-monomial pairs.

    The base and every deformation monomial are quasi-homogeneous of the
    common degree, which equals the sum of the variable weights.  The full
    family polynomial lives over Q[parameter names].
    """

    variables: Tuple[str, ...]
    weights: Tuple[int, ...]
    base: WPolynomial  # parameter-free
    degree: int
    deformations: Tuple[Tuple[str, Exponent], ...] = ()
    provenance: Optional[Tuple[CurveSpec, K3Spec]] = None

    def __post_init__(self):
        if sum(self.weights) != self.degree:
            raise ValueError(f"sum of weights {sum(self.weights)} != degree "
                             f"{self.degree}, family is not Calabi-Yau")
        if self.base.is_zero or not self.base.is_quasi_homogeneous() \
                or self.base.weighted_degree() != self.degree:
            raise ValueError("base polynomial must be quasi-homogeneous of "
                             f"degree {self.degree}")
        names = [name for name, _ in self.deformations]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate deformation parameters in {names}")
        plain = self.bare_ring()
        for name, e in self.deformations:
            d = plain.weighted_degree(e)
            if d != self.degree:
                raise ValueError(
                    f"deformation monomial {plain.monomial(e)} for {name} "
                    f"has degree {d}, expected {self.degree}")

    # -- rings and polynomials -------------------------------------------

    def bare_ring(self) -> WeightedRing:
        return WeightedRing(list(self.variables), list(self.weights))

    def ring(self) -> WeightedRing:
        return WeightedRing(list(self.variables), list(self.weights),
                            params=[name for name, _ in self.deformations])

    def parameters(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.deformations)

    def polynomial(self) -> WPolynomial:
        """base + sum(parameter * monomial) over Q[parameters]."""
        ring = self.ring()
        out = ring.zero()
        for e, c in self.base.terms.items():
            out = out + ring.monomial(e, c.constant_value())
        for name, e in self.deformations:
            p = ring.parse(name)
            out = out + ring.monomial(e) * p
        return out

    def with_deformations(
            self, extra: Sequence[Tuple[str, Exponent]]) -> "FamilySpec":
        return FamilySpec(self.variables, self.weights, self.base,
                          self.degree, self.deformations + tuple(extra),
                          self.provenance)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> str:
        plain = self.bare_ring()
        doc = {
            "variables": [{"name": n, "weight": w}
                          for n, w in zip(self.variables, self.weights)],
            "base": str(self.base),
            "deformations": [{"param": name, "monomial": str(plain.monomial(e))}
                             for name, e in self.deformations],
        }
        if self.provenance is not None:
            curve, k3 = self.provenance
            doc["covers"] = {
                "curve": {"weights": list(curve.weights),
                          "branch": str(curve.f)},
                "k3": {"weights": list(k3.weights), "branch": str(k3.g)},
            }
        return json.dumps(doc, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "FamilySpec":
        doc = json.loads(text)
        names = [v["name"] for v in doc["variables"]]
        weights = [int(v["weight"]) for v in doc["variables"]]
        plain = WeightedRing(names, weights)
        base = plain.parse(doc["base"])
        deformations = []
        for item in doc.get("deformations", []):
            m = plain.parse(item["monomial"])
            if len(m.terms) != 1:
                raise ValueError(f"deformation entry {item['monomial']!r} is "
                                 "not a single monomial")
            [(e, c)] = m.terms.items()
            if c.constant_value() != 1:
                raise ValueError(f"deformation monomial {item['monomial']!r} "
                                 "must have coefficient 1")
            deformations.append((item["param"], e))
        provenance = None
        if "covers" in doc:
            curve = CurveSpec.from_text(doc["covers"]["curve"]["weights"],
                                        doc["covers"]["curve"]["branch"])
            k3 = K3Spec.from_text(doc["covers"]["k3"]["weights"],
                                  doc["covers"]["k3"]["branch"])
            rebuilt = twist(curve, k3)
            if rebuilt.variables != tuple(names) \
                    or rebuilt.weights != tuple(weights) \
                    or rebuilt.base != base:
                raise ValueError("covers block does not rebuild the stored "
                                 "twisted family")
            provenance = (curve, k3)
        return cls(tuple(names), tuple(weights), base,
                   sum(weights), tuple(deformations), provenance)


def twist(e: CurveSpec, k: K3Spec) -> FamilySpec:
    """Combine the two double covers into one quasi-homogeneous hypersurface.

    The curve variables keep their weights times w0, the K3 variables theirs
    times v0, and f + g becomes quasi-homogeneous of degree 2*v0*w0.
    """
    v0, v1, v2 = e.weights
    w0, w1, w2, w3 = k.weights
    if math.gcd(v0, w0) != 1:
        raise ValueError(f"covering weights v0={v0}, w0={w0} share a factor "
                         f"{math.gcd(v0, w0)}; the twist is undefined")
    weights = (w0 * v1, w0 * v2, v0 * w1, v0 * w2, v0 * w3)
    ring = WeightedRing(list(TWISTED_VARS), list(weights))
    base = ring.zero()
    for src, offset in ((e.f, 0), (k.g, 2)):
        for exp, c in src.terms.items():
            full = [0] * 5
            for i, a in enumerate(exp):
                full[offset + i] = a
            base = base + ring.monomial(tuple(full), c.constant_value())
    return FamilySpec(TWISTED_VARS, weights, base, 2 * v0 * w0,
                      provenance=(e, k))


def standard_deformations(fs: FamilySpec) -> FamilySpec:
    """Append the three distinguished deformations: the square of the curve
    coordinates, the square of the K3 coordinates, and the product of all
    five variables."""
    monomials = [
        ("psi", (2, 2, 0, 0, 0)),
        ("phi", (0, 0, 2, 2, 2)),
        ("chi", (1, 1, 1, 1, 1)),
    ]
    return fs.with_deformations(monomials)


def invariant_monomials(fs: FamilySpec, degree: int) -> List[Exponent]:
    """Degree-d monomials in the twisted coordinates that lift to
    deformations invariant under the pair of covering involutions.

    A monomial lifts exactly when its curve-block degree v1*a + v2*b is a
    multiple of v0 (and then the K3 block is automatically a multiple of
    w0): the lift carries matching powers of the two covering coordinates,
    which the composed involution fixes.  At the family degree 2*v0*w0 the
    condition holds for every monomial since gcd(v0, w0) = 1.
    """
    ring = fs.bare_ring()
    out = []
    for e in ring.monomials_of_degree(degree):
        if fs.provenance is not None:
            v0, v1, v2 = fs.provenance[0].weights
            if (v1 * e[0] + v2 * e[1]) % v0 != 0:
                continue
        out.append(e)
    return out


def hodge_numbers(fixed_curves: int, genus_sum: int) -> Tuple[int, int]:
    """Hodge numbers of the resolved involution quotient, from the number N
    of fixed curves and the sum N' of their genera."""
    if fixed_curves < 0 or genus_sum < 0:
        raise ValueError("fixed-locus counts must be nonnegative")
    h11 = 11 + 5 * fixed_curves - genus_sum
    h21 = 11 + 5 * genus_sum - fixed_curves
    if h11 < 0 or h21 < 0:
        raise ValueError(f"invalid fixed-locus data ({fixed_curves}, "
                         f"{genus_sum}): negative Hodge number")
    return h11, h21

"""Pole reduction and operator derivation for hypersurface families.

A cohomology representative is  numerator / (den * Q^pole)  times the
standard volume form.  When the numerator lies in the Jacobian ideal,
numerator = sum P_i * dQ/dx_i, the representative equals
(1/(pole-1)) * sum dP_i/dx_i / (den * Q^(pole-1))  up to an exact form, so
every class has an expression over the standard monomials at each pole
order.  Differentiating under the integral sign with respect to the one
active deformation parameter and re-reducing expresses all derivatives of
the holomorphic representative over one fixed basis; the first linear
dependence among them is the annihilating operator of minimal order.

Every reduction step carries a certificate that is re-expanded and checked,
so a returned operator is backed by exact polynomial identities end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, List, Mapping, Optional, Tuple

from .diffop import DiffOperator, normalize
from .family import FamilySpec
from .groebner import GroebnerBasis, Membership
from .scalars import (
    ExactMatrix,
    Exponent,
    ParamPolynomial,
    Q,
    RationalFunction,
    pp_lcm,
)
from .wpoly import WPolynomial


class ReductionError(ValueError):
    """A pole-reduction step could not be carried out as requested."""


@dataclass(frozen=True)
class RationalForm:
    """numerator / (den * Q^pole) times the volume form.

    The numerator of a pole-order-r representative is quasi-homogeneous of
    weighted degree r*deg(Q) - sum(weights); for a Calabi-Yau hypersurface
    that is (r-1)*deg(Q).  den is a scalar polynomial in the parameters.
    """

    q: WPolynomial
    numerator: WPolynomial
    pole: int
    den: ParamPolynomial

    def __post_init__(self):
        if self.pole < 1:
            raise ValueError("pole order must be at least 1")
        if self.numerator.ring != self.q.ring:
            raise ValueError("numerator and Q live in different rings")
        if self.den.is_zero:
            raise ValueError("denominator is zero")
        if not self.numerator.is_zero:
            if not self.numerator.is_quasi_homogeneous():
                raise ValueError("numerator is not quasi-homogeneous")
            want = self.expected_degree(self.q, self.pole)
            got = self.numerator.weighted_degree()
            if got != want:
                raise ValueError(
                    f"pole-order-{self.pole} numerator has weighted degree "
                    f"{got}, expected {want}")

    @staticmethod
    def expected_degree(q: WPolynomial, pole: int) -> int:
        return pole * q.weighted_degree() - sum(q.ring.weights)

    @classmethod
    def holomorphic(cls, q: WPolynomial) -> "RationalForm":
        """The distinguished representative 1/Q (Calabi-Yau only)."""
        if q.weighted_degree() != sum(q.ring.weights):
            raise ValueError("holomorphic representative needs a Calabi-Yau "
                             "degree")
        one = ParamPolynomial.const(q.ring.params, 1)
        return cls(q=q, numerator=q.ring.const(1), pole=1, den=one)

    def __str__(self):
        den = ""
        if not (self.den.is_constant and self.den.constant_value() == 1):
            den = f"({self.den}) * "
        return f"({self.numerator}) / ({den}Q^{self.pole})"


def jacobian_ideal(fs: FamilySpec,
                   values: Optional[Mapping[str, object]] = None
                   ) -> List[WPolynomial]:
    """Partial derivatives of the family polynomial, one per variable.
    `values` substitutes rationals for a subset of the parameters."""
    q = fs.polynomial()
    if values:
        q = q.specialize_params(dict(values))
    return [q.derivative(v) for v in q.ring.vars]


def restrict_to_parameter(fs: FamilySpec, name: str) -> FamilySpec:
    """The one-parameter subfamily keeping only the named deformation
    (all other deformation parameters set to zero)."""
    kept = tuple(d for d in fs.deformations if d[0] == name)
    if not kept:
        raise ValueError(f"family has no deformation parameter {name!r}")
    return replace(fs, deformations=kept)


def reduce_pole(form: RationalForm,
                gb: GroebnerBasis) -> Tuple[RationalForm, Membership]:
    """One Griffiths step.  Requires the whole numerator to lie in the
    Jacobian ideal; callers holding a general numerator should first split
    off its normal form.  Returns the lower-order form together with the
    membership certificate behind it."""
    if form.pole < 2:
        raise ReductionError("pole order 1 cannot be reduced further")
    if form.numerator.is_zero:
        one = ParamPolynomial.const(form.q.ring.params, 1)
        return (RationalForm(form.q, form.numerator, form.pole - 1, one),
                Membership(cofactors=[], scale=one))
    mem = gb.lift_membership(form.numerator)
    if mem is None:
        raise ReductionError(
            "numerator is not in the Jacobian ideal; split off its normal "
            "form before reducing the pole order")
    ring = form.q.ring
    divergence = ring.zero()
    for cof, v in zip(mem.cofactors, ring.vars):
        if not cof.is_zero:
            divergence = divergence + cof.derivative(v)
    new_den = form.den * mem.scale * Q(form.pole - 1)
    return (RationalForm(form.q, divergence, form.pole - 1, new_den), mem)


# -- derivative cascade over the reduced basis ---------------------------

PolePart = Dict[Exponent, RationalFunction]
Expansion = Dict[int, PolePart]


class ReductionContext:
    """Family with one active parameter, its Jacobian basis, and the fixed
    standard-monomial coordinates at every pole order."""

    def __init__(self, fs: FamilySpec):
        names = fs.parameters()
        if len(names) != 1:
            raise ValueError(
                f"expected exactly one deformation parameter, got {names}")
        self.fs = fs
        self.param = names[0]
        self.ring = fs.ring()
        self.q = fs.polynomial()
        self.degree = fs.degree
        self.generators = [self.q.derivative(v) for v in self.ring.vars]
        self.gb = GroebnerBasis.compute(self.generators)
        if not self.gb.is_zero_dimensional():
            raise ReductionError("Jacobian ideal is not zero-dimensional; "
                                 "the family member is singular")
        # top nonzero graded piece of the quotient
        socle = sum(self.degree - 2 * w for w in self.ring.weights)
        self.max_pole = socle // self.degree + 1
        self._standard: Dict[int, List[Exponent]] = {}
        self._standard_sets: Dict[int, frozenset] = {}
        self.basis: List[Tuple[int, Exponent]] = []
        for r in range(1, self.max_pole + 1):
            mons = self.standard_at(r)
            self.basis.extend((r, e) for e in mons)

    def standard_at(self, pole: int) -> List[Exponent]:
        if pole not in self._standard:
            mons = self.gb.standard_monomials((pole - 1) * self.degree)
            self._standard[pole] = mons
            self._standard_sets[pole] = frozenset(mons)
        return self._standard[pole]

    def is_standard(self, pole: int, e: Exponent) -> bool:
        self.standard_at(pole)
        return e in self._standard_sets[pole]

    def to_vector(self, parts: Expansion) -> List[RationalFunction]:
        zero = RationalFunction.const(self.ring.params, 0)
        out = []
        for r, e in self.basis:
            out.append(parts.get(r, {}).get(e, zero))
        return out

    # -- reduction --------------------------------------------------------

    def normalize_parts(self, raw: Expansion) -> Expansion:
        """Reduce every pole level to standard-monomial support, pushing
        ideal parts down one pole order at a time."""
        pending: Expansion = {r: dict(p) for r, p in raw.items() if p}
        if not pending:
            return {}
        out: Expansion = {}
        for r in range(max(pending), 0, -1):
            cur = pending.pop(r, None)
            if not cur:
                continue
            keep: PolePart = {}
            red: PolePart = {}
            for e, c in cur.items():
                if c.is_zero:
                    continue
                (keep if self.is_standard(r, e) else red)[e] = c
            if red:
                if r == 1:
                    raise ReductionError(
                        "non-constant numerator left at pole order 1")
                self._reduce_level(r, red, keep, pending)
            if keep:
                out[r] = keep
        return out

    def _reduce_level(self, r: int, red: PolePart, keep: PolePart,
                      pending: Expansion):
        one = ParamPolynomial.const(self.ring.params, 1)
        den = one
        for c in red.values():
            if not c.den.is_constant:
                den = c.den if den.is_constant else pp_lcm(den, c.den)
        terms = {}
        for e, c in red.items():
            extra = den if c.den.is_constant else den.exact_div(c.den)
            terms[e] = c.num * extra if not extra.is_constant else \
                c.num * extra.constant_value()
        numerator = WPolynomial(self.ring, terms)
        cert = self.gb.certified_split(numerator)
        # scale * N = sum cof_i g_i + rfac * R, hence over den * Q^r:
        #   N/(den Q^r) = R/((scale/rfac) den Q^r)
        #                 + (1/(r-1)) sum dcof_i/dx_i / (scale den Q^(r-1))
        reduction_scale = cert.scale.exact_div(cert.remainder_factor)
        res_den = reduction_scale * den
        for e, c in cert.remainder.terms.items():
            add = RationalFunction(c, res_den)
            prev = keep.get(e)
            s = add if prev is None else prev + add
            if s.is_zero:
                keep.pop(e, None)
            else:
                keep[e] = s
        divergence = self.ring.zero()
        for cof, v in zip(cert.cofactors, self.ring.vars):
            if not cof.is_zero:
                divergence = divergence + cof.derivative(v)
        if divergence.is_zero:
            return
        down_den = cert.scale * den * Q(r - 1)
        target = pending.setdefault(r - 1, {})
        for e, c in divergence.terms.items():
            add = RationalFunction(c, down_den)
            prev = target.get(e)
            s = add if prev is None else prev + add
            if s.is_zero:
                target.pop(e, None)
            else:
                target[e] = s

    def parameter_derivative(self, parts: Expansion) -> Expansion:
        """d/d(param) of sum_r numerator_r / Q^r, re-reduced."""
        shift = self.fs.deformations[0][1]
        raw: Expansion = {}
        for r, pp in parts.items():
            for e, c in pp.items():
                dc = c.derivative(self.param)
                if not dc.is_zero:
                    level = raw.setdefault(r, {})
                    prev = level.get(e)
                    s = dc if prev is None else prev + dc
                    if s.is_zero:
                        level.pop(e, None)
                    else:
                        level[e] = s
                moved = tuple(a + b for a, b in zip(e, shift))
                level = raw.setdefault(r + 1, {})
                add = c * Q(-r)
                prev = level.get(moved)
                s = add if prev is None else prev + add
                if s.is_zero:
                    level.pop(moved, None)
                else:
                    level[moved] = s
        return self.normalize_parts(raw)

    def holomorphic_parts(self) -> Expansion:
        one = RationalFunction.const(self.ring.params, 1)
        zero_exp = (0,) * len(self.ring.vars)
        return {1: {zero_exp: one}}


def derive_pf_1param(fs: FamilySpec, max_order: int = 12,
                     progress=None) -> DiffOperator:
    """Minimal-order operator in the single deformation parameter that
    annihilates the periods of the holomorphic representative.

    Raises ReductionError when no linear dependence shows up through
    max_order; the caller decides how to proceed, nothing is fabricated.
    """
    ctx = ReductionContext(fs)
    parts = ctx.holomorphic_parts()
    vectors = [ctx.to_vector(parts)]
    for order in range(1, max_order + 1):
        parts = ctx.parameter_derivative(parts)
        vectors.append(ctx.to_vector(parts))
        if progress is not None:
            progress(order)
        matrix = ExactMatrix(ctx.ring.params,
                             [[vec[i] for vec in vectors]
                              for i in range(len(ctx.basis))])
        if matrix.rank() <= order:
            kernel = matrix.nullspace()
            if not kernel:
                raise AssertionError("rank drop without a kernel vector")
            coeffs = kernel[0]
            if coeffs[-1].is_zero:
                raise AssertionError(
                    "kernel vector does not involve the top derivative")
            terms = {(j,): c for j, c in enumerate(coeffs) if not c.is_zero}
            op = DiffOperator((ctx.param,), terms)
            return normalize(op)
    raise ReductionError(
        f"derivatives up to order {max_order} stay linearly independent; "
        f"no annihilating operator found in that range")

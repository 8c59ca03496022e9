"""Groebner bases over Q(parameters) with exact polynomial identities.

Basis elements are polynomials over Q[parameters].  Reduction runs over the
fraction field Q(parameters) with gcd-reduced coefficients (every
intermediate at its true size), then clears the single common denominator,
so every identity produced here is an exact polynomial identity:

    scale * p  =  sum_j combination_j * basis_j  +  remainder

With witnesses=True each basis element additionally stores an expression
over the original generators (scale_j * basis_j = sum_i cofactor_ji *
generator_i), which makes exact ideal-membership certificates possible;
verify() checks the witnesses by re-expansion and all S-polynomials by
reduction.  Witness composition multiplies cofactor polynomials through
every birth, which is much costlier than the basis itself for ideals with
several parameters; witnesses=False skips it and still yields the same
reduced basis and normal forms.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from .scalars import (
    Exponent,
    ParamPolynomial,
    RationalFunction,
    pp_gcd_many,
    pp_lcm,
    q_gcd,
)
from .wpoly import WeightedRing, WPolynomial


def wp_primitive(p: WPolynomial) -> Tuple[ParamPolynomial, WPolynomial]:
    """Split p = content * primitive: content is a scalar polynomial (with
    rational factor and sign), primitive has coprime coefficients and a
    leading coefficient whose leading rational is positive."""
    if p.is_zero:
        return ParamPolynomial.zero(p.ring.params), p
    c = p.coeff_content()
    if c != 1:
        p = p * (1 / c)
    g = pp_gcd_many(list(p.terms.values()))
    if g is not None and not g.is_constant:
        p = WPolynomial(p.ring, {e: v.exact_div(g) for e, v in p.terms.items()},
                        _trust=True)
    else:
        g = ParamPolynomial.const(p.ring.params, 1)
    lead = p.leading_coeff()
    sign = 1 if lead.terms[lead.leading_exponent()] > 0 else -1
    if sign < 0:
        p = -p
    return g * (sign * c), p


def _divides(a: Exponent, b: Exponent) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _exp_lcm(a: Exponent, b: Exponent) -> Exponent:
    return tuple(max(x, y) for x, y in zip(a, b))


def _exp_sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x - y for x, y in zip(a, b))


@dataclass
class NormalForm:
    """scale * p = sum(combination[j] * basis[j]) + remainder."""

    remainder: WPolynomial
    scale: ParamPolynomial
    combination: Optional[List[WPolynomial]] = None

    @property
    def is_zero(self) -> bool:
        return self.remainder.is_zero

    def rational_coefficients(self) -> Dict[Exponent, RationalFunction]:
        """Remainder coefficients divided by the scale, as rational functions."""
        return {e: RationalFunction(c, self.scale)
                for e, c in self.remainder.terms.items()}


@dataclass
class Membership:
    """scale * p = sum(cofactors[i] * generators[i]), re-expansion checked."""

    cofactors: List[WPolynomial]
    scale: ParamPolynomial


@dataclass
class SplitCertificate:
    """scale * p = sum(cofactors[i] * generators[i])
                   + remainder_factor * remainder,
    where scale = remainder_factor * (reduction scale)."""

    remainder: WPolynomial
    remainder_factor: ParamPolynomial
    scale: ParamPolynomial
    cofactors: List[WPolynomial]


class GroebnerBasis:
    """Reduced Groebner basis, optionally with generator witnesses.

    elements are primitive, pairwise tail-reduced, sorted by ascending
    leading monomial.  reps[j] = (scale_j, cofactors_j) with
    scale_j * elements[j] = sum_i cofactors_j[i] * generators[i],
    or None if the basis was computed with witnesses=False.
    """

    def __init__(self, ring: WeightedRing, generators: List[WPolynomial],
                 elements: List[WPolynomial],
                 reps: Optional[List[Tuple[ParamPolynomial, List[WPolynomial]]]]):
        self.ring = ring
        self.generators = generators
        self.elements = elements
        self.reps = reps
        self._lms = [g.leading_exponent() for g in elements]
        self._lcs = [g.leading_coeff() for g in elements]

    # -- construction ---------------------------------------------------

    @classmethod
    def compute(cls, generators: Sequence[WPolynomial],
                witnesses: bool = True, progress=None) -> "GroebnerBasis":
        gens = list(generators)
        if not gens:
            raise ValueError("no generators")
        ring = gens[0].ring
        for g in gens:
            if g.ring != ring:
                raise ValueError("mixed rings")

        basis: List[WPolynomial] = []
        reps: Optional[List[Tuple[ParamPolynomial, List[WPolynomial]]]] = \
            [] if witnesses else None

        def unit_cofactors(i: int, coeff: WPolynomial) -> List[WPolynomial]:
            out = [ring.zero()] * len(gens)
            out[i] = coeff
            return out

        for i, g in enumerate(gens):
            if g.is_zero:
                continue
            content, prim = wp_primitive(g)
            # content * prim = g
            basis.append(prim)
            if witnesses:
                reps.append((content, unit_cofactors(i, ring.const(1))))

        pairs: List[Tuple] = []  # heap of (wdeg, order_key, i, j)
        done = set()

        def push_pairs(j: int):
            lmj = basis[j].leading_exponent()
            for i in range(j):
                lmi = basis[i].leading_exponent()
                lcm = _exp_lcm(lmi, lmj)
                if lcm == tuple(a + b for a, b in zip(lmi, lmj)):
                    done.add((i, j))  # coprime leading monomials: S-poly reduces
                    continue
                heapq.heappush(pairs, (ring.weighted_degree(lcm),
                                       ring.order_key(lcm), i, j))

        for j in range(len(basis)):
            push_pairs(j)

        processed = 0
        while pairs:
            _, _, i, j = heapq.heappop(pairs)
            if (i, j) in done:
                continue
            done.add((i, j))
            processed += 1
            if progress is not None and processed % 25 == 0:
                progress(processed, len(basis), len(pairs))
            lmi, lmj = basis[i].leading_exponent(), basis[j].leading_exponent()
            lcm = _exp_lcm(lmi, lmj)
            if _chain_criterion(basis, i, j, lcm, done):
                continue
            spair = _spoly(basis[i], basis[j], lmi, lmj, lcm)
            nf = _reduce(spair, basis, ring, track=witnesses)
            if nf.remainder.is_zero:
                continue
            content, prim = wp_primitive(nf.remainder)
            if witnesses:
                # remainder = scale*spair - sum(combination), a basis combination
                combo: Dict[int, WPolynomial] = {}
                mi = ring.monomial(_exp_sub(lcm, lmi), basis[j].leading_coeff())
                mj = ring.monomial(_exp_sub(lcm, lmj), basis[i].leading_coeff())
                combo[i] = mi * nf.scale
                combo[j] = combo.get(j, ring.zero()) - mj * nf.scale
                for k, b in enumerate(nf.combination):
                    if not b.is_zero:
                        combo[k] = combo.get(k, ring.zero()) - b
                reps.append(_compose(combo, content, reps, ring, len(gens)))
            basis.append(prim)
            push_pairs(len(basis) - 1)

        basis, reps = _minimalize(basis, reps, ring)
        basis, reps = _interreduce(basis, reps, ring, len(gens))
        order = sorted(range(len(basis)),
                       key=lambda k: ring.order_key(basis[k].leading_exponent()))
        basis = [basis[k] for k in order]
        if reps is not None:
            reps = [reps[k] for k in order]
        return cls(ring, gens, basis, reps)

    # -- queries ---------------------------------------------------------

    def leading_exponents(self) -> List[Exponent]:
        return list(self._lms)

    def normal_form(self, p: WPolynomial,
                    with_combination: bool = False) -> NormalForm:
        if p.ring != self.ring:
            raise ValueError("wrong ring")
        return _reduce(p, self.elements, self.ring, track=with_combination)

    def reduces_to_zero(self, p: WPolynomial) -> bool:
        return self.normal_form(p).remainder.is_zero

    def lift_membership(self, p: WPolynomial) -> Optional[Membership]:
        """Exact certificate scale*p = sum cofactor_i * generator_i, or None
        if p is not in the ideal.  The identity is re-expanded and checked."""
        if self.reps is None:
            raise ValueError(
                "basis was computed with witnesses=False; membership "
                "certificates over the original generators are unavailable")
        nf = self.normal_form(p, with_combination=True)
        if not nf.remainder.is_zero:
            return None
        combo = {j: b for j, b in enumerate(nf.combination) if not b.is_zero}
        scale, cof = _compose(combo, nf.scale, self.reps, self.ring,
                              len(self.generators))
        lhs = p * scale
        rhs = self.ring.zero()
        for c, f in zip(cof, self.generators):
            if not c.is_zero:
                rhs = rhs + c * f
        if lhs != rhs:
            raise AssertionError("membership witness failed re-expansion")
        return Membership(cofactors=cof, scale=scale)

    def certified_split(self, p: WPolynomial) -> "SplitCertificate":
        """One-pass split  scale * p = sum cofactors_i * generator_i +
        remainder_factor * remainder  with the remainder fully reduced.
        The identity is re-expanded and checked before returning."""
        if self.reps is None:
            raise ValueError(
                "basis was computed with witnesses=False; membership "
                "certificates over the original generators are unavailable")
        nf = self.normal_form(p, with_combination=True)
        used = [j for j, c in enumerate(nf.combination) if not c.is_zero]
        M = ParamPolynomial.const(self.ring.params, 1)
        for j in used:
            _, mp = self.reps[j][0].primitive()
            if not mp.is_constant:
                M = mp if M.is_constant else pp_lcm(M, mp)
        ngens = len(self.generators)
        cof = [self.ring.zero()] * ngens
        for j in used:
            mu, D = self.reps[j]
            cjf = nf.combination[j] * _scalar_quotient(M, mu)
            for i in range(ngens):
                if not D[i].is_zero:
                    cof[i] = cof[i] + cjf * D[i]
        scale = M * nf.scale
        lhs = p * scale
        rhs = nf.remainder * M
        for c, f in zip(cof, self.generators):
            if not c.is_zero:
                rhs = rhs + c * f
        if lhs != rhs:
            raise AssertionError("split certificate failed re-expansion")
        return SplitCertificate(remainder=nf.remainder, remainder_factor=M,
                                scale=scale, cofactors=cof)

    def standard_monomials(self, degree: int) -> List[Exponent]:
        """Monomials of the weighted degree outside the leading-term ideal,
        descending in the ring order."""
        out = []
        for e in self.ring.monomials_of_degree(degree):
            if not any(_divides(lm, e) for lm in self._lms):
                out.append(e)
        return out

    def is_zero_dimensional(self) -> bool:
        n = len(self.ring.vars)
        for i in range(n):
            if not any(all(lm[k] == 0 for k in range(n) if k != i)
                       for lm in self._lms):
                return False
        return True

    def vector_space_dimension(self) -> int:
        """Dimension of the quotient as a Q(params)-vector space."""
        if not self.is_zero_dimensional():
            raise ValueError("quotient is not finite dimensional")
        n = len(self.ring.vars)
        bounds = []
        for i in range(n):
            b = min(lm[i] for lm in self._lms
                    if all(lm[k] == 0 for k in range(n) if k != i))
            bounds.append(b)
        count = 0
        stack = [(0, [])]
        while stack:
            i, prefix = stack.pop()
            if i == n:
                e = tuple(prefix)
                if not any(_divides(lm, e) for lm in self._lms):
                    count += 1
                continue
            for v in range(bounds[i]):
                stack.append((i + 1, prefix + [v]))
        return count

    def verify(self) -> bool:
        """Re-expand every witness (when tracked), reduce every generator
        and S-polynomial."""
        if self.reps is not None:
            for g, (scale, cof) in zip(self.elements, self.reps):
                rhs = self.ring.zero()
                for c, f in zip(cof, self.generators):
                    if not c.is_zero:
                        rhs = rhs + c * f
                if g * scale != rhs:
                    return False
        for f in self.generators:
            if not self.reduces_to_zero(f):
                return False
        for j in range(len(self.elements)):
            for i in range(j):
                lmi = self._lms[i]
                lmj = self._lms[j]
                sp = _spoly(self.elements[i], self.elements[j], lmi, lmj,
                            _exp_lcm(lmi, lmj))
                if not self.reduces_to_zero(sp):
                    return False
        return True


# -- internals ------------------------------------------------------------


def _spoly(gi: WPolynomial, gj: WPolynomial, lmi: Exponent, lmj: Exponent,
           lcm: Exponent) -> WPolynomial:
    ring = gi.ring
    mi = ring.monomial(_exp_sub(lcm, lmi), gj.leading_coeff())
    mj = ring.monomial(_exp_sub(lcm, lmj), gi.leading_coeff())
    return mi * gi - mj * gj


def _chain_criterion(basis, i, j, lcm, done) -> bool:
    for k in range(len(basis)):
        if k == i or k == j:
            continue
        if not _divides(basis[k].leading_exponent(), lcm):
            continue
        a = (min(i, k), max(i, k))
        b = (min(j, k), max(j, k))
        if a in done and b in done:
            return True
    return False


def _reduce(p: WPolynomial, basis: List[WPolynomial], ring: WeightedRing,
            track: bool) -> NormalForm:
    """Full reduction over the fraction field, cleared back to polynomials.

    Working coefficients are gcd-reduced rational functions, so every
    intermediate stays at its true size; only the reducer's tail terms are
    touched per step (no global rescaling).  The single common denominator
    collected at the end becomes the returned scale.
    """
    lms = [g.leading_exponent() for g in basis]
    lcs = [RationalFunction.from_poly(g.leading_coeff()) for g in basis]
    work: Dict[Exponent, RationalFunction] = {
        e: RationalFunction.from_poly(c) for e, c in p.terms.items()}
    rem: Dict[Exponent, RationalFunction] = {}
    combo: Optional[List[Dict[Exponent, RationalFunction]]] = \
        [{} for _ in basis] if track else None
    key = ring.order_key
    while work:
        e = max(work, key=key)
        c = work.pop(e)
        j = next((k for k, lm in enumerate(lms) if _divides(lm, e)), None)
        if j is None:
            rem[e] = c
            continue
        mono = _exp_sub(e, lms[j])
        factor = c / lcs[j]
        if track:
            cj = combo[j]
            prev = cj.get(mono)
            s = factor if prev is None else prev + factor
            if s.is_zero:
                cj.pop(mono, None)
            else:
                cj[mono] = s
        lmj = lms[j]
        for ge, gc in basis[j].terms.items():
            if ge == lmj:
                continue
            t = tuple(a + b for a, b in zip(mono, ge))
            prev = work.get(t)
            d = factor * gc
            s = -d if prev is None else prev - d
            if s.is_zero:
                work.pop(t, None)
            else:
                work[t] = s
    # clear denominators: one scalar multiplies p, everything else is poly
    scale = ParamPolynomial.const(ring.params, 1)
    rf_pools = [rem.values()]
    if track:
        rf_pools.extend(c.values() for c in combo)
    for pool in rf_pools:
        for rf in pool:
            if not rf.den.is_constant:
                scale = rf.den if scale.is_constant else pp_lcm(scale, rf.den)

    def cleared(d: Dict[Exponent, RationalFunction]) -> WPolynomial:
        terms = {}
        for e, rf in d.items():
            num = rf.num if rf.den.is_constant else \
                rf.num * scale.exact_div(rf.den)
            if rf.den.is_constant:
                num = num * scale
            terms[e] = num
        return WPolynomial(ring, terms, _trust=True)

    remainder = cleared(rem)
    combination = [cleared(c) for c in combo] if track else None
    return NormalForm(remainder=remainder, scale=scale, combination=combination)


def _compose(combo: Dict[int, WPolynomial], lhs_scale: ParamPolynomial,
             reps: List[Tuple[ParamPolynomial, List[WPolynomial]]],
             ring: WeightedRing, ngens: int):
    """Turn lhs_scale * target = sum combo_j * basis_j into a witness over
    the original generators: returns (scale, cofactors) with
    scale * target = sum cofactors_i * generator_i.

    Multiplying by M = lcm of the primitive parts of the element scales
    clears every per-element denominator exactly (rational factors are
    units and handled by division).
    """
    used = [j for j, c in combo.items() if not c.is_zero]
    M = ParamPolynomial.const(ring.params, 1)
    for j in used:
        _, mp = reps[j][0].primitive()
        if mp.is_constant:
            continue
        M = mp if M.is_constant else pp_lcm(M, mp)
    cof = [ring.zero()] * ngens
    for j in used:
        mu, D = reps[j]
        cjf = combo[j] * _scalar_quotient(M, mu)
        for i in range(ngens):
            if not D[i].is_zero:
                cof[i] = cof[i] + cjf * D[i]
    scale = M * lhs_scale
    return _normalise_witness(scale, cof, ring)


def _scalar_quotient(M: ParamPolynomial, mu: ParamPolynomial) -> ParamPolynomial:
    """Exact M/mu given that the primitive part of mu divides M."""
    mc, mp = mu.primitive()
    out = M.exact_div(mp) if not mp.is_constant else M
    return out * (1 / mc) if mc != 1 else out


def _normalise_witness(scale: ParamPolynomial, cof: List[WPolynomial],
                       ring: WeightedRing):
    c = scale.content()
    for p in cof:
        if not p.is_zero:
            c = q_gcd(c, p.coeff_content())
    polys = [scale] + [v for p in cof for v in p.terms.values()]
    g = pp_gcd_many([q for q in polys if not q.is_zero])
    divisor = g if g is not None and not g.is_constant else None
    if c != 1 or divisor is not None:
        def shrink(p: ParamPolynomial) -> ParamPolynomial:
            if p.is_zero:
                return p
            if divisor is not None:
                p = p.exact_div(divisor)
            return p * (1 / c) if c != 1 else p

        scale = shrink(scale)
        cof = [WPolynomial(ring, {e: shrink(v) for e, v in p.terms.items()},
                           _trust=True) for p in cof]
    if scale.terms[scale.leading_exponent()] < 0:
        scale = -scale
        cof = [-p for p in cof]
    return scale, cof


def _minimalize(basis, reps, ring):
    keep = []
    lms = [g.leading_exponent() for g in basis]
    for i, lm in enumerate(lms):
        redundant = False
        for j, other in enumerate(lms):
            if i == j:
                continue
            if _divides(other, lm):
                if other != lm or j < i:
                    redundant = True
                    break
        if not redundant:
            keep.append(i)
    return ([basis[i] for i in keep],
            [reps[i] for i in keep] if reps is not None else None)


def _interreduce(basis, reps, ring, ngens):
    """Tail-reduce each element against the others, keeping witnesses."""
    track = reps is not None
    out = list(basis)
    out_reps = list(reps) if track else None
    for i in range(len(out)):
        others = out[:i] + out[i + 1:]
        idx_map = list(range(i)) + list(range(i + 1, len(out)))
        nf = _reduce(out[i], others, ring, track=track)
        if nf.remainder == out[i]:
            continue
        content, prim = wp_primitive(nf.remainder)
        if track:
            # nf.scale * out[i] = sum combo_j * others_j + remainder
            combo: Dict[int, WPolynomial] = {i: ring.const(nf.scale)}
            for k, b in enumerate(nf.combination):
                if not b.is_zero:
                    j = idx_map[k]
                    combo[j] = combo.get(j, ring.zero()) - b
            out_reps[i] = _compose(combo, content, out_reps, ring, ngens)
        out[i] = prim
    return out, out_reps

"""Linear differential operators in the deformation parameters.

An operator is a finite sum  sum_k  c_k(params) * D^k  where k is a
derivative multi-index over the ordered parameter tuple and each c_k is an
exact polynomial.  Operators act term by term on series whose exponents live
in a rational lattice: D_t maps the coefficient at exponent e to e_t * c at
exponent e - 1_t, and multiplication by a parameter shifts the exponent up.

The Euler rewrite expresses the same operator through the commuting symbols
theta_t = t * D_t plus pure shift factors, which is the form used for
term-wise coefficient comparisons: t^j D^k = t^(j-k) * theta(theta-1)...
(theta-k+1) when j >= k, and a falling factorial times a pure D power
otherwise.  Both presentations act identically; the action code keeps a
single convention (multiplier evaluated at the output exponent).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product as _iproduct
from math import comb
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .scalars import (
    Exponent,
    ParamPolynomial,
    Q,
    QONE,
    q_gcd,
    pp_gcd_many,
)

DerivIndex = Tuple[int, ...]


def _falling(theta: ParamPolynomial, length: int,
             offset: int = 0) -> ParamPolynomial:
    """(theta+offset)(theta+offset-1)...(theta+offset-length+1)."""
    params = theta.params
    out = ParamPolynomial.const(params, 1)
    for i in range(length):
        out = out * (theta + ParamPolynomial.const(params, offset - i))
    return out


@dataclass(frozen=True)
class DiffOperator:
    """sum over derivative multi-indices of polynomial-coefficient terms."""

    params: Tuple[str, ...]
    terms: Dict[DerivIndex, ParamPolynomial]

    def __post_init__(self):
        n = len(self.params)
        for k, c in self.terms.items():
            if len(k) != n or any(a < 0 for a in k):
                raise ValueError(f"bad derivative index {k}")
            if c.is_zero:
                raise ValueError(f"zero coefficient stored at {k}")
            if tuple(c.params) != self.params:
                raise ValueError("coefficient parameter mismatch")

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_text(cls, params: Sequence[str],
                  terms: Mapping[DerivIndex, str]) -> "DiffOperator":
        ps = tuple(params)
        built = {tuple(k): ParamPolynomial.parse(text, ps)
                 for k, text in terms.items()}
        return cls(ps, {k: c for k, c in built.items() if not c.is_zero})

    @classmethod
    def zero(cls, params: Sequence[str]) -> "DiffOperator":
        return cls(tuple(params), {})

    # -- structure --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        if not self.terms:
            return 0
        return max(sum(k) for k in self.terms)

    def derivative_orders(self) -> List[DerivIndex]:
        return sorted(self.terms, key=lambda k: (sum(k), k))

    def coefficient(self, k: DerivIndex) -> ParamPolynomial:
        zero = ParamPolynomial.zero(self.params)
        return self.terms.get(tuple(k), zero)

    # -- algebra ----------------------------------------------------------

    def __add__(self, other: "DiffOperator") -> "DiffOperator":
        if self.params != other.params:
            raise ValueError("parameter mismatch")
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k)
            s = c if s is None else s + c
            if s.is_zero:
                terms.pop(k, None)
            else:
                terms[k] = s
        return DiffOperator(self.params, terms)

    def __neg__(self) -> "DiffOperator":
        return DiffOperator(self.params, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "DiffOperator") -> "DiffOperator":
        return self + (-other)

    def scaled(self, factor) -> "DiffOperator":
        c = factor if isinstance(factor, ParamPolynomial) else \
            ParamPolynomial.const(self.params, factor)
        if c.is_zero:
            return DiffOperator.zero(self.params)
        return DiffOperator(self.params,
                            {k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __hash__(self):
        return hash((self.params,
                     frozenset((k, hash(c)) for k, c in self.terms.items())))

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for k in sorted(self.terms, key=lambda k: (sum(k), k), reverse=True):
            c = self.terms[k]
            dpart = "*".join(
                f"d_{p}" if e == 1 else f"d_{p}^{e}"
                for p, e in zip(self.params, k) if e)
            cpart = str(c) if len(c.terms) == 1 else f"({c})"
            bits.append(f"{cpart}*{dpart}" if dpart else cpart)
        return " + ".join(bits)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        entries = []
        for k in self.derivative_orders():
            derivs = {p: e for p, e in zip(self.params, k) if e}
            entries.append({"coeff": str(self.terms[k]), "derivs": derivs})
        return json.dumps({"parameters": list(self.params),
                           "terms": entries}, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "DiffOperator":
        doc = json.loads(text)
        params = tuple(doc["parameters"])
        terms: Dict[DerivIndex, str] = {}
        for entry in doc["terms"]:
            k = tuple(int(entry["derivs"].get(p, 0)) for p in params)
            if k in terms:
                raise ValueError(f"duplicate derivative index {k}")
            terms[k] = entry["coeff"]
        return cls.from_text(params, terms)


def normalize(op: DiffOperator) -> DiffOperator:
    """Divide out the common content and fix the sign so that the leading
    term (highest derivative order, then lexicographic) has a positive
    leading coefficient.  Scalar multiples share one normal form."""
    if op.is_zero:
        return op
    coeffs = list(op.terms.values())
    c = Q(0)
    for p in coeffs:
        c = q_gcd(c, p.content())
    g = pp_gcd_many(coeffs)
    divisor = g if g is not None and not g.is_constant else None

    def shrink(p: ParamPolynomial) -> ParamPolynomial:
        if divisor is not None:
            p = p.exact_div(divisor)
        return p * (1 / c) if c != 1 else p

    terms = {k: shrink(v) for k, v in op.terms.items()}
    lead = terms[max(terms, key=lambda k: (sum(k), k))]
    if lead.terms[lead.leading_exponent()] < 0:
        terms = {k: -v for k, v in terms.items()}
    return DiffOperator(op.params, terms)


def proportional(a: DiffOperator, b: DiffOperator) -> bool:
    """True when a and b agree up to a scalar in Q(params)."""
    return normalize(a) == normalize(b)


@dataclass(frozen=True)
class EulerForm:
    """Operator as  sum over net exponent shifts s of  P_s(theta) * (shift s).

    P_s is a polynomial in the commuting symbols theta_t; the action takes
    the input coefficient at exponent o - s, multiplies by P_s evaluated at
    the output exponent o, and adds it at o.  This matches t^j D^k acting on
    a power t^e as e(e-1)...(e-k+1) t^(e+j-k) exactly.
    """

    params: Tuple[str, ...]
    terms: Dict[Tuple[int, ...], ParamPolynomial]

    def shifts(self) -> List[Tuple[int, ...]]:
        return sorted(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for s in self.shifts():
            p = self.terms[s]
            shift = ",".join(f"{name}{'+' if v > 0 else ''}{v}"
                             for name, v in zip(self.params, s) if v)
            tag = f"[{shift}]" if shift else "[0]"
            bits.append(f"({p}){tag}")
        return " + ".join(bits)


def euler_rewrite(op: DiffOperator) -> EulerForm:
    """Rewrite every monomial t^j D^k through theta = t*D.

    Per parameter: j >= k gives t^(j-k) theta(theta-1)...(theta-k+1); j < k
    leaves k-j pure derivative factors.  In the output-exponent convention
    both cases read  shift s = j-k,  multiplier FALL(theta - s, k).
    """
    params = op.params
    out: Dict[Tuple[int, ...], ParamPolynomial] = {}
    for k, c in op.terms.items():
        for j, value in c.terms.items():
            s = tuple(jj - kk for jj, kk in zip(j, k))
            p = ParamPolynomial.const(params, value)
            for t, name in enumerate(params):
                theta = ParamPolynomial.var(params, name)
                p = p * _falling(theta, k[t], offset=-s[t])
            if p.is_zero:
                continue
            prev = out.get(s)
            total = p if prev is None else prev + p
            if total.is_zero:
                out.pop(s, None)
            else:
                out[s] = total
    return EulerForm(params, out)


def from_euler(ef: EulerForm) -> DiffOperator:
    """Rebuild a polynomial-coefficient operator from an Euler form.

    Each shift term P_s(theta) re-expands over falling factorials anchored
    at the shift, P_s(theta) = sum_k c_k * FALL(theta - s, k), via exact
    forward differences; the piece c_k goes to c_k * t^(s+k) D^k.  Negative
    exponents are cleared afterwards by one global monomial factor, so the
    result acts as t^delta composed with the input form (same kernel).
    """
    params = ef.params
    n = len(params)
    pieces: Dict[DerivIndex, Dict[Tuple[int, ...], object]] = {}
    for s, p in ef.terms.items():
        degs = [p.degree_in(name) for name in params]
        values: Dict[Tuple[int, ...], object] = {}
        for i in _iproduct(*(range(d + 1) for d in degs)):
            point = {name: s[t] + i[t] for t, name in enumerate(params)}
            values[i] = p.subs(point)
        for k in _iproduct(*(range(d + 1) for d in degs)):
            c = Q(0)
            for i in _iproduct(*(range(kt + 1) for kt in k)):
                w = Q(1)
                for t in range(n):
                    w = w * ((-1) ** (k[t] - i[t]) * comb(k[t], i[t]))
                c = c + w * values[i]
            for t in range(n):
                for f in range(2, k[t] + 1):
                    c = c / f
            if c == 0:
                continue
            j = tuple(s[t] + k[t] for t in range(n))
            slot = pieces.setdefault(k, {})
            slot[j] = slot.get(j, Q(0)) + c
    delta = [0] * n
    for slot in pieces.values():
        for j in slot:
            for t in range(n):
                delta[t] = max(delta[t], -j[t])
    terms: Dict[DerivIndex, ParamPolynomial] = {}
    for k, slot in pieces.items():
        shifted = {tuple(jt + d for jt, d in zip(j, delta)): c
                   for j, c in slot.items() if c != 0}
        if shifted:
            terms[k] = ParamPolynomial(params, shifted)
    return DiffOperator(params, terms)


def _linear_sub(p: ParamPolynomial, name: str, alpha, beta) -> ParamPolynomial:
    """Substitute name -> alpha*name + beta (alpha, beta rational)."""
    params = p.params
    pos = params.index(name)
    lin = ParamPolynomial.var(params, name) * alpha + \
        ParamPolynomial.const(params, beta)
    out = ParamPolynomial.zero(params)
    for e, c in p.terms.items():
        rest = tuple(v if t != pos else 0 for t, v in enumerate(e))
        piece = ParamPolynomial(params, {rest: c})
        for _ in range(e[pos]):
            piece = piece * lin
        out = out + piece
    return out


def pullback_1param(op: DiffOperator, scale, power: int, gauge: int,
                    out_param: str) -> DiffOperator:
    """Transport a one-parameter operator through x = scale * t^power with
    solutions regraded by t^gauge.

    On graded pieces theta_x = (theta_t - gauge)/power, and a shift by s in
    x is a shift by power*s in t; an Euler term P_s picks up scale^s.  The
    result annihilates t^gauge * f(scale * t^power) whenever op kills f.
    Negative powers are allowed; power = -1 reads a descending series in x
    as an ascending series in t = 1/x.
    """
    if len(op.params) != 1:
        raise ValueError("pullback is defined for one-parameter operators")
    if power == 0:
        raise ValueError("power must be a nonzero integer")
    ef = euler_rewrite(op)
    lam = Q(scale)
    if lam == 0:
        raise ValueError("scale must be nonzero")
    terms: Dict[Tuple[int, ...], ParamPolynomial] = {}
    name = op.params[0]
    for (s,), p in ef.terms.items():
        factor = lam ** s if s >= 0 else (QONE / lam) ** (-s)
        q = _linear_sub(p, name, Q(1, power), Q(-gauge, power)) * factor
        rebased = ParamPolynomial(
            (out_param,), {e: c for e, c in q.terms.items()})
        terms[(power * s,)] = rebased
    return from_euler(EulerForm((out_param,), terms))


def _term_action(k: DerivIndex, j: Exponent, value,
                 exponent: Tuple) -> Tuple[Tuple, object]:
    """One monomial value * t^j D^k acting on a single series exponent:
    returns (new exponent, multiplier)."""
    mult = Q(value) if not hasattr(value, "numerator") else value
    new = []
    for t in range(len(k)):
        e = exponent[t]
        for i in range(k[t]):
            mult = mult * (e - i)
        new.append(e + j[t] - k[t])
    return tuple(new), mult


def op_shift_bounds(op: DiffOperator) -> Tuple[int, ...]:
    """Most negative net exponent shift per parameter over all operator
    monomials (0 when the operator never lowers that exponent)."""
    n = len(op.params)
    lo = [0] * n
    for k, c in op.terms.items():
        for j in c.terms:
            for t in range(n):
                lo[t] = min(lo[t], j[t] - k[t])
    return tuple(lo)


def apply(op: DiffOperator, series):
    """Act on an indexed series exactly, component by component.

    Derivatives multiply by exact (possibly fractional) exponents; exponent
    denominators never change.  The result's valid region shrinks by the
    operator's most negative per-parameter shift.
    """
    if not set(op.params) <= set(series.params):
        raise ValueError(f"operator parameters {op.params} not a subset of "
                         f"series parameters {series.params}")
    pos = [series.params.index(p) for p in op.params]
    shrink = op_shift_bounds(op)
    new_bounds = list(series.bounds)
    for t, s in zip(pos, shrink):
        new_bounds[t] = series.bounds[t] + s
    components = {}
    for label, terms in series.components.items():
        out: Dict[Tuple, object] = {}
        for e, coeff in terms.items():
            for k, c in op.terms.items():
                for j, value in c.terms.items():
                    sub = tuple(e[t] for t in pos)
                    moved, mult = _term_action(k, j, value, sub)
                    if mult == 0:
                        continue
                    ne = list(e)
                    for t, v in zip(pos, moved):
                        ne[t] = v
                    ne = tuple(ne)
                    prev = out.get(ne)
                    s = coeff * mult if prev is None else prev + coeff * mult
                    if s == 0:
                        out.pop(ne, None)
                    else:
                        out[ne] = s
        components[label] = out
    return series.replace(components=components, bounds=tuple(new_bounds))


def apply_euler(ef: EulerForm, series):
    """Action of an Euler form; agrees with apply() on the common region."""
    pos = [series.params.index(p) for p in ef.params]
    lo = [0] * len(ef.params)
    for s in ef.terms:
        for t in range(len(s)):
            lo[t] = min(lo[t], s[t])
    new_bounds = list(series.bounds)
    for t, s in zip(pos, lo):
        new_bounds[t] = series.bounds[t] + s
    components = {}
    for label, terms in series.components.items():
        out: Dict[Tuple, object] = {}
        for e, coeff in terms.items():
            for s, p in ef.terms.items():
                ne = list(e)
                for t, v in zip(pos, s):
                    ne[t] = ne[t] + v
                ne = tuple(ne)
                point = {name: ne[t] for name, t in zip(ef.params, pos)}
                mult = p.subs(point)
                if mult == 0:
                    continue
                prev = out.get(ne)
                val = coeff * mult if prev is None else prev + coeff * mult
                if val == 0:
                    out.pop(ne, None)
                else:
                    out[ne] = val
        components[label] = out
    return series.replace(components=components, bounds=tuple(new_bounds))

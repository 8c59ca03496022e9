"""Exact scalar arithmetic: rationals, parameter polynomials, rational
functions and fraction-free linear algebra.

Everything downstream (weighted polynomials, Groebner bases, operator
derivation) works over the field Q(psi, phi, chi, ...) of rational functions
in the deformation parameters.  This module provides that field together
with exact kernel/rank computations for matrices over it.  No floats, ever:
a single rounded coefficient would silently wreck the operator search.

Rationals are gmpy2.mpq when available (much faster), with a
fractions.Fraction fallback.  Both satisfy the same contract: always
reduced, denominator positive, zero is 0/1.
"""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Tuple

try:  # pragma: no cover - exercised implicitly by every test
    from gmpy2 import mpq as _mpq

    def Q(a, b=1):
        """Exact rational constructor."""
        return _mpq(a, b)

    _RAT_TYPES = (_mpq, int)
except ImportError:  # pragma: no cover
    from fractions import Fraction as _mpq

    def Q(a, b=1):
        return _mpq(a, b)

    _RAT_TYPES = (_mpq, int)

QZERO = Q(0)
QONE = Q(1)

Exponent = Tuple[int, ...]


def q_gcd(a, b):
    """gcd of two rationals: gcd of numerators over lcm of denominators.

    Normalised positive.  q_gcd(0, x) = |x|.
    """
    a, b = Q(a), Q(b)
    if a == 0:
        return abs(b)
    if b == 0:
        return abs(a)
    from math import gcd, lcm

    return Q(gcd(int(a.numerator), int(b.numerator)),
             lcm(int(a.denominator), int(b.denominator)))


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


class ParamPolynomial:
    """Polynomial in the deformation parameters with rational coefficients.

    Terms are a dict mapping exponent tuples to nonzero rationals.  The
    parameter name tuple fixes both the exponent length and the canonical
    (graded lexicographic) term order used for printing, leading
    coefficients and sign normalisation.
    """

    __slots__ = ("params", "terms")

    def __init__(self, params: Tuple[str, ...], terms: Dict[Exponent, object],
                 _trust: bool = False):
        self.params = tuple(params)
        if _trust:
            self.terms = terms
        else:
            clean: Dict[Exponent, object] = {}
            n = len(self.params)
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != n:
                    raise ValueError(
                        f"exponent {exp} has wrong length for params {self.params}")
                if any(e < 0 for e in exp):
                    raise ValueError(f"negative exponent in {exp}")
                c = Q(c)
                if c != 0:
                    clean[exp] = clean.get(exp, QZERO) + c
                    if clean[exp] == 0:
                        del clean[exp]
            self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, params: Sequence[str]) -> "ParamPolynomial":
        return cls(tuple(params), {}, _trust=True)

    @classmethod
    def const(cls, params: Sequence[str], value) -> "ParamPolynomial":
        value = Q(value)
        params = tuple(params)
        if value == 0:
            return cls(params, {}, _trust=True)
        return cls(params, {(0,) * len(params): value}, _trust=True)

    @classmethod
    def var(cls, params: Sequence[str], name: str, exp: int = 1) -> "ParamPolynomial":
        params = tuple(params)
        if name not in params:
            raise ValueError(f"unknown parameter {name!r}, have {params}")
        e = [0] * len(params)
        e[params.index(name)] = exp
        return cls(params, {tuple(e): QONE}, _trust=True)

    @classmethod
    def parse(cls, text: str, params: Sequence[str]) -> "ParamPolynomial":
        # Deferred import: the shared expression parser lives with the
        # weighted-polynomial machinery.
        from .wpoly import parse_parameter_polynomial

        return parse_parameter_polynomial(text, tuple(params))

    # -- predicates ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self):
        if not self.terms:
            return QZERO
        if not self.is_constant:
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    # -- ring operations -----------------------------------------------

    def _check(self, other: "ParamPolynomial"):
        if self.params != other.params:
            raise ValueError(f"parameter mismatch: {self.params} vs {other.params}")

    def __add__(self, other):
        if isinstance(other, _RAT_TYPES):
            other = ParamPolynomial.const(self.params, other)
        self._check(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, QZERO) + c
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = s
        return ParamPolynomial(self.params, terms, _trust=True)

    __radd__ = __add__

    def __neg__(self):
        return ParamPolynomial(self.params, {e: -c for e, c in self.terms.items()},
                               _trust=True)

    def __sub__(self, other):
        if isinstance(other, _RAT_TYPES):
            other = ParamPolynomial.const(self.params, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, _RAT_TYPES):
            c = Q(other)
            if c == 0:
                return ParamPolynomial.zero(self.params)
            return ParamPolynomial(
                self.params, {e: k * c for e, k in self.terms.items()}, _trust=True)
        self._check(other)
        if not self.terms or not other.terms:
            return ParamPolynomial.zero(self.params)
        terms: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, QZERO) + c1 * c2
                if s == 0:
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return ParamPolynomial(self.params, terms, _trust=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = ParamPolynomial.const(self.params, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, _RAT_TYPES):
            other = ParamPolynomial.const(self.params, other)
        if not isinstance(other, ParamPolynomial):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __hash__(self):
        return hash((self.params, frozenset(self.terms.items())))

    # -- structure -----------------------------------------------------

    def leading_exponent(self) -> Exponent:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=_grlex_key)

    def leading_coeff(self):
        return self.terms[self.leading_exponent()]

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.params.index(name)
        return max(e[i] for e in self.terms)

    def content(self):
        """Positive rational content (gcd of coefficients); 0 for the zero poly.

        No early exit on 1: a later coefficient with a denominator can still
        shrink the gcd (q_gcd(1, 3/2) = 1/2).
        """
        c = QZERO
        for v in self.terms.values():
            c = q_gcd(c, v)
        return c

    def signed_content(self):
        """Content carrying the sign of the leading coefficient."""
        if not self.terms:
            return QZERO
        c = self.content()
        return c if self.leading_coeff() > 0 else -c

    def primitive(self) -> Tuple[object, "ParamPolynomial"]:
        """Return (signed content, primitive part); primitive part has
        content 1 and positive leading coefficient."""
        if not self.terms:
            return QZERO, self
        c = self.signed_content()
        if c == 1:
            return QONE, self
        return c, ParamPolynomial(
            self.params, {e: v / c for e, v in self.terms.items()}, _trust=True)

    def derivative(self, name: str) -> "ParamPolynomial":
        i = self.params.index(name)
        terms: Dict[Exponent, object] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
        return ParamPolynomial(self.params, terms, _trust=True)

    def subs(self, point: Dict[str, object]):
        """Evaluate at a rational point; every parameter must be given."""
        vals = [Q(point[p]) for p in self.params]
        total = QZERO
        for e, c in self.terms.items():
            v = c
            for x, k in zip(vals, e):
                if k:
                    v = v * x ** k
            total += v
        return total

    def exact_div(self, other: "ParamPolynomial") -> "ParamPolynomial":
        """Exact polynomial division; raises ValueError if not divisible."""
        self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_constant:
            c = other.constant_value()
            return ParamPolynomial(
                self.params, {e: v / c for e, v in self.terms.items()}, _trust=True)
        rem = dict(self.terms)
        out: Dict[Exponent, object] = {}
        dexp = other.leading_exponent()
        dc = other.terms[dexp]
        while rem:
            e = max(rem, key=_grlex_key)
            q = tuple(a - b for a, b in zip(e, dexp))
            if any(x < 0 for x in q):
                raise ValueError("inexact polynomial division")
            qc = rem[e] / dc
            out[q] = out.get(q, QZERO) + qc
            for oe, oc in other.terms.items():
                t = tuple(a + b for a, b in zip(q, oe))
                s = rem.get(t, QZERO) - qc * oc
                if s == 0:
                    rem.pop(t, None)
                else:
                    rem[t] = s
        return ParamPolynomial(self.params, out, _trust=True)

    # -- printing --------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for exp in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exp]
            mono = "*".join(
                p if k == 1 else f"{p}^{k}"
                for p, k in zip(self.params, exp) if k)
            if not mono:
                piece = str(c)
            elif c == 1:
                piece = mono
            elif c == -1:
                piece = f"-{mono}"
            else:
                piece = f"{c}*{mono}"
            if bits and not piece.startswith("-"):
                bits.append("+" + piece)
            else:
                bits.append(piece)
        return "".join(bits)

    def __repr__(self) -> str:
        return f"ParamPolynomial({self})"


# -- multivariate gcd ---------------------------------------------------
#
# Primitive polynomial remainder sequences, recursing on the number of
# parameters.  Parameter counts here are tiny (at most three or four), so
# the dense recursive strategy is entirely adequate.


def _to_univariate(p: ParamPolynomial, i: int) -> Dict[int, ParamPolynomial]:
    """View p as univariate in parameter i with coefficients in the rest."""
    sub = p.params[:i] + p.params[i + 1:]
    coeffs: Dict[int, Dict[Exponent, object]] = {}
    for e, c in p.terms.items():
        k = e[i]
        rest = e[:i] + e[i + 1:]
        coeffs.setdefault(k, {})[rest] = c
    return {k: ParamPolynomial(sub, t, _trust=True) for k, t in coeffs.items()}


def _from_univariate(coeffs: Dict[int, ParamPolynomial], i: int,
                     params: Tuple[str, ...]) -> ParamPolynomial:
    terms: Dict[Exponent, object] = {}
    for k, cp in coeffs.items():
        for e, c in cp.terms.items():
            terms[e[:i] + (k,) + e[i:]] = c
    return ParamPolynomial(params, terms, _trust=True)


def _uni_mul(a: Dict[int, ParamPolynomial], b: Dict[int, ParamPolynomial]):
    out: Dict[int, ParamPolynomial] = {}
    for i, ca in a.items():
        for j, cb in b.items():
            p = ca * cb
            if p.is_zero:
                continue
            k = i + j
            out[k] = out[k] + p if k in out else p
    return {k: v for k, v in out.items() if not v.is_zero}


def _uni_scale(a: Dict[int, ParamPolynomial], c: ParamPolynomial):
    out = {}
    for k, v in a.items():
        p = v * c
        if not p.is_zero:
            out[k] = p
    return out


def _uni_sub(a: Dict[int, ParamPolynomial], b: Dict[int, ParamPolynomial]):
    out = dict(a)
    for k, v in b.items():
        s = out[k] - v if k in out else -v
        if s.is_zero:
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _uni_content(a: Dict[int, ParamPolynomial]) -> ParamPolynomial:
    """gcd of the coefficient polynomials (content in the remaining params)."""
    coeffs = sorted(a.values(), key=lambda p: len(p.terms))
    g = coeffs[0]
    for c in coeffs[1:]:
        g = pp_gcd(g, c)
        if g.is_constant:
            break
    return g


def _uni_primitive(a: Dict[int, ParamPolynomial]):
    """Strip polynomial AND rational content; without the rational part a
    pseudo-remainder sequence blows up doubly exponentially."""
    g = _uni_content(a)
    if not g.is_constant:
        a = {k: v.exact_div(g) for k, v in a.items()}
    c = QZERO
    for v in a.values():
        c = q_gcd(c, v.content())
    if c == 1:
        return a
    return {k: v * (1 / c) for k, v in a.items()}


def _uni_pseudo_rem(a: Dict[int, ParamPolynomial], b: Dict[int, ParamPolynomial]):
    """Pseudo remainder of a by b in the main variable."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        # lb * r - lr * x^(dr-db) * b
        r = _uni_scale(r, lb)
        shift = {k + dr - db: v * lr for k, v in b.items()}
        r = _uni_sub(r, shift)
        if r and max(r) == dr:  # cancellation must remove the lead
            raise AssertionError("pseudo-division failed to reduce degree")
    return r


def pp_gcd(a: ParamPolynomial, b: ParamPolynomial) -> ParamPolynomial:
    """Primitive gcd with positive leading coefficient.

    Full gcd including rational content is q_gcd of the contents times this.
    """
    if a.is_zero:
        return b.primitive()[1] if not b.is_zero else a
    if b.is_zero:
        return a.primitive()[1]
    if a.is_constant or b.is_constant:
        return ParamPolynomial.const(a.params, 1)
    # main variable: last parameter appearing in a (any divisor of a only
    # involves parameters of a)
    main = max(i for i in range(len(a.params)) if any(e[i] for e in a.terms))
    if not any(e[main] for e in b.terms):
        # b is free of the main variable, so the gcd is too: replace a by
        # its content with respect to that variable
        ua = _to_univariate(a, main)
        ca = _from_univariate({0: _uni_content(ua)}, main, a.params)
        return pp_gcd(ca, b)
    ua, ub = _to_univariate(a, main), _to_univariate(b, main)
    cont = pp_gcd(_uni_content(ua), _uni_content(ub))
    ua, ub = _uni_primitive(ua), _uni_primitive(ub)
    if max(ua) < max(ub):
        ua, ub = ub, ua
    while True:
        r = _uni_pseudo_rem(ua, ub)
        if not r:
            g = ub
            break
        if max(r) == 0:
            g = {0: ParamPolynomial.const(a.params[:main] + a.params[main + 1:], 1)}
            break
        ua, ub = ub, _uni_primitive(r)
    g = _uni_primitive(g)
    if not cont.is_constant:
        g = {k: v * cont for k, v in g.items()}
    result = _from_univariate(g, main, a.params)
    _, prim = result.primitive()
    return prim


def pp_gcd_many(polys: Iterable[ParamPolynomial]) -> Optional[ParamPolynomial]:
    """Primitive gcd of several polynomials; None for an empty/zero family."""
    g = None
    for p in sorted((p for p in polys if not p.is_zero), key=lambda p: len(p.terms)):
        g = p.primitive()[1] if g is None else pp_gcd(g, p)
        if g.is_constant:
            return g
    return g


def pp_lcm(a: ParamPolynomial, b: ParamPolynomial) -> ParamPolynomial:
    g = pp_gcd(a, b)
    return a.exact_div(g) * b


# -- rational functions -------------------------------------------------


class RationalFunction:
    """Element of Q(params), stored as num/den in canonical form.

    Canonical means: gcd(num, den) = 1 (polynomial and rational content),
    den is primitive with positive leading coefficient, zero is 0/1.
    Equality is therefore structural.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: ParamPolynomial, den: Optional[ParamPolynomial] = None,
                 _trust: bool = False):
        if den is None:
            den = ParamPolynomial.const(num.params, 1)
        if _trust:
            self.num = num
            self.den = den
            return
        if den.is_zero:
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero:
            self.num = num
            self.den = ParamPolynomial.const(num.params, 1)
            return
        dc, dprim = den.primitive()
        nc, nprim = num.primitive()
        g = pp_gcd(nprim, dprim)
        if not g.is_constant:
            nprim = nprim.exact_div(g)
            dprim = dprim.exact_div(g)
        self.num = nprim * (nc / dc)
        self.den = dprim

    # -- constructors ---------------------------------------------------

    @classmethod
    def const(cls, params: Sequence[str], value) -> "RationalFunction":
        return cls(ParamPolynomial.const(params, value))

    @classmethod
    def from_poly(cls, p: ParamPolynomial) -> "RationalFunction":
        return cls(p, None, _trust=True)

    # -- predicates -----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_poly(self) -> bool:
        return self.den.is_constant

    @property
    def params(self):
        return self.num.params

    def constant_value(self):
        if not self.den.is_constant:
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value() / self.den.constant_value()

    # -- field operations ------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, ParamPolynomial):
            return RationalFunction.from_poly(other)
        if isinstance(other, _RAT_TYPES):
            return RationalFunction.const(self.params, other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        if self.den.is_constant:
            return RationalFunction(self.num * other.den + other.num, other.den)
        if other.den.is_constant:
            return RationalFunction(self.num + other.num * self.den, self.den)
        g = pp_gcd(self.den, other.den)
        if g.is_constant:
            return RationalFunction(self.num * other.den + other.num * self.den,
                                    self.den * other.den)
        db = self.den.exact_div(g)
        dd = other.den.exact_div(g)
        return RationalFunction(self.num * dd + other.num * db, db * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _trust=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if self.den.is_constant and other.den.is_constant:
            num = self.num * other.num
            d = self.den.constant_value() * other.den.constant_value()
            if d != 1:
                num = num * (1 / d)
            return RationalFunction(num, None, _trust=True)
        if self.is_zero or other.is_zero:
            return RationalFunction(ParamPolynomial.zero(self.params),
                                    None, _trust=True)
        # Cross-cancel first so gcds only touch the parts that can cancel;
        # both inputs are canonical, so the trusted result is too.
        a, b, u, v = self.num, self.den, other.num, other.den
        if not v.is_constant:
            ac, ap = a.primitive()
            g = pp_gcd(ap, v)
            if not g.is_constant:
                a = ap.exact_div(g) * ac
                v = v.exact_div(g)
        if not b.is_constant:
            uc, up = u.primitive()
            g = pp_gcd(up, b)
            if not g.is_constant:
                u = up.exact_div(g) * uc
                b = b.exact_div(g)
        return RationalFunction(a * u, b * v, _trust=True)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.is_zero:
            raise ZeroDivisionError("inverting zero rational function")
        nc, nprim = self.num.primitive()
        return RationalFunction(self.den * (1 / nc), nprim, _trust=True)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self, name: str) -> "RationalFunction":
        dn = self.num.derivative(name)
        dd = self.den.derivative(name)
        if dd.is_zero:
            return RationalFunction(dn, self.den)
        return RationalFunction(dn * self.den - self.num * dd,
                                self.den * self.den)

    def subs(self, point: Dict[str, object]):
        d = self.den.subs(point)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.subs(point) / d

    def __str__(self):
        if self.den.is_constant and self.den.constant_value() == 1:
            return str(self.num)
        ns = str(self.num)
        if len(self.num.terms) > 1:
            ns = f"({ns})"
        ds = str(self.den)
        if len(self.den.terms) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    def __repr__(self):
        return f"RationalFunction({self})"


# -- exact linear algebra -----------------------------------------------


class ExactMatrix:
    """Dense matrix over Q(params) with fraction-free kernel and rank.

    Rows are cleared to polynomial form up front; elimination then uses
    cross-multiplication steps with content removal at every pivot, so no
    rational-function arithmetic happens until back substitution.
    """

    def __init__(self, params: Tuple[str, ...], entries: Sequence[Sequence[object]]):
        self.params = tuple(params)
        rows = []
        for row in entries:
            r = []
            for x in row:
                if isinstance(x, RationalFunction):
                    r.append(x)
                elif isinstance(x, ParamPolynomial):
                    r.append(RationalFunction.from_poly(x))
                else:
                    r.append(RationalFunction.const(self.params, x))
            rows.append(r)
        self.entries: List[List[RationalFunction]] = rows
        self.rows = len(rows)
        self.cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != self.cols:
                raise ValueError("ragged matrix")

    # row as list of ParamPolynomial, denominators cleared, content stripped
    def _poly_rows(self) -> List[List[ParamPolynomial]]:
        out = []
        one = ParamPolynomial.const(self.params, 1)
        for row in self.entries:
            den = one
            for x in row:
                if not x.den.is_constant or x.den.constant_value() != 1:
                    den = pp_lcm(den, x.den) if not den.is_constant else x.den
            cleared = []
            for x in row:
                p = x.num * den.exact_div(x.den) if not (
                    x.den.is_constant and x.den.constant_value() == 1) else x.num * den
                cleared.append(p)
            out.append(_strip_row_content(cleared))
        return out

    def rank(self) -> int:
        ech, pivots = _echelon(self._poly_rows())
        return len(pivots)

    def nullspace(self) -> List[List[ParamPolynomial]]:
        """Basis of the right kernel, each vector content-free with the
        first nonzero entry having positive leading coefficient."""
        ech, pivots = _echelon(self._poly_rows())
        pivot_cols = [c for _, c in pivots]
        free_cols = [c for c in range(self.cols) if c not in pivot_cols]
        basis = []
        zero = RationalFunction.const(self.params, 0)
        for f in free_cols:
            x: List[RationalFunction] = [zero] * self.cols
            x[f] = RationalFunction.const(self.params, 1)
            for r, c in reversed(pivots):
                s = zero
                row = ech[r]
                for j in range(c + 1, self.cols):
                    if not row[j].is_zero and not x[j].is_zero:
                        s = s + RationalFunction.from_poly(row[j]) * x[j]
                x[c] = s * RationalFunction(
                    ParamPolynomial.const(self.params, -1), row[c])
            basis.append(_normalize_vector(x, self.params))
        return basis

    def times_vector(self, vec: Sequence[object]) -> List[RationalFunction]:
        v = [x if isinstance(x, RationalFunction)
             else RationalFunction.from_poly(x) if isinstance(x, ParamPolynomial)
             else RationalFunction.const(self.params, x) for x in vec]
        out = []
        for row in self.entries:
            s = RationalFunction.const(self.params, 0)
            for a, b in zip(row, v):
                if not a.is_zero and not b.is_zero:
                    s = s + a * b
            out.append(s)
        return out


def _strip_row_content(row: List[ParamPolynomial]) -> List[ParamPolynomial]:
    nonzero = [p for p in row if not p.is_zero]
    if not nonzero:
        return row
    c = QZERO
    for p in nonzero:
        c = q_gcd(c, p.content())
    g = pp_gcd_many(nonzero)
    scale = 1 / c
    if g is not None and not g.is_constant:
        return [(p.exact_div(g)) * scale if not p.is_zero else p for p in row]
    if c != 1:
        return [p * scale if not p.is_zero else p for p in row]
    return row


def _echelon(rows: List[List[ParamPolynomial]]):
    """Fraction-free row echelon form. Returns (rows, [(row, col) pivots])."""
    if not rows:
        return rows, []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, len(rows)):
            if not rows[i][c].is_zero:
                pivot = i
                break
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][c]
        for i in range(r + 1, len(rows)):
            if rows[i][c].is_zero:
                continue
            coef = rows[i][c]
            rows[i] = _strip_row_content(
                [lead * rows[i][j] - coef * rows[r][j] for j in range(ncols)])
            assert rows[i][c].is_zero
        pivots.append((r, c))
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def _normalize_vector(vec: List[RationalFunction],
                      params: Tuple[str, ...]) -> List[ParamPolynomial]:
    """Clear denominators, strip content, make the first nonzero entry
    have positive leading coefficient."""
    one = ParamPolynomial.const(params, 1)
    den = one
    for x in vec:
        if not x.is_zero and not (x.den.is_constant and x.den.constant_value() == 1):
            den = pp_lcm(den, x.den) if not den.is_constant else x.den
    polys = []
    for x in vec:
        if x.is_zero:
            polys.append(ParamPolynomial.zero(params))
        else:
            polys.append(x.num * den.exact_div(x.den))
    stripped = _strip_row_content(polys)
    for p in stripped:
        if not p.is_zero:
            if p.leading_coeff() < 0:
                stripped = [-q for q in stripped]
            break
    return stripped


def nullspace(matrix: ExactMatrix) -> List[List[ParamPolynomial]]:
    return matrix.nullspace()


def rank(matrix: ExactMatrix) -> int:
    return matrix.rank()

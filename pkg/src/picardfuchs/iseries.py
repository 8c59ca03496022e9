"""Exact genus-zero series of a twisted family and its term-wise checks.

The series attached to a twisted double-cover family lives on a fractional
exponent lattice: the curve-square direction steps by 1/2, the K3-square
direction by 1/w0, and the five-fold-product direction by 1, with even
product exponents forming the plain component and odd ones the involution
component.  Every coefficient is a ratio of Gamma values at integers and
half-integers, evaluated here exactly; expanding the two divisor insertions
to first order adds digamma (harmonic-number) corrections, still exact
rationals once the square-root-of-pi and Euler-constant parts cancel, which
they do whenever the slope multiset of the numerator Gamma arguments
matches the denominator's.

Besides building series, the module checks operator annihilation with
truncation-aware validity regions, evaluates the published two-term shift
identity in the product direction next to the diagonal ladder identity
that the coefficients actually satisfy, derives one-variable annihilators
straight from the coefficient recurrences, assembles the per-residue
sector series that one-variable operators transport onto, and extracts the
mirror map.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .diffop import (
    DiffOperator,
    EulerForm,
    apply as apply_operator,
    from_euler,
    normalize,
)
from .family import FamilySpec
from .scalars import ParamPolynomial, Q, QONE, QZERO, pp_gcd

__all__ = [
    "SectorIndex", "IndexedSeries", "TermJet", "MirrorMapData",
    "coefficient", "shifted_coefficient", "build_series", "axis_series",
    "check_annihilation", "involution_shift_check", "sigma_ladder_check",
    "sigma_ladder_operator", "curve_ladder_operator", "axis_annihilator",
    "continued_sector_series", "mirror_map",
]

UNTWISTED = "untwisted"
TWISTED = "twisted"
HALF = Q(1, 2)


def _floor(x) -> int:
    return int(x.numerator // x.denominator) if hasattr(x, "numerator") \
        else int(math.floor(x))


def _ceil(x) -> int:
    return -_floor(-Q(x))


# -- exact Gamma and digamma on the half-integer lattice -------------------

def _gamma_value(x) -> Optional[Tuple[object, int]]:
    """Gamma(x) for 2x integral, as (rational, power of sqrt(pi)).

    Nonpositive integers return None (pole).  Negative half-integers are
    finite and keep a single sqrt(pi) factor.
    """
    x = Q(x)
    two = x * 2
    if two.denominator != 1:
        raise ValueError(f"Gamma argument {x} is not a half-integer")
    if x.denominator == 1:
        n = int(x)
        if n <= 0:
            return None
        return Q(math.factorial(n - 1)), 0
    value = QONE
    arg = HALF
    while arg < x:
        value = value * arg
        arg = arg + 1
    while arg > x:
        arg = arg - 1
        value = value / arg
    return value, 1


def _digamma_value(x) -> Tuple[object, object, object]:
    """digamma(x) for 2x integral, x not a nonpositive integer, as
    (rational part, coefficient of the Euler constant, coefficient of log 2).
    """
    x = Q(x)
    if x.denominator == 1:
        n = int(x)
        if n <= 0:
            raise ValueError(f"digamma pole at {x}")
        h = QZERO
        for j in range(1, n):
            h = h + Q(1, j)
        return h, Q(-1), QZERO
    rat = QZERO
    arg = HALF
    while arg < x:
        rat = rat + 1 / arg
        arg = arg + 1
    while arg > x:
        arg = arg - 1
        rat = rat - 1 / arg
    return rat, Q(-1), Q(-2)


_TRIPLE_ZERO = (QZERO, QZERO, QZERO)


def _tscale(t, c):
    return (t[0] * c, t[1] * c, t[2] * c)


def _tadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


# -- the Gamma-factor catalogue of one term ---------------------------------

@dataclass(frozen=True)
class _GammaFactor:
    sign: int              # +1 numerator, -1 denominator
    direction: Optional[str]   # "E", "K" or None
    slope: int             # divisor-insertion coefficient in the argument
    offset: object         # argument with both insertions at zero


def _twist_data(fs: FamilySpec) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    if fs.provenance is None:
        raise ValueError(
            "series construction needs the curve/K3 cover data; build the "
            "family with twist() or load a file that carries the covers")
    curve, k3 = fs.provenance
    return curve.weights, k3.weights


def _series_params(fs: FamilySpec) -> Tuple[str, ...]:
    """Coordinate names of the series: the family's three deformation names
    when declared, the standard triple otherwise."""
    names = fs.parameters()
    return names if len(names) == 3 else ("psi", "phi", "chi")


def _gamma_factors(fs: FamilySpec, a: int, b: int, c,
                   reading: str = "derived") -> List[_GammaFactor]:
    """All Gamma factors of the term at indices (a, b, c).

    `reading` selects between the self-consistent argument bookkeeping
    ("derived": the constant K3 slot carries 2*w0 and the plain-component
    numerator runs over all four K3 weights) and the literal printed one
    ("printed": constant slot hard-coded to 6, the w0 numerator slot absent
    from the plain component, and the twisted K3 coupling hard-coded to
    3*b).  The two agree wherever the printed form is self-consistent.
    """
    if reading not in ("derived", "printed"):
        raise ValueError(f"unknown reading {reading!r}")
    (v0, v1, v2), (w0, w1, w2, w3) = _twist_data(fs)
    c = Q(c)
    twisted = (c * 2) % 2 == 1
    ke = HALF if twisted else QONE
    fac = [
        _GammaFactor(+1, "E", 2 * v0, 2 * v0 * a + 2 * c + 1),
        _GammaFactor(-1, "E", 2 * v0, QONE),
        _GammaFactor(+1, "E", v0, ke),
        _GammaFactor(-1, "E", v0, v0 * a + c + 1),
    ]
    for vi in (v1, v2):
        fac.append(_GammaFactor(+1, "E", vi, QONE))
        fac.append(_GammaFactor(-1, "E", vi, Q(vi * a + 1)))
    fac.append(_GammaFactor(+1, "K", 2 * w0, 2 * w0 * b + 2 * c + 1))
    if reading == "printed" and not twisted:
        fac.append(_GammaFactor(-1, "K", 6, QONE))
    else:
        fac.append(_GammaFactor(-1, "K", 2 * w0, QONE))
    if twisted:
        fac.append(_GammaFactor(+1, "K", w0, HALF))
        coupling = 3 * b if reading == "printed" else w0 * b
        fac.append(_GammaFactor(-1, "K", w0, coupling + c + 1))
    else:
        if reading == "derived":
            fac.append(_GammaFactor(+1, "K", w0, QONE))
        fac.append(_GammaFactor(-1, "K", w0, w0 * b + c + 1))
    for wi in (w1, w2, w3):
        fac.append(_GammaFactor(+1, "K", wi, QONE))
        fac.append(_GammaFactor(-1, "K", wi, Q(wi * b + 1)))
    fac.append(_GammaFactor(-1, None, 0, 2 * c + 1))
    return fac


def _factor_laurent(f: _GammaFactor):
    """Laurent data (pole order p, c0, c1-triple, sqrt-pi power) of one
    factor as a function of its own insertion variable:
    factor = pi^(k/2) * eps^p * (c0 + c1*eps + O(eps^2))."""
    g = _gamma_value(f.offset)
    if g is None:
        # Gamma(x) = (-1)^n/(n! (x+n)) (1 + digamma(n+1) (x+n) + ...) at -n
        n = int(-Q(f.offset))
        base = Q((-1) ** n) * math.factorial(n)
        psi = _digamma_value(n + 1)
        if f.sign < 0:
            c0 = base * f.slope
            return 1, c0, _tscale(psi, -c0 * f.slope), 0
        c0 = QONE / (base * f.slope)
        return -1, c0, _tscale(psi, c0 * f.slope), 0
    value, pik = g
    psi = _digamma_value(f.offset)
    if f.sign > 0:
        return 0, value, _tscale(psi, value * f.slope), pik
    inv = QONE / value
    return 0, inv, _tscale(psi, -inv * f.slope), -pik


def _direction_jet(factors, direction):
    """(p, c0, c1, pi) of the product of the factors along one direction."""
    p, c0, c1, pik = 0, QONE, _TRIPLE_ZERO, 0
    for f in factors:
        if f.direction != direction:
            continue
        fp, fc0, fc1, fk = _factor_laurent(f)
        p += fp
        pik += fk
        c1 = _tadd(_tscale(fc1, c0), _tscale(c1, fc0))
        c0 = c0 * fc0
    return p, c0, c1, pik


# -- indices and coefficients -----------------------------------------------

@dataclass(frozen=True)
class SectorIndex:
    """Summation index of one term: integers a, b and half-integer c >= 0.

    Integer c selects the plain component, half-odd c the involution
    component.  The family-dependent lower bounds a >= -c/2, b >= -c/w0
    are enforced where a family is at hand.
    """

    a: int
    b: int
    c: object

    def __post_init__(self):
        c = Q(self.c)
        if (2 * c).denominator != 1 or c < 0:
            raise ValueError(f"c must be a nonnegative half-integer, got {c}")
        object.__setattr__(self, "c", c)

    @property
    def component(self) -> str:
        return TWISTED if (2 * self.c) % 2 == 1 else UNTWISTED

    def admissible(self, w0: int) -> bool:
        return 2 * self.a >= -self.c and self.b * w0 >= -self.c

    def exponent(self, w0: int) -> Tuple[object, object, object]:
        return (Q(self.a, 2), Q(self.b, w0), 2 * self.c)


@dataclass(frozen=True)
class TermJet:
    """First-order jet of one term in the two divisor directions.

    The stored derivatives are the rational parts only; the full derivative
    of the term with respect to either insertion is  d + value * log(q)
    in the matching coordinate, the log part being common structure that
    the mirror map splits off.
    """

    value: object
    d_curve: object
    d_k3: object


def _term_jet(fs: FamilySpec, a: int, b: int, c, reading: str) -> TermJet:
    factors = _gamma_factors(fs, a, b, c, reading)
    # direction-free part (the symmetrizer); never a pole since 2c+1 >= 1
    _, scale, _, _ = _direction_jet(factors, None)
    p_e, e0, e1, k_e = _direction_jet(factors, "E")
    p_k, k0c, k1c, k_k = _direction_jet(factors, "K")
    if p_e < 0 or p_k < 0:
        raise ArithmeticError(
            f"divergent term at ({a}, {b}, {c}): numerator pole exceeds "
            "denominator zeros")
    if k_e + k_k != 0:
        raise AssertionError(
            f"sqrt(pi) powers do not cancel at ({a}, {b}, {c})")
    ev = e0 if p_e == 0 else QZERO
    kv = k0c if p_k == 0 else QZERO
    value = ev * kv * scale
    de = e1 if p_e == 0 else ((e0, QZERO, QZERO) if p_e == 1 else _TRIPLE_ZERO)
    dk = k1c if p_k == 0 else (
        (k0c, QZERO, QZERO) if p_k == 1 else _TRIPLE_ZERO)
    d_curve = _tscale(de, kv * scale)
    d_k3 = _tscale(dk, ev * scale)
    for name, t in (("curve", d_curve), ("K3", d_k3)):
        if t[1] != 0 or t[2] != 0:
            raise ValueError(
                f"{name}-direction jet at ({a}, {b}, {c}) keeps an Euler-"
                "constant or log-2 residue; the Gamma slopes of this "
                "reading are unbalanced, so its first-order jet is not "
                "rational")
    return TermJet(value, d_curve[0], d_k3[0])


def coefficient(idx: SectorIndex, fs: FamilySpec, jet: int = 0,
                reading: str = "derived"):
    """Exact coefficient of the term at `idx`: a rational for jet 0, a
    TermJet for jet 1.

    Denominator Gamma factors at nonpositive integers zero the term
    (reciprocal-Gamma convention); the involution component's residual
    sqrt(pi) factors cancel term by term, so its component constant is 1
    and coefficients are plain rationals here as well.
    """
    if jet not in (0, 1):
        raise ValueError("jet order must be 0 or 1")
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    if not idx.admissible(w0):
        raise ValueError(
            f"index ({idx.a}, {idx.b}, {idx.c}) violates the summation "
            f"bounds a >= -c/2, b >= -c/{w0}")
    jetdata = _term_jet(fs, idx.a, idx.b, idx.c, reading)
    return jetdata if jet == 1 else jetdata.value


def shifted_coefficient(idx: SectorIndex, fs: FamilySpec, direction: str,
                        eps, reading: str = "derived"):
    """The term's Gamma ratio with one divisor insertion set to the actual
    rational value `eps` instead of expanded formally.

    Matching (slope, half-integer class) multisets between numerator and
    denominator reduce every Gamma to rising/falling rational products, so
    the result is an exact rational.  This is the finite-difference oracle
    for the jet-1 derivatives.
    """
    if direction not in ("E", "K"):
        raise ValueError("direction must be 'E' or 'K'")
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    if not idx.admissible(w0):
        raise ValueError("index violates the summation bounds")
    eps = Q(eps)
    factors = _gamma_factors(fs, idx.a, idx.b, idx.c, reading)
    other = "K" if direction == "E" else "E"
    p_o, o0, _, k_o = _direction_jet(factors, other)
    if p_o > 0:
        return QZERO
    _, s0, _, _ = _direction_jet(factors, None)
    scale = o0 * s0
    balance: Dict[Tuple[int, int], int] = {}
    value = QONE
    for f in factors:
        if f.direction != direction:
            continue
        offset = Q(f.offset)
        base = QONE if offset.denominator == 1 else HALF
        steps = int(offset - base)
        x = f.slope * eps + base
        block = QONE
        if steps >= 0:
            for j in range(steps):
                block = block * (x + j)
        else:
            for j in range(1, -steps + 1):
                block = block / (x - j)
        key = (f.slope, int(base * 2))
        balance[key] = balance.get(key, 0) + f.sign
        value = value * (block if f.sign > 0 else QONE / block)
    if any(v != 0 for v in balance.values()):
        raise ValueError(
            "Gamma bases do not cancel; this reading has no rational "
            "finite-difference evaluation")
    if k_o != 0:
        raise AssertionError("sqrt(pi) powers do not cancel")
    return value * scale


# -- series container --------------------------------------------------------

@dataclass(frozen=True)
class IndexedSeries:
    """Sparse exact series on a per-variable rational exponent lattice.

    `components` maps a sector label to {exponent tuple: coefficient};
    exponents are multiples of `steps` and complete up to `bounds`, so a
    missing key means an exact zero.  `kappa` names the symbolic constant
    factored out of each component ("1" when everything cancelled).
    jet-1 series carry parallel `derivatives` entries (curve, K3).
    """

    params: Tuple[str, ...]
    steps: Tuple[object, ...]
    bounds: Tuple[object, ...]
    components: Dict[str, Dict[Tuple, object]]
    label: str = ""
    jet: int = 0
    derivatives: Optional[Dict[str, Dict[Tuple, Tuple]]] = None
    kappa: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.params)
        if len(self.steps) != n or len(self.bounds) != n:
            raise ValueError("steps/bounds length mismatch")
        for label, terms in self.components.items():
            for e in terms:
                if len(e) != n:
                    raise ValueError(f"exponent arity mismatch in {label}")
                for x, s in zip(e, self.steps):
                    if (Q(x) / Q(s)).denominator != 1:
                        raise ValueError(
                            f"exponent {e} of {label} leaves the lattice")

    def replace(self, components=None, bounds=None) -> "IndexedSeries":
        return IndexedSeries(
            self.params, self.steps,
            tuple(bounds) if bounds is not None else self.bounds,
            components if components is not None else self.components,
            self.label, 0, None, self.kappa)

    def term_count(self) -> int:
        return sum(len(t) for t in self.components.values())


def _component_ranges(fs: FamilySpec, bounds):
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    mu_cap, nu_cap, ga_cap = (Q(x) for x in bounds)
    for gamma in range(_floor(ga_cap) + 1):
        c = Q(gamma, 2)
        for a in range(_ceil(-c / 2), _floor(2 * mu_cap) + 1):
            for b in range(_ceil(-c / w0), _floor(w0 * nu_cap) + 1):
                yield a, b, c


def build_series(fs: FamilySpec, bounds, jet: int = 0,
                 reading: str = "derived", label: str = "") -> IndexedSeries:
    """All terms with exponents inside `bounds` = (curve-square cap,
    K3-square cap, product cap), both components, coefficients exact."""
    if jet not in (0, 1):
        raise ValueError("jet order must be 0 or 1")
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    comps: Dict[str, Dict[Tuple, object]] = {UNTWISTED: {}, TWISTED: {}}
    derivs: Dict[str, Dict[Tuple, Tuple]] = {UNTWISTED: {}, TWISTED: {}}
    for a, b, c in _component_ranges(fs, bounds):
        t = _term_jet(fs, a, b, c, reading)
        if t.value == 0 and (jet == 0 or (t.d_curve == 0 and t.d_k3 == 0)):
            continue
        comp = TWISTED if (2 * c) % 2 == 1 else UNTWISTED
        e = (Q(a, 2), Q(b, w0), Q(2 * c))
        if t.value != 0:
            comps[comp][e] = t.value
        if jet == 1:
            derivs[comp][e] = (t.d_curve, t.d_k3)
    return IndexedSeries(
        params=_series_params(fs),
        steps=(HALF, Q(1, w0), QONE),
        bounds=tuple(Q(x) for x in bounds),
        components=comps,
        label=label or f"twist{fs.weights}",
        jet=jet,
        derivatives=derivs if jet == 1 else None,
        kappa={UNTWISTED: "1", TWISTED: "1"})


def axis_series(fs: FamilySpec, direction: str, cap,
                reading: str = "derived", label: str = "") -> IndexedSeries:
    """One-variable specialization: the series with the other two
    deformation coordinates set to zero."""
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    cap = Q(cap)
    comps: Dict[str, Dict[Tuple, object]] = {UNTWISTED: {}, TWISTED: {}}
    if direction == "psi":
        step = HALF
        for a in range(_floor(2 * cap) + 1):
            v = _term_jet(fs, a, 0, QZERO, reading).value
            if v != 0:
                comps[UNTWISTED][(Q(a, 2),)] = v
    elif direction == "phi":
        step = Q(1, w0)
        for b in range(_floor(w0 * cap) + 1):
            v = _term_jet(fs, 0, b, QZERO, reading).value
            if v != 0:
                comps[UNTWISTED][(Q(b, w0),)] = v
    elif direction == "chi":
        step = QONE
        for gamma in range(_floor(cap) + 1):
            c = Q(gamma, 2)
            v = _term_jet(fs, 0, 0, c, reading).value
            if v != 0:
                comp = TWISTED if gamma % 2 == 1 else UNTWISTED
                comps[comp][(Q(gamma),)] = v
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return IndexedSeries(
        params=(direction,), steps=(step,), bounds=(cap,),
        components=comps,
        label=label or f"twist{fs.weights}|{direction}",
        kappa={UNTWISTED: "1", TWISTED: "1"})


# -- annihilation reports ----------------------------------------------------

def check_annihilation(op: DiffOperator, series: IndexedSeries) -> dict:
    """Apply the operator and report every lattice point of the shrunken
    validity region holding a nonzero coefficient (a pass means none).

    The region shrinks by the operator's most negative per-variable
    exponent shift, so boundary artifacts of the truncation never appear
    as residuals and never hide one.
    """
    result = apply_operator(op, series)
    region = result.bounds
    pos = {p: t for t, p in enumerate(series.params)}
    covered = 0
    for terms in series.components.values():
        for e in terms:
            if all(x <= b for x, b in zip(e, region)):
                covered += 1
    if covered == 0:
        raise ValueError("valid region is empty after shrinkage")
    if covered < 10:
        raise ValueError(
            f"only {covered} lattice points stay inside the valid region; "
            "raise the truncation bounds")
    residuals = []
    for comp in sorted(result.components):
        for e in sorted(result.components[comp]):
            val = result.components[comp][e]
            if val == 0 or any(x > b for x, b in zip(e, region)):
                continue
            residuals.append({"component": comp,
                              "exponent": [str(x) for x in e],
                              "value": str(val)})
    active = set()
    for k, c in op.terms.items():
        for t, p in enumerate(op.params):
            if k[t] or c.degree_in(p) > 0:
                active.add(p)
    step_counts = {}
    for p in sorted(active):
        t = pos[p]
        step_counts[p] = _floor(Q(region[t]) / Q(series.steps[t]))
    return {
        "schema": "annihilation-report/1",
        "operator": str(op),
        "family": series.label,
        "bounds": [str(b) for b in series.bounds],
        "valid_region": [str(b) for b in region],
        "lattice_points": covered,
        "steps_per_variable": step_counts,
        "residual_count": len(residuals),
        "residuals": residuals,
        "pass": not residuals,
    }


# -- the product-direction identities ---------------------------------------

def involution_shift_check(idx: SectorIndex, fs: FamilySpec,
                           second_offset: int = 2,
                           reading: str = "derived") -> bool:
    """The published two-term shift identity at one index, verbatim.

    It equates the second product-direction derivative with the mixed
    curve/K3 derivative term by term: with the output exponent fixed,
    (2c+1)(2c+2) * coeff(a, b, c+1) against the mixed-derivative side
    (a/2+1) * (b/w0+1) * coeff(a+2, b+w0, c).  `second_offset` replaces
    the 2 of the first factor pair for mutation controls.
    """
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    if not idx.admissible(w0):
        raise ValueError("index violates the summation bounds")
    a, b, c = idx.a, idx.b, idx.c
    lhs = (2 * c + 1) * (2 * c + second_offset) * \
        _term_jet(fs, a, b, c + 1, reading).value
    rhs = (Q(a, 2) + 1) * (Q(b, w0) + 1) * \
        _term_jet(fs, a + 2, b + w0, c, reading).value
    return lhs == rhs


def sigma_ladder_check(idx: SectorIndex, fs: FamilySpec,
                       reading: str = "derived") -> bool:
    """The diagonal ladder the coefficients actually satisfy:
    (2c+1)(2c+2) * coeff(a, b, c+1) equals
    4 * (2*v0*a+2c+1) * (2*w0*b+2c+1) * coeff(a, b, c)."""
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    if not idx.admissible(w0):
        raise ValueError("index violates the summation bounds")
    a, b, c = idx.a, idx.b, idx.c
    lhs = (2 * c + 1) * (2 * c + 2) * _term_jet(fs, a, b, c + 1, reading).value
    rhs = 4 * (2 * v0 * a + 2 * c + 1) * (2 * w0 * b + 2 * c + 1) * \
        _term_jet(fs, a, b, c, reading).value
    return lhs == rhs


def sigma_ladder_operator(fs: FamilySpec) -> DiffOperator:
    """Second-order annihilator of the full two-component series encoding
    the diagonal ladder: the square of the product-direction derivative
    equals 4*(4*v0*theta_psi + theta_chi + 1)*(2*w0^2*theta_phi +
    theta_chi + 1) term by term."""
    (v0, _, _), (w0, _, _, _) = _twist_data(fs)
    return DiffOperator.from_text(_series_params(fs), {
        (0, 0, 2): "1 - 4*chi^2",
        (1, 1, 0): f"-{32 * v0 * w0 * w0}*psi*phi",
        (1, 0, 1): f"-{16 * v0}*psi*chi",
        (0, 1, 1): f"-{8 * w0 * w0}*phi*chi",
        (1, 0, 0): f"-{16 * v0}*psi",
        (0, 1, 0): f"-{8 * w0 * w0}*phi",
        (0, 0, 1): "-12*chi",
        (0, 0, 0): "-4",
    })


def _poly(params, value) -> ParamPolynomial:
    return ParamPolynomial.const(params, value)


def curve_ladder_operator(fs: FamilySpec) -> DiffOperator:
    """Annihilator of the full series built from the curve-index ladder.

    One index step obeys  coeff(a+1) * prod(v0*a+c+j) * prod(vi*a+j)
    = coeff(a) * prod(2*v0*a+2c+j); two steps make an integral exponent
    shift, rewritten through Euler symbols at the output exponent."""
    (v0, v1, v2), _ = _twist_data(fs)
    params = _series_params(fs)
    th_psi = ParamPolynomial.var(params, "psi")
    th_chi = ParamPolynomial.var(params, "chi")
    a_out = th_psi * 2 - _poly(params, 2)  # curve index of the output term
    c2 = th_chi                            # doubled product index

    def den(a):
        out = _poly(params, 1)
        for j in range(1, v0 + 1):
            out = out * (a * v0 + c2 * HALF + _poly(params, j))
        for vi in (v1, v2):
            for j in range(1, vi + 1):
                out = out * (a * vi + _poly(params, j))
        return out

    def num(a):
        out = _poly(params, 1)
        for j in range(1, 2 * v0 + 1):
            out = out * (a * (2 * v0) + c2 + _poly(params, j))
        return out

    a1 = a_out + _poly(params, 1)
    p0 = den(a_out) * den(a1)
    p1 = num(a_out) * num(a1)
    g = pp_gcd(p0, p1)
    if not g.is_constant:
        p0 = p0.exact_div(g)
        p1 = p1.exact_div(g)
    form = EulerForm(params, {(0, 0, 0): p0, (1, 0, 0): -p1})
    return normalize(from_euler(form))


# -- axis annihilators from the coefficient recurrences ---------------------

def _rising(params, affine, length) -> ParamPolynomial:
    out = _poly(params, 1)
    for j in range(length):
        out = out * (affine + _poly(params, j))
    return out


def axis_annihilator(fs: FamilySpec, direction: str,
                     max_degree: int = 240) -> DiffOperator:
    """One-variable annihilator of the axis series, derived from the
    symbolic one-index-step Gamma ratio and composed to the smallest
    integral exponent shift.

    The K3 axis needs w0 composed steps, which grows the coefficient
    degree w0-fold; families where the composite would exceed
    `max_degree` are rejected rather than ground out.
    """
    (v0, v1, v2), (w0, w1, w2, w3) = _twist_data(fs)
    params = ("k",)
    k = ParamPolynomial.var(params, "k")

    # per-step rising blocks of the one-step ratio coeff(k+1)/coeff(k)
    if direction == "psi":
        num_blocks = [(2 * v0, k * (2 * v0) + _poly(params, 1))]
        den_blocks = [(v0, k * v0 + _poly(params, 1))] + [
            (vi, k * vi + _poly(params, 1)) for vi in (v1, v2)]
        m, delta = 2, HALF
    elif direction == "phi":
        num_blocks = [(2 * w0, k * (2 * w0) + _poly(params, 1))]
        den_blocks = [(w0, k * w0 + _poly(params, 1))] + [
            (wi, k * wi + _poly(params, 1)) for wi in (w1, w2, w3)]
        m, delta = w0, Q(1, w0)
    elif direction == "chi":
        num_blocks = [(2, k * 2 + _poly(params, 1)),
                      (2, k * 2 + _poly(params, 1))]
        den_blocks = [(1, k + _poly(params, 1)),
                      (1, k + _poly(params, 1)),
                      (2, k * 2 + _poly(params, 1))]
        m, delta = 1, Q(2)
    else:
        raise ValueError(f"unknown direction {direction!r}")

    per_step = sum(l for l, _ in num_blocks) + sum(l for l, _ in den_blocks)
    if per_step * m > max_degree:
        raise ValueError(
            f"the {direction} axis needs {m} composed steps of degree "
            f"{per_step}; beyond max_degree={max_degree}")

    num_m = _poly(params, 1)
    den_m = _poly(params, 1)
    for i in range(1, m + 1):
        shift = _poly(params, -i)
        for length, affine in num_blocks:
            num_m = num_m * _rising(params, affine + shift * length, length)
        for length, affine in den_blocks:
            den_m = den_m * _rising(params, affine + shift * length, length)
    g = pp_gcd(num_m, den_m)
    if not g.is_constant:
        num_m = num_m.exact_div(g)
        den_m = den_m.exact_div(g)

    out = (direction,)
    theta = ParamPolynomial.var(out, direction)

    def rebase(p: ParamPolynomial) -> ParamPolynomial:
        total = ParamPolynomial.zero(out)
        for (e,), c in p.terms.items():
            piece = _poly(out, c)
            for _ in range(e):
                piece = piece * theta * (QONE / delta)
            total = total + piece
        return total

    shift = int(m * delta)
    den0 = rebase(den_m)
    num0 = rebase(num_m)
    # Cancellation can lose the zeros that switch the recurrence off on the
    # seed rows, whose back-reference falls below the support; restore each
    # missing zero by composing with the matching Euler factor on the left.
    probe = axis_series(fs, direction, 3 * shift)
    for comp in probe.components.values():
        if not comp:
            continue
        lo = min(e[0] for e in comp)
        for (r,) in comp:
            if r - shift >= lo or den0.subs({direction: r}) == 0:
                continue
            fix = theta - _poly(out, r)
            den0 = den0 * fix
            num0 = num0 * fix
    form = EulerForm(out, {(0,): den0, (shift,): -num0})
    return normalize(from_euler(form))


# -- per-residue sector series ----------------------------------------------

def continued_sector_series(fs: FamilySpec, side: str, cap: int,
                            label: str = "") -> IndexedSeries:
    """The one-variable series of each live residue class on one side of
    the family, with the class constant factored out.

    The reflected coefficient of the curve side is
    1/(Gamma(m) Gamma(1-m/2) prod_i Gamma(1-vi*m/(2*v0))); stepping m by
    2*v0 changes every argument by an integer, so within a class all
    coefficients are rational multiples of the seed, which is what the
    component constant kappa absorbs.  Classes where any argument hits a
    nonpositive integer vanish identically and are dropped.
    """
    (v0, v1, v2), (w0, w1, w2, w3) = _twist_data(fs)
    if side == "curve":
        half0, rest, period, var = v0, (v1, v2), 2 * v0, "qE"
    elif side == "k3":
        half0, rest, period, var = w0, (w1, w2, w3), 2 * w0, "qK"
    else:
        raise ValueError(f"unknown side {side!r}")

    def args(m: int):
        yield Q(1) - Q(m, 2)
        for u in rest:
            yield Q(1) - Q(u * m, period)

    def live(m: int) -> bool:
        return all(x.denominator != 1 or x > 0 for x in args(m))

    def step_ratio(m: int):
        ratio = QONE
        for j in range(period):
            ratio = ratio / (m + j)          # Gamma(m) block
        for x, drop in zip(args(m), (half0,) + rest):
            for j in range(1, drop + 1):
                ratio = ratio * (x - j)
        return ratio

    comps: Dict[str, Dict[Tuple, object]] = {}
    kappa: Dict[str, str] = {}
    for r in range(1, period):
        if not live(r):
            continue
        name = f"residue-{r}"
        kappa[name] = f"kappa[{r} mod {period}]"
        terms: Dict[Tuple, object] = {}
        value = QONE
        m = r
        while m <= cap:
            terms[(Q(m),)] = value
            value = value * step_ratio(m)
            m += period
        comps[name] = terms
    return IndexedSeries(
        params=(var,), steps=(QONE,), bounds=(Q(cap),),
        components=comps,
        label=label or f"twist{fs.weights}|{side}-sectors",
        kappa=kappa)


# -- mirror map --------------------------------------------------------------

def _box_keys(series_terms: Dict[Tuple, object]):
    return sorted(series_terms, key=lambda e: (sum(Q(x) for x in e), e))


def _series_mul(a: Dict[Tuple, object], b: Dict[Tuple, object],
                bounds) -> Dict[Tuple, object]:
    out: Dict[Tuple, object] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            if any(x > bb for x, bb in zip(e, bounds)):
                continue
            s = out.get(e, QZERO) + ca * cb
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
    return out


def _series_inverse(a: Dict[Tuple, object], bounds,
                    steps) -> Dict[Tuple, object]:
    n = len(bounds)
    zero = tuple(QZERO for _ in range(n))
    lead = a.get(zero)
    if lead != 1:
        raise ValueError("inversion needs a unit constant term")
    caps = [range(_floor(Q(b) / Q(s)) + 1) for b, s in zip(bounds, steps)]
    points = [zero]
    seen = {zero}
    for ticks in itertools.product(*caps):
        e = tuple(Q(t) * Q(s) for t, s in zip(ticks, steps))
        if e not in seen:
            points.append(e)
            seen.add(e)
    points.sort(key=lambda e: (sum(e), e))
    inv: Dict[Tuple, object] = {zero: QONE}
    for e in points[1:]:
        acc = QZERO
        for ea, ca in a.items():
            if ea == zero:
                continue
            rem = tuple(x - y for x, y in zip(e, ea))
            if any(x < 0 for x in rem):
                continue
            c = inv.get(rem)
            if c is not None:
                acc = acc + ca * c
        if acc != 0:
            inv[e] = -acc
    return inv


@dataclass(frozen=True)
class MirrorMapData:
    """Unit-normalized scalar part F, the per-direction correction series
    g with  tau = log(coordinate) + g/F, their quotients, and the
    recomputed z^1 part of the quotient series (the unit, by exactness of
    the truncated inversion)."""

    params: Tuple[str, ...]
    bounds: Tuple[object, ...]
    F: Dict[Tuple, object]
    g: Dict[str, Dict[Tuple, object]]
    tau: Dict[str, Dict[Tuple, object]]
    j_z1: Dict[Tuple, object]


def mirror_map(fs: FamilySpec, bounds, reading: str = "derived"
               ) -> MirrorMapData:
    """Split the first-order series into the scalar part and the two
    divisor-direction parts and normalize.

    F collects the plain-component values; each divisor direction
    contributes  F * log(coordinate) + g_direction, so the mirror map is
    log(coordinate) + g/F.  The z^1 part of the quotient is recomputed
    from the exact truncated inverse of F as a self-check."""
    series = build_series(fs, bounds, jet=1, reading=reading)
    values = series.components[UNTWISTED]
    zero = tuple(QZERO for _ in bounds)
    f0 = values.get(zero)
    if f0 != 1:
        raise ValueError("scalar part does not start with the unit term")
    derivs = series.derivatives[UNTWISTED]
    g = {"E": {}, "K": {}}
    for e, (de, dk) in derivs.items():
        if de != 0:
            g["E"][e] = de
        if dk != 0:
            g["K"][e] = dk
    inv = _series_inverse(values, series.bounds, series.steps)
    tau = {d: _series_mul(g[d], inv, series.bounds) for d in ("E", "K")}
    j_z1 = _series_mul(values, inv, series.bounds)
    return MirrorMapData(
        params=series.params, bounds=series.bounds,
        F=dict(values), g=g, tau=tau, j_z1=j_z1)

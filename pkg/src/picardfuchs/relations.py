"""Multi-parameter operators from local-ring relations.

A family with deformation monomials m_1..m_t has, at weighted degree k*d,
finitely many products prod m_i^{a_i} with sum(a_i) = k.  Any identity

    sum_a  c_a(params) * (realized product monomial)  =  0   mod J_Q

lifts to the order-k differential operator sum_a c_a * prod d_i^{a_i}
annihilating every period of the family.  This module enumerates the
products, finds the full relation space by exact linear algebra over the
normal-form coordinates, and converts relations to operators.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from .diffop import DiffOperator
from .family import FamilySpec
from .groebner import GroebnerBasis
from .scalars import ExactMatrix, ParamPolynomial, RationalFunction
from .wpoly import Exponent, WPolynomial

__all__ = [
    "MonomialProduct", "Relation", "enumerate_products", "find_relations",
    "verify_relation", "relation_to_operator", "rank_audit",
    "product_relation_operator",
]


@dataclass(frozen=True)
class MonomialProduct:
    """A multidegree over the deformation monomials and its realization."""

    multidegree: Tuple[int, ...]
    exponent: Exponent

    @property
    def level(self) -> int:
        return sum(self.multidegree)


def enumerate_products(fs: FamilySpec, level: int) -> List[MonomialProduct]:
    """All degree-`level` products of the deformation monomials, in
    descending graded-lex order of the multidegree."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    monos = [e for _, e in fs.deformations]
    t = len(monos)
    out: List[MonomialProduct] = []

    def rec(pos: int, left: int, acc: List[int]):
        if pos == t - 1:
            degs = acc + [left]
            exp = tuple(
                sum(degs[i] * monos[i][j] for i in range(t))
                for j in range(len(fs.variables)))
            out.append(MonomialProduct(tuple(degs), exp))
            return
        for a in range(left, -1, -1):
            rec(pos + 1, left - a, acc + [a])

    rec(0, level, [])
    return out


@dataclass(frozen=True)
class Relation:
    """A vanishing combination of same-level products, coefficients in
    Q[params].  Stored coefficient vectors are content-free with the
    leading (graded-lex first) nonzero coefficient sign-positive."""

    params: Tuple[str, ...]
    level: int
    coefficients: Tuple[Tuple[MonomialProduct, ParamPolynomial], ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("a relation needs at least one term")
        for prod, coeff in self.coefficients:
            if prod.level != self.level:
                raise ValueError(
                    f"product {prod.multidegree} has level {prod.level}, "
                    f"relation claims {self.level}")
            if coeff.params != self.params:
                raise ValueError("coefficient parameter mismatch")
            if coeff.is_zero:
                raise ValueError("zero coefficients must be omitted")

    def realize(self, ring) -> WPolynomial:
        """The combination as an ambient polynomial over Q[params]."""
        out = ring.zero()
        for prod, coeff in self.coefficients:
            out = out + ring.monomial(prod.exponent) * coeff
        return out

    @classmethod
    def from_coefficients(cls, params: Sequence[str], level: int,
                          coeffs: Dict[Tuple[int, ...], str],
                          fs: FamilySpec) -> "Relation":
        """Build from {multidegree: coefficient text}."""
        table = {p.multidegree: p for p in enumerate_products(fs, level)}
        pairs = []
        for deg, text in sorted(coeffs.items(), reverse=True):
            if deg not in table:
                raise ValueError(f"no product with multidegree {deg}")
            pairs.append((table[deg], ParamPolynomial.parse(text, tuple(params))))
        return cls(tuple(params), level, tuple(pairs))


def _coordinate_matrix(fs: FamilySpec, gb: GroebnerBasis, level: int
                       ) -> Tuple[List[MonomialProduct], ExactMatrix]:
    """Columns are the products' normal-form coordinates against the
    standard monomials of degree level*d."""
    products = enumerate_products(fs, level)
    ring = fs.ring()
    degree = level * fs.degree
    basis = gb.standard_monomials(degree)
    index = {e: i for i, e in enumerate(basis)}
    params = fs.parameters()
    zero = RationalFunction.const(params, 0)
    # Past the socle degree there are no standard monomials; reduction is
    # weighted-homogeneous, so every product reduces to zero and the matrix
    # is a zero row, no division needed.
    if not basis:
        return products, ExactMatrix(params, [[zero] * len(products)])
    entries = [[zero] * len(products) for _ in basis]
    for j, prod in enumerate(products):
        nf = gb.normal_form(ring.monomial(prod.exponent))
        for e, c in nf.remainder.terms.items():
            entries[index[e]][j] = RationalFunction(c, nf.scale)
    return products, ExactMatrix(params, entries)


def find_relations(fs: FamilySpec, gb: GroebnerBasis,
                   level: int) -> List[Relation]:
    """Basis of the relation space among the level-k products, via the
    exact nullspace of the normal-form coordinate matrix."""
    products, matrix = _coordinate_matrix(fs, gb, level)
    params = fs.parameters()
    out = []
    for vec in matrix.nullspace():
        pairs = tuple((p, c) for p, c in zip(products, vec) if not c.is_zero)
        out.append(Relation(params, level, pairs))
    return out


def verify_relation(rel: Relation, gb: GroebnerBasis
                    ) -> Tuple[bool, WPolynomial]:
    """Whether the realized combination reduces to zero; the residual
    normal form is returned either way."""
    residual = gb.normal_form(rel.realize(gb.ring)).remainder
    return residual.is_zero, residual


def relation_to_operator(rel: Relation) -> DiffOperator:
    """Swap each deformation monomial for the derivative in its parameter:
    coefficient c on multidegree a becomes the term c * prod d_i^{a_i}."""
    terms = {prod.multidegree: coeff for prod, coeff in rel.coefficients}
    return DiffOperator(rel.params, terms)


def rank_audit(fs: FamilySpec, gb: GroebnerBasis,
               level: int) -> Tuple[int, int, int]:
    """(product count, relation rank, product span dimension) at one level.
    The span dimension is count minus rank: how much of the local ring the
    products actually cover."""
    products, matrix = _coordinate_matrix(fs, gb, level)
    rank = matrix.rank()
    return len(products), len(products) - rank, rank


def product_relation_operator(names: Sequence[str],
                              exponents: Sequence[Exponent]) -> DiffOperator:
    """Operator from a multiplicative identity m1*m2 = m3^2 among three
    deformation monomials: d_1 d_2 - d_3^2."""
    if len(names) != 3 or len(exponents) != 3:
        raise ValueError("exactly three monomials are required")
    e1, e2, e3 = exponents
    if len(e1) != len(e2) or len(e2) != len(e3):
        raise ValueError("exponent lengths differ")
    if tuple(a + b for a, b in zip(e1, e2)) != tuple(2 * c for c in e3):
        raise ValueError(
            "monomials do not satisfy the product identity m1*m2 = m3^2")
    params = tuple(names)
    one = ParamPolynomial.const(params, 1)
    return DiffOperator(params, {(1, 1, 0): one, (0, 0, 2): -one})

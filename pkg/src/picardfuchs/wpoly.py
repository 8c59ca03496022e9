"""Weighted polynomial rings over Q(parameters).

A WeightedRing carries ring variables with positive integer weights plus a
tuple of deformation parameter names.  WPolynomial coefficients are
ParamPolynomial (never rational functions): all higher layers stay
fraction-free and track scalar denominators on the side.

The expression grammar shared by every text input in the package:

    expr     = ["-"] term { ("+" | "-") term }
    term     = factor { "*" factor }
    factor   = atom [ "^" integer ]
    atom     = rational | name | "(" expr ")"
    rational = integer [ "/" integer ]

Rational literals are single tokens; there is no division operator.
Exponents are non-negative integers.  Errors carry line and column.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .scalars import Exponent, ParamPolynomial, Q, QZERO


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


# -- lexer/parser ---------------------------------------------------------


class _Token:
    __slots__ = ("kind", "value", "line", "column")

    def __init__(self, kind, value, line, column):
        self.kind = kind
        self.value = value
        self.line = line
        self.column = column


def _tokenize(text: str) -> List[_Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch.isdigit():
            start, scol = i, col
            while i < n and text[i].isdigit():
                i += 1
                col += 1
            num = int(text[start:i])
            if i < n and text[i] == "/" and i + 1 < n and text[i + 1].isdigit():
                i += 1
                col += 1
                dstart = i
                while i < n and text[i].isdigit():
                    i += 1
                    col += 1
                tokens.append(_Token("number", Q(num, int(text[dstart:i])),
                                     line, scol))
            else:
                tokens.append(_Token("number", Q(num), line, scol))
            continue
        if ch.isalpha() or ch == "_":
            start, scol = i, col
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
                col += 1
            tokens.append(_Token("name", text[start:i], line, scol))
            continue
        if ch in "+-*^()":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("end", None, line, col))
    return tokens


class _Parser:
    """Recursive descent over the shared grammar.

    make_const and make_name produce values in the target algebra; the
    returned objects must support +, -, * and integer **.
    """

    def __init__(self, text: str, make_const, make_name):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.make_const = make_const
        self.make_name = make_name

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str) -> _Token:
        t = self.next()
        if t.kind != kind:
            raise ParseError(f"expected {kind!r}, found {t.value!r}",
                             t.line, t.column)
        return t

    def parse(self):
        value = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected trailing {t.value!r}", t.line, t.column)
        return value

    def expr(self):
        negate = False
        if self.peek().kind == "-":
            self.next()
            negate = True
        value = self.term()
        if negate:
            value = -value
        while self.peek().kind in ("+", "-"):
            op = self.next().kind
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.peek().kind == "*":
            self.next()
            value = value * self.factor()
        return value

    def factor(self):
        value = self.atom()
        if self.peek().kind == "^":
            self.next()
            t = self.next()
            if t.kind != "number" or t.value.denominator != 1 or t.value < 0:
                raise ParseError("exponent must be a non-negative integer",
                                 t.line, t.column)
            value = value ** int(t.value)
        return value

    def atom(self):
        t = self.next()
        if t.kind == "number":
            return self.make_const(t.value)
        if t.kind == "name":
            return self.make_name(t.value, t.line, t.column)
        if t.kind == "(":
            value = self.expr()
            self.expect(")")
            return value
        raise ParseError(f"unexpected {t.value!r}", t.line, t.column)


def parse_parameter_polynomial(text: str, params: Tuple[str, ...]) -> ParamPolynomial:
    def make_name(name, line, column):
        if name not in params:
            raise ParseError(f"unknown parameter {name!r}", line, column)
        return ParamPolynomial.var(params, name)

    return _Parser(text, lambda q: ParamPolynomial.const(params, q),
                   make_name).parse()


# -- rings ----------------------------------------------------------------


class WeightedRing:
    """Polynomial ring with weighted variables and named parameters."""

    __slots__ = ("vars", "weights", "params", "order")

    def __init__(self, variables: Sequence[str], weights: Sequence[int],
                 params: Sequence[str] = (), order: str = "grevlex"):
        self.vars = tuple(variables)
        self.weights = tuple(int(w) for w in weights)
        self.params = tuple(params)
        if len(self.vars) != len(self.weights):
            raise ValueError("one weight per variable required")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if len(set(self.vars) | set(self.params)) != len(self.vars) + len(self.params):
            raise ValueError("variable and parameter names must be distinct")
        if order not in ("grevlex", "grlex"):
            raise ValueError(f"unknown monomial order {order!r}")
        self.order = order

    def __eq__(self, other):
        if not isinstance(other, WeightedRing):
            return NotImplemented
        return (self.vars, self.weights, self.params, self.order) == (
            other.vars, other.weights, other.params, other.order)

    def __hash__(self):
        return hash((self.vars, self.weights, self.params, self.order))

    def __repr__(self):
        w = ", ".join(f"{v}:{k}" for v, k in zip(self.vars, self.weights))
        return f"WeightedRing({w}; params={','.join(self.params) or '-'})"

    # -- monomials -----------------------------------------------------

    def weighted_degree(self, exp: Exponent) -> int:
        return sum(w * e for w, e in zip(self.weights, exp))

    def order_key(self, exp: Exponent):
        d = self.weighted_degree(exp)
        if self.order == "grevlex":
            return (d, tuple(-exp[i] for i in range(len(exp) - 1, -1, -1)))
        return (d, exp)

    def monomials_of_degree(self, degree: int) -> List[Exponent]:
        """All exponent tuples of the given weighted degree, descending in
        the ring order."""
        out: List[Exponent] = []
        n = len(self.weights)

        def rec(i: int, remaining: int, prefix: List[int]):
            if i == n - 1:
                w = self.weights[i]
                if remaining % w == 0:
                    out.append(tuple(prefix + [remaining // w]))
                return
            w = self.weights[i]
            for e in range(remaining // w, -1, -1):
                rec(i + 1, remaining - w * e, prefix + [e])

        if degree >= 0:
            rec(0, degree, [])
        out.sort(key=self.order_key, reverse=True)
        return out

    def graded_dimension(self, degree: int) -> int:
        """Coefficient of t^degree in prod_i 1/(1 - t^w_i)."""
        if degree < 0:
            return 0
        counts = [0] * (degree + 1)
        counts[0] = 1
        for w in self.weights:
            for d in range(w, degree + 1):
                counts[d] += counts[d - w]
        return counts[degree]

    # -- element constructors --------------------------------------------

    def zero(self) -> "WPolynomial":
        return WPolynomial(self, {}, _trust=True)

    def const(self, value) -> "WPolynomial":
        c = value if isinstance(value, ParamPolynomial) else \
            ParamPolynomial.const(self.params, value)
        if c.is_zero:
            return self.zero()
        return WPolynomial(self, {(0,) * len(self.vars): c}, _trust=True)

    def var(self, name: str, exp: int = 1) -> "WPolynomial":
        if name not in self.vars:
            raise ValueError(f"unknown variable {name!r}")
        e = [0] * len(self.vars)
        e[self.vars.index(name)] = exp
        return WPolynomial(self, {tuple(e): ParamPolynomial.const(self.params, 1)},
                           _trust=True)

    def monomial(self, exp: Exponent, coeff=1) -> "WPolynomial":
        c = coeff if isinstance(coeff, ParamPolynomial) else \
            ParamPolynomial.const(self.params, coeff)
        if c.is_zero:
            return self.zero()
        return WPolynomial(self, {tuple(int(e) for e in exp): c}, _trust=True)

    def parse(self, text: str) -> "WPolynomial":
        def make_name(name, line, column):
            if name in self.vars:
                return self.var(name)
            if name in self.params:
                return self.const(ParamPolynomial.var(self.params, name))
            raise ParseError(f"unknown name {name!r}", line, column)

        return _Parser(text, self.const, make_name).parse()


class WPolynomial:
    """Element of a WeightedRing; terms map exponent tuples to nonzero
    ParamPolynomial coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: WeightedRing, terms: Dict[Exponent, ParamPolynomial],
                 _trust: bool = False):
        self.ring = ring
        if _trust:
            self.terms = terms
            return
        clean: Dict[Exponent, ParamPolynomial] = {}
        n = len(ring.vars)
        for exp, c in terms.items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent {exp}")
            if not isinstance(c, ParamPolynomial):
                c = ParamPolynomial.const(ring.params, c)
            if not c.is_zero:
                prev = clean.get(exp)
                s = c if prev is None else prev + c
                if s.is_zero:
                    clean.pop(exp, None)
                else:
                    clean[exp] = s
        self.terms = clean

    # -- predicates -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_quasi_homogeneous(self) -> bool:
        degrees = {self.ring.weighted_degree(e) for e in self.terms}
        return len(degrees) <= 1

    def weighted_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.weighted_degree(e) for e in self.terms)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> Optional["WPolynomial"]:
        if isinstance(other, WPolynomial):
            if other.ring != self.ring:
                raise ValueError("mixed rings")
            return other
        if isinstance(other, ParamPolynomial):
            return self.ring.const(other)
        try:
            return self.ring.const(Q(other))
        except TypeError:
            return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in other.terms.items():
            prev = terms.get(e)
            s = c if prev is None else prev + c
            if s.is_zero:
                terms.pop(e, None)
            else:
                terms[e] = s
        return WPolynomial(self.ring, terms, _trust=True)

    __radd__ = __add__

    def __neg__(self):
        return WPolynomial(self.ring, {e: -c for e, c in self.terms.items()},
                           _trust=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, WPolynomial):
            if other.ring != self.ring:
                raise ValueError("mixed rings")
            terms: Dict[Exponent, ParamPolynomial] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    p = c1 * c2
                    prev = terms.get(e)
                    s = p if prev is None else prev + p
                    if s.is_zero:
                        terms.pop(e, None)
                    else:
                        terms[e] = s
            return WPolynomial(self.ring, terms, _trust=True)
        if isinstance(other, ParamPolynomial):
            if other.is_zero:
                return self.ring.zero()
            return WPolynomial(self.ring,
                               {e: c * other for e, c in self.terms.items()},
                               _trust=True)
        try:
            q = Q(other)
        except TypeError:
            return NotImplemented
        if q == 0:
            return self.ring.zero()
        return WPolynomial(self.ring, {e: c * q for e, c in self.terms.items()},
                           _trust=True)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            if n > 1:
                base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, WPolynomial):
            return self.ring == other.ring and self.terms == other.terms
        return NotImplemented

    def __hash__(self):
        return hash((self.ring, frozenset((e, hash(c))
                                          for e, c in self.terms.items())))

    # -- structure ----------------------------------------------------

    def leading_exponent(self) -> Exponent:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=self.ring.order_key)

    def leading_coeff(self) -> ParamPolynomial:
        return self.terms[self.leading_exponent()]

    def monomials(self) -> Iterator[Tuple[Exponent, ParamPolynomial]]:
        """Terms in descending ring order."""
        for e in sorted(self.terms, key=self.ring.order_key, reverse=True):
            yield e, self.terms[e]

    def coeff_content(self):
        """Positive rational gcd over all coefficient contents."""
        c = QZERO
        for p in self.terms.values():
            c = _content_acc(c, p)
        return c

    def derivative(self, name: str) -> "WPolynomial":
        i = self.ring.vars.index(name)
        terms: Dict[Exponent, ParamPolynomial] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            terms[tuple(ne)] = c * e[i]
        return WPolynomial(self.ring, terms, _trust=True)

    def specialize_params(self, point: Dict[str, object]) -> "WPolynomial":
        """Substitute rational values for a subset of the parameters."""
        keep = tuple(p for p in self.ring.params if p not in point)
        new_ring = WeightedRing(self.ring.vars, self.ring.weights, keep,
                                self.ring.order)
        idx_keep = [i for i, p in enumerate(self.ring.params) if p not in point]
        idx_sub = [(i, Q(point[p])) for i, p in enumerate(self.ring.params)
                   if p in point]
        terms: Dict[Exponent, ParamPolynomial] = {}
        for e, c in self.terms.items():
            nt: Dict[Exponent, object] = {}
            for pe, q in c.terms.items():
                v = q
                for i, val in idx_sub:
                    if pe[i]:
                        v = v * val ** pe[i]
                if v == 0:
                    continue
                ne = tuple(pe[i] for i in idx_keep)
                nv = nt.get(ne, QZERO) + v
                if nv == 0:
                    nt.pop(ne, None)
                else:
                    nt[ne] = nv
            p = ParamPolynomial(keep, nt, _trust=True)
            if not p.is_zero:
                terms[e] = p
        return WPolynomial(new_ring, terms, _trust=True)

    # -- printing -------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for e, c in self.monomials():
            mono = "*".join(v if k == 1 else f"{v}^{k}"
                            for v, k in zip(self.ring.vars, e) if k)
            if not mono:
                piece = str(c) if len(c.terms) == 1 else f"({c})"
            elif c.is_constant and c.constant_value() == 1:
                piece = mono
            elif c.is_constant and c.constant_value() == -1:
                piece = f"-{mono}"
            elif len(c.terms) == 1:
                piece = f"{c}*{mono}"
            else:
                piece = f"({c})*{mono}"
            if bits and not piece.startswith("-"):
                bits.append("+" + piece)
            else:
                bits.append(piece)
        return "".join(bits)

    def __repr__(self):
        return f"WPolynomial({self})"


def _content_acc(acc, p: ParamPolynomial):
    from .scalars import q_gcd

    return q_gcd(acc, p.content())

"""Exact coefficient ring: multivariate polynomials over the rationals.

Everything in the symbolic layer computes with :class:`Poly` values, so that
group identities, Hopf axioms and golden expansions can be asserted exactly.
A plain rational is the degenerate case ``Poly.const(q)``.

Monomials are stored as sorted tuples of ``(symbol, exponent)`` pairs and the
polynomial itself as a sparse mapping monomial -> Fraction with no explicit
zeros.  The canonical text form sorts terms by total degree and then
lexicographically by symbol, with rationals printed as ``p/q``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple[tuple[str, int], ...]
Rat = Union[int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out: dict[str, int] = dict(a)
    for sym, exp in b:
        out[sym] = out.get(sym, 0) + exp
    return tuple(sorted((s, e) for s, e in out.items() if e != 0))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_key(m: Monomial):
    # total degree, then lexicographic on the expanded symbol string
    return (_mono_degree(m), tuple(s for s, e in m for _ in range(e)))


def _mono_str(m: Monomial) -> str:
    parts = []
    for sym, exp in m:
        parts.append(sym if exp == 1 else f"{sym}^{exp}")
    return "*".join(parts)


class Poly:
    """Immutable multivariate polynomial with exact rational coefficients."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Rat] | None = None):
        clean: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coeff in terms.items():
                c = Fraction(coeff)
                if c != 0:
                    clean[mono] = clean.get(mono, Fraction(0)) + c
                    if clean[mono] == 0:
                        del clean[mono]
        self.terms = clean
        self._hash: int | None = None

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(value: Rat) -> "Poly":
        v = Fraction(value)
        return Poly({(): v} if v != 0 else {})

    @staticmethod
    def symbol(name: str, exponent: int = 1) -> "Poly":
        if exponent == 0:
            return Poly.const(1)
        return Poly({((name, exponent),): Fraction(1)})

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly.const(1)

    @staticmethod
    def coerce(value: "Poly | Rat") -> "Poly":
        return value if isinstance(value, Poly) else Poly.const(value)

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Poly | Rat") -> "Poly":
        other = Poly.coerce(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coeff
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Poly | Rat") -> "Poly":
        return self + (-Poly.coerce(other))

    def __rsub__(self, other: "Poly | Rat") -> "Poly":
        return Poly.coerce(other) + (-self)

    def __mul__(self, other: "Poly | Rat") -> "Poly":
        other = Poly.coerce(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative powers are not defined in the polynomial ring")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- queries -------------------------------------------------------

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def const_value(self) -> Fraction:
        if not self.is_const():
            raise ValueError(f"not a constant: {self}")
        return self.terms.get((), Fraction(0))

    def symbols(self) -> set[str]:
        return {s for m in self.terms for s, _ in m}

    def degree_in(self, symbol: str) -> int:
        deg = 0
        for m in self.terms:
            for s, e in m:
                if s == symbol:
                    deg = max(deg, e)
        return deg

    def substitute(self, symbol: str, value: "Poly | Rat") -> "Poly":
        """Replace every occurrence of ``symbol`` by ``value``."""
        value = Poly.coerce(value)
        out = Poly.zero()
        for mono, coeff in self.terms.items():
            factor = Poly.const(coeff)
            for sym, exp in mono:
                factor = factor * (value**exp if sym == symbol else Poly.symbol(sym, exp))
            out = out + factor
        return out

    # -- rendering -----------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts: list[str] = []
        for mono in sorted(self.terms, key=_mono_key):
            coeff = self.terms[mono]
            sign = "-" if coeff < 0 else "+"
            mag = -coeff if coeff < 0 else coeff
            if not mono:
                body = str(mag)
            elif mag == 1:
                body = _mono_str(mono)
            else:
                body = f"{mag}*{_mono_str(mono)}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"Poly({self})"


_TOKEN = re.compile(r"\s*(?:(\d+/\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^|\*\*|[()+\-*]))")


def parse_poly(text: str) -> Poly:
    """Parse a polynomial expression such as ``"1 - 3/2*a*b^2 + c"``.

    Supports ``+ - * ^`` (or ``**``), integer/rational literals, symbol names
    and parentheses.  Juxtaposition is not implicit: write ``2*a``, not ``2a``.
    """
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"cannot tokenize polynomial at: {text[pos:]!r}")
            break
        tokens.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()

    def parse_expr(i: int) -> tuple[Poly, int]:
        val, i = parse_term(i)
        while i < len(tokens) and tokens[i] in "+-":
            op = tokens[i]
            rhs, i = parse_term(i + 1)
            val = val + rhs if op == "+" else val - rhs
        return val, i

    def parse_term(i: int) -> tuple[Poly, int]:
        val, i = parse_factor(i)
        while i < len(tokens) and tokens[i] == "*":
            rhs, i = parse_factor(i + 1)
            val = val * rhs
        return val, i

    def parse_factor(i: int) -> tuple[Poly, int]:
        if i >= len(tokens):
            raise ValueError("unexpected end of polynomial expression")
        tok = tokens[i]
        if tok == "-":
            val, i = parse_factor(i + 1)
            return -val, i
        if tok == "+":
            return parse_factor(i + 1)
        if tok == "(":
            val, i = parse_expr(i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise ValueError("unbalanced parenthesis in polynomial expression")
            i += 1
        elif re.fullmatch(r"\d+/\d+|\d+", tok):
            val = Poly.const(Fraction(tok))
            i += 1
        elif re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", tok):
            val = Poly.symbol(tok)
            i += 1
        else:
            raise ValueError(f"unexpected token {tok!r} in polynomial expression")
        if i < len(tokens) and tokens[i] in ("^", "**"):
            exp_tok = tokens[i + 1] if i + 1 < len(tokens) else None
            if exp_tok is None or not exp_tok.isdigit():
                raise ValueError("exponent must be a non-negative integer")
            val = val ** int(exp_tok)
            i += 2
        return val, i

    value, end = parse_expr(0)
    if end != len(tokens):
        raise ValueError(f"trailing tokens in polynomial expression: {tokens[end:]}")
    return value


def rand_rational(rng, num_range: int = 9, den_range: int = 5) -> Fraction:
    """Small random rational for property-style tests (den >= 1)."""
    return Fraction(rng.randint(-num_range, num_range), rng.randint(1, den_range))


def reduce_by_relation(p: Poly, relation: Poly, lead: Monomial) -> Poly:
    """Normal form of ``p`` modulo the principal ideal ``(relation)``.

    ``lead`` must be a monomial of ``relation`` with coefficient 1; every
    occurrence of ``lead`` (as a divisor) is rewritten via
    ``lead -> lead - relation``.  For the matrix coordinate rings used here
    (``ad - bc - 1`` with lead ``ad``; ``adt - bct - t... `` analog) this
    rewriting terminates and yields a canonical representative.
    """
    rest = Poly({m: -c for m, c in relation.terms.items() if m != lead})
    lead_dict = dict(lead)

    def divisible(m: Monomial) -> bool:
        md = dict(m)
        return all(md.get(s, 0) >= e for s, e in lead_dict.items())

    current = p
    while True:
        target = None
        for mono in current.terms:
            if divisible(mono):
                target = mono
                break
        if target is None:
            return current
        coeff = current.terms[target]
        quotient: Monomial = tuple(
            sorted(
                (s, e - lead_dict.get(s, 0))
                for s, e in target
                if e - lead_dict.get(s, 0) != 0
            )
        )
        # p  ->  p - c * quotient * (lead - rest)  replaces lead by rest
        current = current - Poly({target: coeff}) + Poly({quotient: coeff}) * rest

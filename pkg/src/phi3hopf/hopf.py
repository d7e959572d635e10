"""Graded connected commutative Hopf algebras and their character groups.

An instance bundles a generator universe with per-generator structure maps;
elements are sparse linear combinations of commutative monomials in the
generators, with coefficients in the exact polynomial ring.  The antipode is
computed generically from the five-term identity on graded connected
instances and from closed forms on the matrix coordinate rings, where a
polynomial relation (``ad - bc = 1`` and its GL2 variant) is handled by
normal-form rewriting after every product.

Concrete instances built here: the unshuffle algebra of the additive affine
group, the symmetric-function algebra dual to invertible series, the Faa di
Bruno algebra dual to formal diffeomorphisms, and the SL2/GL2 coordinate
rings.  The Connes-Kreimer instance on Feynman graphs is registered by
:mod:`phi3hopf.ckhopf` using the same machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .ring import Poly, Rat, reduce_by_relation

Token = Hashable  # a generator; must be hashable and sortable via sort_key
Monomial = tuple  # sorted tuple of tokens


class HopfInstance:
    """A commutative Hopf algebra presented by generators and structure rules.

    Parameters
    ----------
    name:
        Identifier used in reports and error messages.
    grade:
        Map token -> non-negative integer.  Graded connected instances have
        all generator grades >= 1; only those support the recursive antipode.
    coproduct:
        Map token -> list of ((mono, mono), coefficient) tensor terms.
    counit:
        Map token -> coefficient (0 for connected instances).
    antipode:
        Optional closed form, token -> HopfElement; when absent the five-term
        recursion is used (requires graded connected).
    generators_up_to:
        Enumerate the generator tokens of grade <= g (all generators for the
        finite matrix instances).
    relation:
        Optional (polynomial, lead monomial) pair; products are reduced to a
        normal form modulo the principal ideal it generates.  Tokens must be
        plain strings in that case.
    """

    def __init__(
        self,
        name: str,
        grade: Callable[[Token], int],
        coproduct: Callable[[Token], list],
        counit: Callable[[Token], Poly],
        generators_up_to: Callable[[int], list],
        antipode: Callable[[Token], "HopfElement"] | None = None,
        relation: tuple[Poly, tuple] | None = None,
        cocommutative: bool = False,
        series_kind: str | None = None,
        sort_key: Callable[[Token], object] | None = None,
    ):
        self.name = name
        self.grade = grade
        self._coproduct_rule = coproduct
        self._counit_rule = counit
        self.generators_up_to = generators_up_to
        self._antipode_rule = antipode
        self.relation = relation
        self.cocommutative = cocommutative
        self.series_kind = series_kind
        self.sort_key = sort_key or (lambda t: t)
        self._antipode_memo: dict[Token, HopfElement] = {}

    # -- elements -------------------------------------------------------

    def zero(self) -> "HopfElement":
        return HopfElement(self, {})

    def one(self) -> "HopfElement":
        return HopfElement(self, {(): Poly.one()})

    def gen(self, token: Token) -> "HopfElement":
        return HopfElement(self, {(token,): Poly.one()})

    def monomial(self, tokens: Iterable[Token], coeff: Poly | Rat = 1) -> "HopfElement":
        mono = tuple(sorted(tokens, key=self.sort_key))
        return HopfElement(self, {mono: Poly.coerce(coeff)})

    def mono_grade(self, mono: Monomial) -> int:
        return sum(self.grade(t) for t in mono)

    def _normalize(self, terms: dict[Monomial, Poly]) -> dict[Monomial, Poly]:
        """Sort monomials and, with a relation present, rewrite to normal form."""
        out: dict[Monomial, Poly] = {}
        for mono, coeff in terms.items():
            if not coeff:
                continue
            if self.relation is None:
                key = tuple(sorted(mono, key=self.sort_key))
                out[key] = out.get(key, Poly.zero()) + coeff
                continue
            acc = Poly.coerce(coeff)
            for tok in mono:
                acc = acc * Poly.symbol(tok)
            reduced = reduce_by_relation(acc, *self.relation)
            for rmono, rcoeff in reduced.terms.items():
                tokens = tuple(
                    sorted((s for s, e in rmono for _ in range(e)), key=self.sort_key)
                )
                out[tokens] = out.get(tokens, Poly.zero()) + rcoeff
        return {m: c for m, c in out.items() if c}

    # -- structure maps ---------------------------------------------------

    def coproduct_token(self, token: Token) -> "TensorElement":
        terms: dict[tuple[Monomial, Monomial], Poly] = {}
        for (left, right), coeff in self._coproduct_rule(token):
            key = (
                tuple(sorted(left, key=self.sort_key)),
                tuple(sorted(right, key=self.sort_key)),
            )
            terms[key] = terms.get(key, Poly.zero()) + Poly.coerce(coeff)
        return TensorElement(self, terms)

    def antipode_token(self, token: Token) -> "HopfElement":
        if token in self._antipode_memo:
            return self._antipode_memo[token]
        if self._antipode_rule is not None:
            result = self._antipode_rule(token)
        else:
            if self.grade(token) < 1:
                raise ValueError(
                    f"{self.name}: recursive antipode needs a connected grading"
                )
            # five-term recursion: S(x) = -x - sum S(x') x'' over the reduced coproduct
            result = -self.gen(token)
            for (left, right), coeff in self.coproduct_token(token).terms.items():
                if self.mono_grade(left) == 0 or self.mono_grade(right) == 0:
                    continue
                s_left = antipode(self.monomial(left))
                result = result - (s_left * self.monomial(right)) * coeff
        self._antipode_memo[token] = result
        return result


class HopfElement:
    """Sparse linear combination of commutative generator monomials."""

    __slots__ = ("instance", "terms")

    def __init__(self, instance: HopfInstance, terms: dict[Monomial, Poly]):
        self.instance = instance
        self.terms = instance._normalize(terms)

    def __add__(self, other: "HopfElement") -> "HopfElement":
        self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Poly.zero()) + c
        return HopfElement(self.instance, out)

    def __sub__(self, other: "HopfElement") -> "HopfElement":
        return self + (-other)

    def __neg__(self) -> "HopfElement":
        return HopfElement(self.instance, {m: -c for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Poly)) or not isinstance(other, HopfElement):
            coeff = Poly.coerce(other)
            return HopfElement(self.instance, {m: c * coeff for m, c in self.terms.items()})
        self._check(other)
        out: dict[Monomial, Poly] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = tuple(sorted(m1 + m2, key=self.instance.sort_key))
                out[key] = out.get(key, Poly.zero()) + c1 * c2
        return HopfElement(self.instance, out)

    __rmul__ = __mul__

    def _check(self, other: "HopfElement") -> None:
        if self.instance is not other.instance:
            raise ValueError(
                f"instance mismatch: {self.instance.name} vs {other.instance.name}"
            )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HopfElement):
            return NotImplemented
        return self.instance is other.instance and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset((m, c) for m, c in self.terms.items()))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        rendered = []
        for mono in sorted(
            self.terms, key=lambda m: (self.instance.mono_grade(m), tuple(map(str, m)))
        ):
            coeff = self.terms[mono]
            body = "*".join(str(t) for t in mono) if mono else "1"
            rendered.append(f"({coeff})·{body}")
        return " + ".join(rendered)

    __repr__ = __str__

    def to_json(self) -> str:
        import json

        terms = [
            {"monomial": [str(t) for t in mono], "coefficient": str(coeff)}
            for mono, coeff in sorted(
                self.terms.items(),
                key=lambda kv: (self.instance.mono_grade(kv[0]), tuple(map(str, kv[0]))),
            )
        ]
        return json.dumps({"instance": self.instance.name, "terms": terms})


class TensorElement:
    """Sparse element of H (x) H with monomial pairs as keys."""

    __slots__ = ("instance", "terms")

    def __init__(self, instance: HopfInstance, terms: dict[tuple[Monomial, Monomial], Poly]):
        clean: dict[tuple[Monomial, Monomial], Poly] = {}
        for (l, r), c in terms.items():
            # normalize each slot (sorting + relation reduction) via HopfElement
            if not c:
                continue
            left_elem = HopfElement(instance, {l: Poly.one()})
            right_elem = HopfElement(instance, {r: Poly.one()})
            for lm, lc in left_elem.terms.items():
                for rm, rc in right_elem.terms.items():
                    key = (lm, rm)
                    clean[key] = clean.get(key, Poly.zero()) + c * lc * rc
        self.instance = instance
        self.terms = {k: v for k, v in clean.items() if v}

    @staticmethod
    def unit(instance: HopfInstance) -> "TensorElement":
        return TensorElement(instance, {((), ()): Poly.one()})

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, Poly.zero()) + c
        return TensorElement(self.instance, out)

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (other * Poly.const(-1))

    def __mul__(self, other):
        if isinstance(other, (int, Poly)) or not isinstance(other, TensorElement):
            coeff = Poly.coerce(other)
            return TensorElement(self.instance, {k: c * coeff for k, c in self.terms.items()})
        sk = self.instance.sort_key
        out: dict[tuple[Monomial, Monomial], Poly] = {}
        for (l1, r1), c1 in self.terms.items():
            for (l2, r2), c2 in other.terms.items():
                key = (tuple(sorted(l1 + l2, key=sk)), tuple(sorted(r1 + r2, key=sk)))
                out[key] = out.get(key, Poly.zero()) + c1 * c2
        return TensorElement(self.instance, out)

    __rmul__ = __mul__

    def swap(self) -> "TensorElement":
        return TensorElement(self.instance, {(r, l): c for (l, r), c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.instance is other.instance and self.terms == other.terms

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (l, r) in sorted(self.terms, key=lambda k: tuple(map(str, k))):
            c = self.terms[(l, r)]
            fmt = lambda m: "*".join(str(t) for t in m) if m else "1"
            parts.append(f"({c})·{fmt(l)}⊗{fmt(r)}")
        return " + ".join(parts)

    __repr__ = __str__


# -- structure operations on elements ----------------------------------------


def coproduct(x: HopfElement) -> TensorElement:
    """Multiplicative extension of the per-generator coproduct rule."""
    inst = x.instance
    total: dict[tuple[Monomial, Monomial], Poly] = {}
    for mono, coeff in x.terms.items():
        acc = TensorElement.unit(inst)
        for token in mono:
            acc = acc * inst.coproduct_token(token)
        for key, c in acc.terms.items():
            total[key] = total.get(key, Poly.zero()) + coeff * c
    return TensorElement(inst, total)


def counit(x: HopfElement) -> Poly:
    inst = x.instance
    total = Poly.zero()
    for mono, coeff in x.terms.items():
        val = Poly.one()
        for token in mono:
            val = val * inst._counit_rule(token)
            if not val:
                break
        total = total + coeff * val
    return total


def antipode(x: HopfElement) -> HopfElement:
    """S extended multiplicatively (the algebra is commutative)."""
    inst = x.instance
    total = inst.zero()
    for mono, coeff in x.terms.items():
        acc = inst.one()
        for token in mono:
            acc = acc * inst.antipode_token(token)
        total = total + acc * coeff
    return total


def mul_tensor(t: TensorElement) -> HopfElement:
    """The multiplication map m: H (x) H -> H applied slotwise."""
    inst = t.instance
    out: dict[Monomial, Poly] = {}
    sk = inst.sort_key
    for (l, r), c in t.terms.items():
        key = tuple(sorted(l + r, key=sk))
        out[key] = out.get(key, Poly.zero()) + c
    return HopfElement(inst, out)


def coproduct_left(t: TensorElement) -> dict:
    """(Delta (x) Id) applied to a tensor element; keys are monomial triples."""
    out: dict[tuple[Monomial, Monomial, Monomial], Poly] = {}
    inst = t.instance
    for (l, r), c in t.terms.items():
        inner = coproduct(HopfElement(inst, {l: Poly.one()}))
        for (a, b), c2 in inner.terms.items():
            key = (a, b, r)
            out[key] = out.get(key, Poly.zero()) + c * c2
    return {k: v for k, v in out.items() if v}


def coproduct_right(t: TensorElement) -> dict:
    """(Id (x) Delta) applied to a tensor element."""
    out: dict[tuple[Monomial, Monomial, Monomial], Poly] = {}
    inst = t.instance
    for (l, r), c in t.terms.items():
        inner = coproduct(HopfElement(inst, {r: Poly.one()}))
        for (b, cm), c2 in inner.terms.items():
            key = (l, b, cm)
            out[key] = out.get(key, Poly.zero()) + c * c2
    return {k: v for k, v in out.items() if v}


# -- characters ---------------------------------------------------------------


class Character:
    """Unital algebra morphism from a Hopf instance into the coefficient ring.

    Defined by its values on generators (a callable), extended
    multiplicatively; values are memoized per token.
    """

    def __init__(self, instance: HopfInstance, rule: Callable[[Token], Poly], name: str = ""):
        self.instance = instance
        self._rule = rule
        self.name = name
        self._memo: dict[Token, Poly] = {}

    @staticmethod
    def from_values(instance: HopfInstance, values: dict, name: str = "") -> "Character":
        def rule(token):
            if token not in values:
                raise KeyError(f"character {name!r} has no value for generator {token}")
            return Poly.coerce(values[token])

        return Character(instance, rule, name)

    def on_token(self, token: Token) -> Poly:
        if token not in self._memo:
            self._memo[token] = Poly.coerce(self._rule(token))
        return self._memo[token]

    def __call__(self, x: HopfElement | TensorElement) -> Poly:
        if isinstance(x, TensorElement):
            total = Poly.zero()
            for (l, r), c in x.terms.items():
                total = total + c * self._on_monomial(l) * self._on_monomial(r)
            return total
        total = Poly.zero()
        for mono, coeff in x.terms.items():
            total = total + coeff * self._on_monomial(mono)
        return total

    def _on_monomial(self, mono: Monomial) -> Poly:
        val = Poly.one()
        for token in mono:
            val = val * self.on_token(token)
        return val


def counit_character(instance: HopfInstance) -> Character:
    return Character(instance, lambda token: instance._counit_rule(token), name="counit")


def convolve(alpha: Character, beta: Character) -> Character:
    """(alpha * beta)(x) = sum alpha(x_(1)) beta(x_(2)) via the coproduct."""
    if alpha.instance is not beta.instance:
        raise ValueError("convolution needs characters on the same instance")
    inst = alpha.instance

    def rule(token):
        total = Poly.zero()
        for (l, r), c in inst.coproduct_token(token).terms.items():
            total = total + c * alpha._on_monomial(l) * beta._on_monomial(r)
        return total

    return Character(inst, rule, name=f"({alpha.name} * {beta.name})")


def char_inverse(alpha: Character) -> Character:
    """Convolution inverse alpha o S."""
    inst = alpha.instance
    return Character(inst, lambda token: alpha(antipode(inst.gen(token))), name=f"{alpha.name}^-1")


def character_series(alpha: Character, order: int):
    """Realize a character as a truncated series via x_n -> coefficient n.

    Works for instances that declare a series realization: symmetric
    functions (invertible series) and Faa di Bruno (formal diffeomorphisms).
    """
    from .series import TruncatedSeries

    if alpha.instance.series_kind not in ("inv", "diff"):
        raise ValueError(f"instance {alpha.instance.name!r} has no series realization")
    coeffs = [Poly.one()]
    for n in range(1, order + 1):
        coeffs.append(alpha.on_token(("x", n)))
    return TruncatedSeries(order, coeffs, alpha.instance.series_kind)


def series_character(instance: HopfInstance, series) -> Character:
    """Inverse of :func:`character_series`: x_n -> n-th coefficient."""
    if instance.series_kind != series.kind:
        raise ValueError(f"series kind {series.kind!r} does not match {instance.name!r}")

    def rule(token):
        _, n = token
        if n > series.order:
            raise KeyError(f"series order {series.order} too small for x_{n}")
        return series.coeffs[n]

    return Character(instance, rule, name="series")


# -- axiom checks ---------------------------------------------------------------


def check_hopf_axioms(instance: HopfInstance, max_grade: int) -> dict:
    """Verify the Hopf axioms on all generators up to ``max_grade``.

    Returns a report {axiom: {generator: bool}} plus an ``"all_pass"`` flag.
    ``S o S = Id`` is asserted only when the instance declares itself
    cocommutative (for commutative-and-cocommutative algebras the antipode is
    an involution).
    """
    report: dict = {
        "instance": instance.name,
        "coassociativity": {},
        "counit": {},
        "five_term": {},
        "antipode_involutive": {},
    }
    eps = counit_character(instance)
    for token in instance.generators_up_to(max_grade):
        x = instance.gen(token)
        dx = coproduct(x)
        report["coassociativity"][str(token)] = coproduct_left(dx) == coproduct_right(dx)

        left = instance.zero()
        right = instance.zero()
        for (l, r), c in dx.terms.items():
            left = left + instance.monomial(l) * (c * eps._on_monomial(r))
            right = right + instance.monomial(r) * (c * eps._on_monomial(l))
        report["counit"][str(token)] = left == x and right == x

        s_left = instance.zero()
        s_right = instance.zero()
        for (l, r), c in dx.terms.items():
            s_left = s_left + (antipode(instance.monomial(l)) * instance.monomial(r)) * c
            s_right = s_right + (instance.monomial(l) * antipode(instance.monomial(r))) * c
        target = instance.one() * counit(x)
        report["five_term"][str(token)] = s_left == target and s_right == target

        if instance.cocommutative:
            report["antipode_involutive"][str(token)] = antipode(antipode(x)) == x

    report["all_pass"] = all(
        ok for axiom in ("coassociativity", "counit", "five_term", "antipode_involutive")
        for ok in report[axiom].values()
    )
    return report


def is_cocommutative_on(instance: HopfInstance, max_grade: int) -> tuple[bool, Token | None]:
    """Check Delta = swap o Delta on generators; returns (ok, witness)."""
    for token in instance.generators_up_to(max_grade):
        d = instance.coproduct_token(token)
        if d != d.swap():
            return False, token
    return True, None


# -- concrete instances ---------------------------------------------------------


def _xkey(token) -> tuple:
    return (token[1],)


def unshuffle_instance(num_symbols: int = 6) -> HopfInstance:
    """Coordinate ring of the additive group: all generators primitive."""

    def coproduct(token):
        return [(((token,), ()), 1), (((), (token,)), 1)]

    return HopfInstance(
        name="unshuffle",
        grade=lambda token: 1,
        coproduct=coproduct,
        counit=lambda token: Poly.zero(),
        generators_up_to=lambda g: [("x", i) for i in range(1, num_symbols + 1)],
        cocommutative=True,
        sort_key=_xkey,
    )


def symmetric_functions_instance(max_degree: int = 12) -> HopfInstance:
    """Coordinate ring of invertible series; Delta x_n = sum x_k (x) x_{n-k}."""

    def coproduct(token):
        _, n = token
        terms = []
        for k in range(n + 1):
            left = (("x", k),) if k else ()
            right = (("x", n - k),) if n - k else ()
            terms.append(((left, right), 1))
        return terms

    return HopfInstance(
        name="symmetric-functions",
        grade=lambda token: token[1],
        coproduct=coproduct,
        counit=lambda token: Poly.zero(),
        generators_up_to=lambda g: [("x", i) for i in range(1, min(g, max_degree) + 1)],
        cocommutative=True,
        series_kind="inv",
        sort_key=_xkey,
    )


def faa_di_bruno_instance(max_degree: int = 12) -> HopfInstance:
    """Coordinate ring of formal diffeomorphisms under composition."""

    def coproduct(token):
        _, n = token
        terms = [(((("x", n),), ()), 1), (((), (("x", n),)), 1)]
        for m in range(1, n):
            # inner sum over compositions p_0 + ... + p_m = n - m with p_i >= 0
            for comp in _weak_compositions(n - m, m + 1):
                right = tuple(("x", p) for p in comp if p)
                terms.append((((("x", m),), right), 1))
        return terms

    return HopfInstance(
        name="faa-di-bruno",
        grade=lambda token: token[1],
        coproduct=coproduct,
        counit=lambda token: Poly.zero(),
        generators_up_to=lambda g: [("x", i) for i in range(1, min(g, max_degree) + 1)],
        cocommutative=False,
        series_kind="diff",
        sort_key=_xkey,
    )


def _weak_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


_SL2_COPRODUCT = {
    "a": [((("a",), ("a",)), 1), ((("b",), ("c",)), 1)],
    "b": [((("a",), ("b",)), 1), ((("b",), ("d",)), 1)],
    "c": [((("c",), ("a",)), 1), ((("d",), ("c",)), 1)],
    "d": [((("c",), ("b",)), 1), ((("d",), ("d",)), 1)],
}
_SL2_COUNIT = {"a": 1, "b": 0, "c": 0, "d": 1}


def sl2_instance() -> HopfInstance:
    """Coordinate ring of SL(2): C[a,b,c,d] / (ad - bc - 1), matrix coproduct."""
    relation = (
        Poly.symbol("a") * Poly.symbol("d") - Poly.symbol("b") * Poly.symbol("c") - 1,
        (("a", 1), ("d", 1)),
    )
    antipode_map = {"a": "d", "d": "a"}

    inst = HopfInstance(
        name="sl2",
        grade=lambda token: 1,
        coproduct=lambda token: _SL2_COPRODUCT[token],
        counit=lambda token: Poly.const(_SL2_COUNIT[token]),
        generators_up_to=lambda g: ["a", "b", "c", "d"],
        relation=relation,
    )

    def antipode_rule(token):
        if token in antipode_map:
            return inst.gen(antipode_map[token])
        return -inst.gen(token)  # S(b) = -b, S(c) = -c

    inst._antipode_rule = antipode_rule
    return inst


def gl2_instance() -> HopfInstance:
    """Coordinate ring of GL(2) with the inverse determinant t adjoined."""
    relation = (
        (Poly.symbol("a") * Poly.symbol("d") - Poly.symbol("b") * Poly.symbol("c"))
        * Poly.symbol("t")
        - 1,
        (("a", 1), ("d", 1), ("t", 1)),
    )

    def coproduct(token):
        if token == "t":
            return [((("t",), ("t",)), 1)]
        return _SL2_COPRODUCT[token]

    def counit(token):
        if token == "t":
            return Poly.one()
        return Poly.const(_SL2_COUNIT[token])

    inst = HopfInstance(
        name="gl2",
        grade=lambda token: 1,
        coproduct=coproduct,
        counit=counit,
        generators_up_to=lambda g: ["a", "b", "c", "d", "t"],
        relation=relation,
    )

    def antipode_rule(token):
        det = inst.gen("a") * inst.gen("d") - inst.gen("b") * inst.gen("c")
        table = {
            "a": inst.gen("d") * inst.gen("t"),
            "b": -inst.gen("b") * inst.gen("t"),
            "c": -inst.gen("c") * inst.gen("t"),
            "d": inst.gen("a") * inst.gen("t"),
            "t": det,
        }
        return table[token]

    inst._antipode_rule = antipode_rule
    return inst


_instances: dict[str, HopfInstance] = {}


def get_instance(name: str) -> HopfInstance:
    """Shared registry of the standard instances (built on first use)."""
    if name not in _instances:
        builders = {
            "unshuffle": unshuffle_instance,
            "symmetric-functions": symmetric_functions_instance,
            "faa-di-bruno": faa_di_bruno_instance,
            "sl2": sl2_instance,
            "gl2": gl2_instance,
        }
        if name not in builders:
            raise KeyError(f"unknown Hopf instance {name!r}")
        _instances[name] = builders[name]()
    return _instances[name]

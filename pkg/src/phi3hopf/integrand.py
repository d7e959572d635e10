"""Symbolic integrands: expression DAGs over momentum vectors.

Nodes are hash-consed immutable records over a fixed momentum basis (loop
momenta first, then independent external momenta); the only vector-valued
primitive is the scalar product of two integer affine combinations of basis
vectors.  On top of that sit rational constants, sums, products and integer
powers, which is exactly enough for products of propagators
1/(l^2 + m^2), counterterm factors (l^2)^k and their Taylor expansions.

The Taylor operator scales a designated subset of basis vectors by t and
extracts exact coefficient DAGs of t^r; subtraction of the degree-w
polynomial implements the momentum-space subtraction scheme on integrands,
with symbolic differentiation only (no numeric differencing).  Odd-order
coefficients are kept: their integrals vanish by parity but their presence
controls the pointwise decay of subtracted integrands.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple[int, ...]  # integer coefficients over the momentum basis


# -- node kinds -------------------------------------------------------------


class Node:
    """Interned DAG node: equal structure implies identical object."""

    __slots__ = ("op", "value", "vec_a", "vec_b", "children", "exponent")

    _table: dict = {}

    def __new__(cls, op, value=None, vec_a=None, vec_b=None, children=(), exponent=0):
        key = (op, value, vec_a, vec_b, tuple(id(c) for c in children), exponent)
        cached = cls._table.get(key)
        if cached is not None:
            return cached
        self = super().__new__(cls)
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "vec_a", vec_a)
        object.__setattr__(self, "vec_b", vec_b)
        object.__setattr__(self, "children", tuple(children))
        object.__setattr__(self, "exponent", exponent)
        cls._table[key] = self
        return self

    def __setattr__(self, *_):
        raise AttributeError("Node is immutable")

    def __repr__(self) -> str:
        return pretty(self)


_ZERO = Node("const", value=Fraction(0))
_ONE = Node("const", value=Fraction(1))


def const(value) -> Node:
    v = Fraction(value)
    if v == 0:
        return _ZERO
    if v == 1:
        return _ONE
    return Node("const", value=v)


def dot(a: Vec, b: Vec) -> Node:
    if not any(a) or not any(b):
        return _ZERO
    if b < a:
        a, b = b, a
    return Node("dot", vec_a=tuple(a), vec_b=tuple(b))


def add(*terms: Node) -> Node:
    flat: list[Node] = []
    c = Fraction(0)
    for t in terms:
        if t.op == "const":
            c += t.value
        elif t.op == "add":
            for ch in t.children:
                if ch.op == "const":
                    c += ch.value
                else:
                    flat.append(ch)
        else:
            flat.append(t)
    if c != 0:
        flat.append(const(c))
    if not flat:
        return _ZERO
    if len(flat) == 1:
        return flat[0]
    return Node("add", children=tuple(flat))


def mul(*factors: Node) -> Node:
    flat: list[Node] = []
    c = Fraction(1)
    for f in factors:
        if f.op == "const":
            c *= f.value
            if c == 0:
                return _ZERO
        elif f.op == "mul":
            for ch in f.children:
                if ch.op == "const":
                    c *= ch.value
                else:
                    flat.append(ch)
        else:
            flat.append(f)
    if c == 0:
        return _ZERO
    if c != 1:
        flat.insert(0, const(c))
    if not flat:
        return _ONE
    if len(flat) == 1:
        return flat[0]
    return Node("mul", children=tuple(flat))


def powi(base: Node, k: int) -> Node:
    if k == 0:
        return _ONE
    if k == 1:
        return base
    if base.op == "const":
        if base.value == 0 and k < 0:
            raise ZeroDivisionError("0**negative in integrand")
        return const(base.value**k)
    if base.op == "pow":
        return powi(base.children[0], base.exponent * k)
    return Node("pow", children=(base,), exponent=k)


def neg(node: Node) -> Node:
    return mul(const(-1), node)


def sub(a: Node, b: Node) -> Node:
    return add(a, neg(b))


def propagator(momentum: Vec, mass_sq=1) -> Node:
    """1 / (l^2 + m^2); masses are in units of m (m = 1 internally)."""
    return powi(add(dot(momentum, momentum), const(mass_sq)), -1)


# -- rendering ---------------------------------------------------------------


def pretty(node: Node, basis_names: Sequence[str] | None = None) -> str:
    """Normalized product-of-factors text form, for golden files."""

    def vec_str(v: Vec) -> str:
        names = basis_names or [f"b{i}" for i in range(len(v))]
        parts = []
        for coeff, name in zip(v, names):
            if coeff == 0:
                continue
            if coeff == 1:
                parts.append(f"+{name}")
            elif coeff == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{coeff:+d}*{name}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    def go(n: Node) -> str:
        if n.op == "const":
            return str(n.value)
        if n.op == "dot":
            if n.vec_a == n.vec_b:
                return f"({vec_str(n.vec_a)})^2"
            return f"({vec_str(n.vec_a)}).({vec_str(n.vec_b)})"
        if n.op == "add":
            return "(" + " + ".join(go(c) for c in n.children) + ")"
        if n.op == "mul":
            return " * ".join(go(c) for c in n.children)
        if n.op == "pow":
            return f"[{go(n.children[0])}]^{n.exponent}"
        raise ValueError(n.op)

    return go(node)


# -- Taylor machinery ----------------------------------------------------------


def _split_vec(v: Vec, scaled: frozenset[int]) -> tuple[Vec, Vec]:
    kept = tuple(0 if i in scaled else c for i, c in enumerate(v))
    scl = tuple(c if i in scaled else 0 for i, c in enumerate(v))
    return kept, scl


def taylor_coefficients(node: Node, scaled: Iterable[int], order: int) -> list[Node]:
    """Exact coefficient DAGs of t^0..t^order after scaling basis components.

    Scaling the basis vectors indexed by ``scaled`` as v -> t v makes every
    dot product quadratic in t; sums, products and integer powers propagate
    coefficients by linearity, Cauchy products, and the reciprocal recursion
    h_0 = 1/g_0, h_r = -h_0 * sum_{j>=1} g_j h_{r-j} for negative powers.
    """
    scaled_set = frozenset(scaled)
    memo: dict[Node, list[Node]] = {}

    def conv(a: list[Node], b: list[Node]) -> list[Node]:
        out = [_ZERO] * (order + 1)
        for i, ai in enumerate(a):
            if ai is _ZERO:
                continue
            for j, bj in enumerate(b):
                if i + j > order:
                    break
                if bj is not _ZERO:
                    out[i + j] = add(out[i + j], mul(ai, bj))
        return out

    def recip(g: list[Node]) -> list[Node]:
        h = [_ZERO] * (order + 1)
        h[0] = powi(g[0], -1)
        for r in range(1, order + 1):
            acc = _ZERO
            for j in range(1, r + 1):
                if g[j] is not _ZERO and h[r - j] is not _ZERO:
                    acc = add(acc, mul(g[j], h[r - j]))
            h[r] = neg(mul(h[0], acc))
        return h

    def go(n: Node) -> list[Node]:
        if n in memo:
            return memo[n]
        if n.op == "const":
            out = [n] + [_ZERO] * order
        elif n.op == "dot":
            a0, a1 = _split_vec(n.vec_a, scaled_set)
            b0, b1 = _split_vec(n.vec_b, scaled_set)
            out = [_ZERO] * (order + 1)
            out[0] = dot(a0, b0)
            if order >= 1:
                out[1] = add(dot(a0, b1), dot(a1, b0))
            if order >= 2:
                out[2] = dot(a1, b1)
            # degree-2 part beyond requested order is simply truncated
        elif n.op == "add":
            out = [_ZERO] * (order + 1)
            for child in n.children:
                for r, c in enumerate(go(child)):
                    if c is not _ZERO:
                        out[r] = add(out[r], c)
        elif n.op == "mul":
            out = [_ONE] + [_ZERO] * order
            for child in n.children:
                out = conv(out, go(child))
        elif n.op == "pow":
            g = go(n.children[0])
            k = n.exponent
            if k < 0:
                g = recip(g)
                k = -k
            out = [_ONE] + [_ZERO] * order
            for _ in range(k):
                out = conv(out, g)
        else:
            raise ValueError(n.op)
        memo[n] = out
        return out

    return go(node)


def taylor_polynomial(node: Node, scaled: Iterable[int], order: int) -> Node:
    """T^order[node]: the Taylor polynomial in the scaled momenta, as a DAG."""
    return add(*taylor_coefficients(node, scaled, order))


def taylor_subtract(node: Node, order: int, scaled: Iterable[int]) -> Node:
    """node - T^order[node]; the subtracted integrand of the scheme."""
    if order < 0:
        return node
    if order > 2:
        raise ValueError("subtraction beyond quadratic order is not supported")
    return sub(node, taylor_polynomial(node, scaled, order))


# -- structural helpers ---------------------------------------------------------


def substitute_basis(node: Node, mapping: dict[int, Vec], basis_size: int) -> Node:
    """Rewrite every affine combination through ``mapping`` (basis change).

    ``mapping[i]`` is the image of basis vector i; unmapped indices keep
    their identity image.  Used to relocate a subgraph integrand into the
    host graph's variables.
    """

    def map_vec(v: Vec) -> Vec:
        out = [0] * basis_size
        for i, c in enumerate(v):
            if c == 0:
                continue
            image = mapping.get(i)
            if image is None:
                out[i] += c
            else:
                for j, cj in enumerate(image):
                    out[j] += c * cj
        return tuple(out)

    memo: dict[Node, Node] = {}

    def go(n: Node) -> Node:
        if n in memo:
            return memo[n]
        if n.op == "const":
            out = n
        elif n.op == "dot":
            out = dot(map_vec(n.vec_a), map_vec(n.vec_b))
        elif n.op == "add":
            out = add(*(go(c) for c in n.children))
        elif n.op == "mul":
            out = mul(*(go(c) for c in n.children))
        elif n.op == "pow":
            out = powi(go(n.children[0]), n.exponent)
        else:
            raise ValueError(n.op)
        memo[n] = out
        return out

    return go(node)


def evaluate_rational(node: Node, basis: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact evaluation on rational basis vectors (identity tests, oracles)."""
    memo: dict[Node, Fraction] = {}

    def vec_value(v: Vec) -> list[Fraction]:
        dim = len(basis[0])
        out = [Fraction(0)] * dim
        for i, c in enumerate(v):
            if c:
                for d in range(dim):
                    out[d] += c * basis[i][d]
        return out

    def go(n: Node) -> Fraction:
        if n in memo:
            return memo[n]
        if n.op == "const":
            val = n.value
        elif n.op == "dot":
            a, b = vec_value(n.vec_a), vec_value(n.vec_b)
            val = sum((x * y for x, y in zip(a, b)), Fraction(0))
        elif n.op == "add":
            val = sum((go(c) for c in n.children), Fraction(0))
        elif n.op == "mul":
            val = Fraction(1)
            for c in n.children:
                val *= go(c)
        elif n.op == "pow":
            val = go(n.children[0]) ** n.exponent
        else:
            raise ValueError(n.op)
        memo[n] = val
        return val

    return go(node)


def node_depends_on(node: Node, indices: set[int]) -> bool:
    seen = set()

    def go(n: Node) -> bool:
        if id(n) in seen:
            return False
        seen.add(id(n))
        if n.op == "dot":
            return any(n.vec_a[i] or n.vec_b[i] for i in indices)
        return any(go(c) for c in n.children)

    return go(node)

"""The renormalization Hopf algebra on 1PI graphs and its series shadows.

Generators are canonical 1PI graphs with two or three external legs over the
three vertex flavors (plain, labeled counterterm crosses); two-leg graphs
come in labeled pairs (r = 0 and r = 2 in six dimensions).  Generator
identity strips external momentum labels, so a subgraph extracted from a
host matches the free-standing graph it is isomorphic to.  The coproduct
sums contractions over disjoint divergent subgraph families with all label
choices; grading is by loops and the antipode comes from the generic
five-term recursion of :mod:`phi3hopf.hopf`.

Graph-indexed series (``GraphSeries``) carry exact rational weights on
monomials of generators; a monomial of total loop number l sits at power
lambda^(2l + shift).  The renormalization factors, the bare-coupling series,
the inclusion of the diffeomorphism coordinates and the projection back to
ordinary series are all built on that representation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .graphs import (
    FeynmanGraph,
    Subgraph,
    SubgraphFamily,
    Vertex,
    contract,
    divergent_subgraph_families,
    generate_graphs,
    is_1pi,
    sym_factor,
)
from .hopf import Character, HopfElement, HopfInstance, TensorElement, antipode, coproduct
from .ring import Poly
from .series import TruncatedSeries

CK_DIMENSION = 6

Token = tuple[str, int]  # (unlabeled canonical encoding, counterterm label)


def _strip_ext_labels(g: FeynmanGraph) -> FeynmanGraph:
    vs = [Vertex("ext", None) if v.kind == "ext" else v for v in g.vertices]
    return FeynmanGraph(vs, g.edges)


def _label_externals(g: FeynmanGraph) -> FeynmanGraph:
    vs = list(g.vertices)
    label = 0
    for i, v in enumerate(vs):
        if v.kind == "ext":
            vs[i] = Vertex("ext", label)
            label += 1
    return FeynmanGraph(vs, g.edges)


class CKRegistry:
    """Token -> representative graph store shared by the instance."""

    def __init__(self) -> None:
        self.graphs: dict[str, FeynmanGraph] = {}

    def token_of(self, g: FeynmanGraph, label: int = 0) -> Token:
        E = g.n_external
        if E not in (2, 3):
            raise ValueError("generators carry two or three external legs")
        if not is_1pi(g):
            raise ValueError("generators must be one-particle irreducible")
        if E == 3 and label != 0:
            raise ValueError("three-leg generators carry no counterterm label")
        # labels are Taylor-order markers (external structure): even, at most
        # the two-point degree in six dimensions; contracted left factors may
        # carry a label exceeding their own superficial degree
        if label % 2 or not 0 <= label <= 2:
            raise ValueError(f"label {label} not admissible for this generator")
        stripped = _strip_ext_labels(g)
        enc = stripped.encoding()
        self.graphs.setdefault(enc, stripped)
        return (enc, label)

    def graph_of(self, token: Token) -> FeynmanGraph:
        return self.graphs[token[0]]

    def labeled_graph_of(self, token: Token) -> FeynmanGraph:
        """Representative with momentum-labeled legs, for routing/amplitudes."""
        return _label_externals(self.graphs[token[0]])


_registry = CKRegistry()
_instance: Optional[HopfInstance] = None


def registry() -> CKRegistry:
    return _registry


def subgraph_as_graph(host: FeynmanGraph, member: Subgraph) -> FeynmanGraph:
    """Extract a family member as a free-standing graph with fresh legs."""
    vids = sorted(member.vertex_ids)
    vmap = {v: i for i, v in enumerate(vids)}
    vertices = [host.vertices[v] for v in vids]
    edges = [
        (vmap[host.edges[i][0]], vmap[host.edges[i][1]]) for i in member.edge_indices
    ]
    # every unused half-edge of the member becomes an unlabeled external leg
    used = {v: 0 for v in vids}
    for i in member.edge_indices:
        u, w = host.edges[i]
        used[u] += 1
        used[w] += 1
    from .graphs import VALENCE

    for v in vids:
        for _ in range(VALENCE[host.vertices[v].kind] - used[v]):
            vertices.append(Vertex("ext", None))
            edges.append((vmap[v], len(vertices) - 1))
    return FeynmanGraph(vertices, edges)


def ck_instance() -> HopfInstance:
    """The graph Hopf algebra, registered once per process."""
    global _instance
    if _instance is not None:
        return _instance

    def grade(token: Token) -> int:
        return _registry.graph_of(token).n_loops

    def coproduct_rule(token: Token):
        enc, outer_label = token
        g = _registry.graph_of(token)
        terms = [(((token,), ()), 1), (((), (token,)), 1)]
        for fam in divergent_subgraph_families(g, CK_DIMENSION):
            left = _registry.token_of(contract(g, fam), outer_label)
            right = tuple(
                _registry.token_of(subgraph_as_graph(g, m), r)
                for m, r in zip(fam.members, fam.labels)
            )
            terms.append((((left,), right), 1))
        return terms

    _instance = HopfInstance(
        name="connes-kreimer",
        grade=grade,
        coproduct=coproduct_rule,
        counit=lambda token: Poly.zero(),
        generators_up_to=lambda loops: generator_tokens(loops),
        cocommutative=False,
    )
    return _instance


def generator_tokens(max_loops: int, closure: bool = True) -> list[Token]:
    """Cross-free generators up to the loop bound, optionally closed under
    the coproduct (which adds counterterm-crossed contractions)."""
    tokens: list[Token] = []
    for E in (2, 3):
        max_v = 2 * max_loops + E - 2
        for g in generate_graphs(E, max_v, "onePI"):
            if g.n_loops < 1 or g.n_loops > max_loops:
                continue
            labels = (0, 2) if (E == 2 and g.omega(CK_DIMENSION) >= 2) else (0,)
            for r in labels:
                tokens.append(_registry.token_of(g, r))
    if closure:
        inst = ck_instance()
        seen = dict.fromkeys(tokens)
        frontier = list(tokens)
        while frontier:
            tok = frontier.pop()
            for (left, right), _ in inst._coproduct_rule(tok):
                for mono in (left, right):
                    for t in mono:
                        if t not in seen:
                            seen[t] = None
                            frontier.append(t)
        tokens = list(seen)
    return sorted(set(tokens))


def ck_coproduct(g: FeynmanGraph, label: int = 0) -> TensorElement:
    inst = ck_instance()
    return coproduct(inst.gen(_registry.token_of(g, label)))


def ck_antipode(g: FeynmanGraph, label: int = 0) -> HopfElement:
    inst = ck_instance()
    return antipode(inst.gen(_registry.token_of(g, label)))


# -- graph-indexed series -----------------------------------------------------------

Monomial = tuple[Token, ...]


@dataclass
class GraphSeries:
    """Formal series over generator monomials with exact rational weights.

    A monomial of total loop number l contributes at lambda^(2l + shift);
    ``max_power`` truncates products.  The empty monomial is the constant
    (or, at shift 1, the bare coupling) term.
    """

    entries: dict[Monomial, Fraction]
    shift: int = 0
    max_power: int = 8

    def loop_number(self, mono: Monomial) -> int:
        return sum(_registry.graph_of(t).n_loops for t in mono)

    def power(self, mono: Monomial) -> int:
        return 2 * self.loop_number(mono) + self.shift

    def mul(self, other: "GraphSeries", shift: Optional[int] = None) -> "GraphSeries":
        out_shift = self.shift + other.shift if shift is None else shift
        bound = min(self.max_power, other.max_power)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.entries.items():
            for m2, c2 in other.entries.items():
                mono = tuple(sorted(m1 + m2))
                if 2 * self.loop_number(mono) + out_shift > bound:
                    continue
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return GraphSeries({m: c for m, c in out.items() if c}, out_shift, bound)

    def pow_binomial(self, exponent: Fraction) -> "GraphSeries":
        """(1 + x)^a for a series with unit constant term, exact binomials."""
        if self.shift != 0 or self.entries.get((), None) != 1:
            raise ValueError("binomial powers need a unit constant term")
        x = GraphSeries(
            {m: c for m, c in self.entries.items() if m != ()}, 0, self.max_power
        )
        result = GraphSeries({(): Fraction(1)}, 0, self.max_power)
        power = GraphSeries({(): Fraction(1)}, 0, self.max_power)
        binom = Fraction(1)
        max_loops = self.max_power // 2
        for r in range(1, max_loops + 1):
            power = power.mul(x)
            if not power.entries:
                break
            binom *= Fraction(exponent - (r - 1), r)
            for m, c in power.entries.items():
                result.entries[m] = result.entries.get(m, Fraction(0)) + binom * c
        result.entries = {m: c for m, c in result.entries.items() if c}
        return result

    def coefficient_at(self, power: int) -> dict[Monomial, Fraction]:
        return {m: c for m, c in self.entries.items() if self.power(m) == power}


def z_factor_series(max_loops: int) -> tuple[GraphSeries, GraphSeries, GraphSeries]:
    """Z1, Z3, Zm as graph series with weights +-1/Sym per Eq. of the scheme.

    Sums run over cross-free 1PI generators; the symmetry factor is the
    half-edge automorphism order with momentum-labeled legs fixed.
    """
    bound = 2 * max_loops + 1
    z1 = GraphSeries({(): Fraction(1)}, 0, bound)
    z3 = GraphSeries({(): Fraction(1)}, 0, bound)
    zm = GraphSeries({(): Fraction(1)}, 0, bound)
    for E in (2, 3):
        for g in generate_graphs(E, 2 * max_loops + E - 2, "onePI"):
            if g.n_loops < 1 or g.n_loops > max_loops:
                continue
            sym = Fraction(1, sym_factor(g))
            if E == 3:
                tok = _registry.token_of(g, 0)
                z1.entries[(tok,)] = z1.entries.get((tok,), Fraction(0)) + sym
            else:
                tok2 = _registry.token_of(g, 2)
                tok0 = _registry.token_of(g, 0)
                z3.entries[(tok2,)] = z3.entries.get((tok2,), Fraction(0)) - sym
                zm.entries[(tok0,)] = zm.entries.get((tok0,), Fraction(0)) - sym
    return z1, z3, zm


def bare_coupling_graph_series(max_loops: int) -> GraphSeries:
    """lambda_b = lambda * Z1 * Z3^(-3/2) as a graph series (shift 1)."""
    z1, z3, _ = z_factor_series(max_loops)
    combo = z1.mul(z3.pow_binomial(Fraction(-3, 2)))
    return GraphSeries(combo.entries, 1, combo.max_power + 1)


def hd_to_hck(n: int, max_loops: int) -> HopfElement:
    """Image of the n-th diffeomorphism coordinate inside the graph algebra.

    The bare-coupling series is odd, so the n-th nontrivial coefficient sits
    at lambda^(2n+1); counterterm symbols become the labeled generators
    themselves, weighted by the rational 1/Sym factors.
    """
    if n == 0:
        return ck_instance().one()
    if max_loops < n:
        raise ValueError(f"need max_loops >= {n} for the lambda^{2 * n + 1} coefficient")
    lam_b = bare_coupling_graph_series(max_loops)
    inst = ck_instance()
    out = inst.zero()
    for mono, c in lam_b.coefficient_at(2 * n + 1).items():
        out = out + inst.monomial(mono, Poly.const(c))
    return out


def project_pi(
    s: GraphSeries, order: int, char: Optional[Callable[[Token], Fraction]] = None
) -> TruncatedSeries:
    """Collapse a graph series onto an ordinary series by loop counting.

    Every monomial maps to lambda^(2l + shift); with a character given, its
    values multiply the rational weights (a diffeographism becomes a
    concrete series), otherwise monomials must already be scalars (entries
    on the empty monomial) or a character is required.
    """
    coeffs: list[Fraction | Poly] = [Fraction(0)] * (order + 1)
    for mono, c in s.entries.items():
        power = s.power(mono)
        if power > order + (1 if s.shift else 0):
            continue
        value = Fraction(c)
        if mono and char is None:
            raise ValueError("a character is needed to project non-scalar monomials")
        for tok in mono:
            value *= Fraction(char(tok))
        if s.shift == 1:
            # diffeomorphism layout: lambda^(n+1) lives at index n
            idx = power - 1
            if 0 <= idx <= order:
                coeffs[idx] = coeffs[idx] + value
        else:
            if 0 <= power <= order:
                coeffs[power] = coeffs[power] + value
    kind = "diff" if s.shift == 1 else ("inv" if coeffs[0] == 1 else "plain")
    return TruncatedSeries(order, [Poly.const(c) if isinstance(c, Fraction) else c for c in coeffs], kind)


def counterterm_character(cfg) -> Callable[[Token], Fraction]:
    """Numeric counterterm character: token -> exact Fraction of the memoized
    cutoff integral (shared across all uses of the same configuration)."""
    from .bphz import counterterm

    def char(token: Token) -> Fraction:
        g = _registry.labeled_graph_of(token)
        return Fraction(counterterm(g, token[1], cfg).value)

    return char

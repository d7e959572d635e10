"""Perturbative expansions of classical and quantum Green's functions.

Purely combinatorial layer: every term pairs a graph (or tree, or set
partition) with exact hbar/coupling/symmetry bookkeeping; nothing numeric
happens here.  The classical field expands over rooted trees with source
leaves, the connected k-point functions over connected graphs with
three-valent vertices, and the full k-point functions over set partitions of
the external points weighted by hbar^(k - blocks).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .graphs import FeynmanGraph, generate_graphs, sym_factor

MAX_TREE_ORDER = 6
MAX_DS_ORDER = 6


@dataclass(frozen=True)
class ExpansionTerm:
    """One graph term: coefficient hbar^hbar_power * lambda^lam_power / sym."""

    graph: FeynmanGraph
    hbar_power: int
    lam_power: int
    sym: int

    @property
    def coefficient(self) -> Fraction:
        return Fraction(1, self.sym)

    def render(self) -> str:
        parts = []
        if self.hbar_power:
            parts.append(f"hbar^{self.hbar_power}" if self.hbar_power > 1 else "hbar")
        if self.lam_power:
            parts.append(f"lambda^{self.lam_power}" if self.lam_power > 1 else "lambda")
        head = "*".join(parts) if parts else "1"
        if self.sym != 1:
            head += f"/{self.sym}"
        return f"{head} x {self.graph.encoding()}"


def _terms_for(graphs: list[FeynmanGraph]) -> list[ExpansionTerm]:
    terms = [
        ExpansionTerm(
            graph=g,
            hbar_power=g.n_loops,
            lam_power=g.n_vertices3,
            sym=sym_factor(g),
        )
        for g in graphs
    ]
    return sorted(terms, key=lambda t: (t.lam_power, t.graph.encoding()))


def el_tree_expansion(max_order: int) -> list[ExpansionTerm]:
    """Classical-field tree expansion: rooted trees with source leaves.

    Terms carry lambda^V / Sym with V internal vertices; the order-zero term
    is the bare propagator into the source.
    """
    if max_order > MAX_TREE_ORDER:
        raise ValueError(f"tree expansion bounded at order {MAX_TREE_ORDER}")
    trees = generate_graphs(1, max_order, "trees", "J-leaves")
    return _terms_for(trees)


def ds_expansion(k: int, sources: str, max_order: int) -> list[ExpansionTerm]:
    """Connected k-point expansion with hbar^L lambda^V / Sym coefficients.

    ``sources`` is ``"J0"`` for the isolated field (no source insertions) or
    ``"Jext"`` to allow any number of source leaves alongside the k labeled
    legs.  The classical (L=0, k=1, Jext) subset coincides exactly with
    :func:`el_tree_expansion`.
    """
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    if sources not in ("J0", "Jext"):
        raise ValueError(f"unknown source mode {sources!r}")
    if max_order > MAX_DS_ORDER:
        raise ValueError(f"expansion bounded at order {MAX_DS_ORDER}")
    graphs = generate_graphs(k, max_order, "connected", "none" if sources == "J0" else "J-leaves")
    return _terms_for(graphs)


# -- full vs connected ------------------------------------------------------------


@dataclass(frozen=True)
class PartitionTerm:
    """A set partition of the k external points, weighted by hbar^(k - blocks)."""

    blocks: tuple[tuple[int, ...], ...]
    hbar_power: int

    def render(self, names: str = "xyzuvw") -> str:
        weight = f"hbar^{self.hbar_power}" if self.hbar_power > 1 else ("hbar" if self.hbar_power else "1")
        body = " ".join("G(" + ",".join(names[i] for i in block) + ")" for block in self.blocks)
        return f"{weight} {body}"


def connected_to_full(k: int) -> list[PartitionTerm]:
    """All set partitions of k points: the full Green's function in terms of
    connected ones."""
    if not 1 <= k <= 6:
        raise ValueError("k must be between 1 and 6")
    terms = [
        PartitionTerm(blocks=blocks, hbar_power=k - len(blocks))
        for blocks in _set_partitions(tuple(range(k)))
    ]
    return sorted(terms, key=lambda t: (t.hbar_power, t.blocks))


def _set_partitions(items: tuple[int, ...]):
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        # first joins an existing block, or opens its own
        for i in range(len(sub)):
            yield tuple(sorted(sub[:i] + (tuple(sorted((first,) + sub[i])),) + sub[i + 1:]))
        yield tuple(sorted(((first,),) + sub))


# -- tree amplitudes ----------------------------------------------------------------


@dataclass(frozen=True)
class TreeAmplitude:
    """Position-space value of a source tree, as nested convolution data.

    ``variables`` are integrated; propagator pairs reference the fixed root
    label plus those variables; each source factor consumes one variable.
    """

    variables: tuple[str, ...]
    propagators: tuple[tuple[str, str], ...]
    sources: tuple[str, ...]

    def text(self) -> str:
        measure = " ".join(f"d^D{v}" for v in self.variables)
        props = " ".join(f"G0({a}-{b})" for a, b in self.propagators)
        srcs = " ".join(f"J({v})" for v in self.sources)
        return f"int {measure} {props} {srcs}".strip()


_VAR_NAMES = "yzuvwstabcdefgh"


def tree_amplitude(t: FeynmanGraph) -> TreeAmplitude:
    """Feynman rules on a rooted source tree: a propagator per edge, a source
    per leaf, integration over every free label."""
    ext = [i for i, v in enumerate(t.vertices) if v.kind == "ext"]
    if t.n_loops != 0 or not t.is_connected():
        raise ValueError("tree_amplitude needs a connected tree")
    if len(ext) != 1:
        raise ValueError("tree_amplitude needs exactly one rooted external leg")
    if any(v.kind == "ct" for v in t.vertices):
        raise ValueError("tree_amplitude does not accept counterterm crosses")
    if len(t.vertices) < 2:
        raise ValueError("degenerate root-only tree")

    root = ext[0]
    adj: dict[int, list[int]] = {i: [] for i in range(len(t.vertices))}
    for u, v in t.edges:
        adj[u].append(v)
        adj[v].append(u)

    names: dict[int, str] = {root: "x"}
    order: list[int] = []
    queue = [root]
    seen = {root}
    while queue:
        cur = queue.pop(0)
        for nxt in sorted(adj[cur]):
            if nxt not in seen:
                seen.add(nxt)
                names[nxt] = _VAR_NAMES[len(order)]
                order.append(nxt)
                queue.append(nxt)

    propagators = []
    stack = [root]
    visited = {root}
    while stack:
        cur = stack.pop(0)
        for nxt in sorted(adj[cur]):
            if nxt not in visited:
                visited.add(nxt)
                propagators.append((names[cur], names[nxt]))
                stack.append(nxt)
    sources = tuple(names[i] for i, v in enumerate(t.vertices) if v.kind == "cross")
    variables = tuple(names[i] for i in order)
    return TreeAmplitude(variables=variables, propagators=tuple(propagators), sources=sources)

"""Momentum routing: integer affine momentum flow on every edge.

The basis is [q_1..q_L, p_1..p_{E-1}]: one loop momentum per non-tree
internal edge of a chosen spanning tree, one independent external momentum
per labeled leg except the last (total momentum conservation eliminates it).
Tree-edge momenta are solved from conservation at each vertex in exact
integer arithmetic, and the solution is verified vertex by vertex.

When the graph carries nested or overlapping divergent subgraphs, the
spanning tree is chosen *adapted*: its restriction to every such subgraph
spans that subgraph.  Then each subgraph's internal loop momenta are a
subset of the global q's, which is what lets prepared terms factor between
a subgraph and its cograph pointwise.  Tie-breaking is by canonical edge
order, so routings are reproducible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .graphs import FeynmanGraph, divergent_subgraphs
from .integrand import Node, Vec, dot, mul, powi, propagator

Vector = tuple[int, ...]


@dataclass(frozen=True)
class MomentumRouting:
    """Momentum assignment for every edge, over basis (loops, externals)."""

    n_loops: int
    n_ext: int  # number of labeled external legs
    edge_momenta: tuple[Vector, ...]  # one per graph edge, same order
    loop_edges: tuple[int, ...]  # edge index carrying each pure loop momentum
    tree_edges: tuple[int, ...]

    @property
    def basis_size(self) -> int:
        return self.n_loops + max(self.n_ext - 1, 0)

    def basis_names(self) -> list[str]:
        return [f"q{i + 1}" for i in range(self.n_loops)] + [
            f"p{i + 1}" for i in range(max(self.n_ext - 1, 0))
        ]

    def external_vec(self, leg: int) -> Vector:
        """Momentum injected by labeled leg ``leg`` (the last is minus the rest)."""
        B = self.basis_size
        v = [0] * B
        if leg < self.n_ext - 1:
            v[self.n_loops + leg] = 1
        else:
            for i in range(self.n_loops, B):
                v[i] = -1
        return tuple(v)


def _spanning_trees(ids: list[int], edges: list[tuple[int, tuple[int, int]]]):
    """All spanning trees (as edge-index sets) of the internal multigraph."""
    need = len(ids) - 1
    if need == 0:
        yield frozenset()
        return
    candidates = [(idx, uv) for idx, uv in edges if uv[0] != uv[1]]
    for combo in itertools.combinations(candidates, need):
        parent = {i: i for i in ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        ok = True
        for _, (u, v) in combo:
            ru, rv = find(u), find(v)
            if ru == rv:
                ok = False
                break
            parent[ru] = rv
        if ok:
            yield frozenset(idx for idx, _ in combo)


def route_momenta(g: FeynmanGraph, dimension: Optional[int] = None) -> MomentumRouting:
    """Spanning-tree routing with exact conservation at every vertex.

    With ``dimension`` given, the tree is additionally adapted to every
    divergent 1PI subgraph in that dimension (required by the subtraction
    recursion); a ValueError reports graphs where no adapted tree exists.
    """
    if not g.is_connected():
        raise ValueError("routing requires a connected graph")
    internal_ids = g.internal_ids()
    internal = [(i, e) for i, e in enumerate(g.edges) if e[0] in internal_ids and e[1] in internal_ids]

    constraints: list[frozenset[int]] = []
    if dimension is not None and internal:
        for sub in divergent_subgraphs(g, dimension):
            constraints.append(frozenset(sub.edge_indices))

    chosen: Optional[frozenset[int]] = None
    if internal_ids:
        for tree in _spanning_trees(internal_ids, internal):
            if all(_tree_spans(g, tree, c) for c in constraints):
                chosen = tree
                break
        if chosen is None:
            raise ValueError("no spanning tree adapted to the divergent subgraphs exists")
    else:
        chosen = frozenset()

    loop_edges = tuple(
        idx for idx, _ in internal if idx not in chosen
    )
    n_loops = len(loop_edges)
    n_ext = sum(1 for v in g.vertices if v.kind == "ext")
    n_cross = sum(1 for v in g.vertices if v.kind == "cross")
    if n_cross:
        raise ValueError("routing applies to momentum-space graphs without source crosses")
    B = n_loops + max(n_ext - 1, 0)

    momenta: dict[int, Optional[list[int]]] = {i: None for i in range(len(g.edges))}
    # loop momenta on non-tree edges
    for j, idx in enumerate(loop_edges):
        vec = [0] * B
        vec[j] = 1
        momenta[idx] = vec
    # external legs inject the independent externals; the last injects -(sum)
    ext_seen = 0
    ext_rank = {}
    for i, v in enumerate(g.vertices):
        if v.kind == "ext":
            ext_rank[i] = v.label if v.label is not None else ext_seen
            ext_seen += 1
    for idx, (a, b) in enumerate(g.edges):
        for end in (a, b):
            if g.vertices[end].kind == "ext":
                vec = [0] * B
                rank = ext_rank[end]
                if rank < n_ext - 1:
                    vec[n_loops + rank] = 1
                else:
                    for k in range(n_loops, B):
                        vec[k] = -1
                momenta[idx] = vec

    # orientation: edge (u, v) carries its momentum from u into v; external
    # legs flow into the graph.  Solve tree edges by peeling vertices with a
    # single unknown.
    def sign_at(idx: int, vertex: int) -> int:
        a, b = g.edges[idx]
        if a == b:
            return 0
        if g.vertices[a].kind == "ext" or g.vertices[b].kind == "ext":
            return 1  # inflow at the internal endpoint
        return 1 if b == vertex else -1

    incident: dict[int, list[int]] = {v: [] for v in internal_ids}
    for idx, (a, b) in enumerate(g.edges):
        for end in set((a, b)):
            if end in incident:
                incident[end].append(idx)

    unsolved = {idx for idx, _ in internal if idx in chosen}
    progress = True
    while unsolved and progress:
        progress = False
        for v in internal_ids:
            unknown = [i for i in incident[v] if momenta[i] is None]
            if len(unknown) != 1:
                continue
            target = unknown[0]
            acc = [0] * B
            for i in incident[v]:
                if i == target:
                    continue
                s = sign_at(i, v)
                if s and momenta[i] is not None:
                    for k in range(B):
                        acc[k] += s * momenta[i][k]
            s_t = sign_at(target, v)
            momenta[target] = [c if s_t == -1 else -c for c in acc]
            unsolved.discard(target)
            progress = True
    if unsolved:
        raise AssertionError("tree solve failed to converge")

    routing = MomentumRouting(
        n_loops=n_loops,
        n_ext=n_ext,
        edge_momenta=tuple(tuple(m) for m in (momenta[i] for i in range(len(g.edges)))),
        loop_edges=loop_edges,
        tree_edges=tuple(sorted(chosen)),
    )
    _verify_conservation(g, routing, sign_at)
    return routing


def _tree_spans(g: FeynmanGraph, tree: frozenset[int], subgraph_edges: frozenset[int]) -> bool:
    vids = set()
    for idx in subgraph_edges:
        u, v = g.edges[idx]
        vids.update((u, v))
    inside = [idx for idx in subgraph_edges if idx in tree]
    # the tree restricted to the subgraph must connect all its vertices
    parent = {v: v for v in vids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = len(vids)
    for idx in inside:
        u, v = g.edges[idx]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def _verify_conservation(g: FeynmanGraph, routing: MomentumRouting, sign_at) -> None:
    B = routing.basis_size
    for v in g.internal_ids():
        acc = [0] * B
        for idx, (a, b) in enumerate(g.edges):
            if a == b:
                continue
            if a == v or b == v:
                s = sign_at(idx, v)
                # for internal edges sign_at gives +1 at head, -1 at tail
                if g.vertices[a].kind != "ext" and g.vertices[b].kind != "ext":
                    s = 1 if b == v else -1
                for k in range(B):
                    acc[k] += s * routing.edge_momenta[idx][k]
        if any(acc):
            raise AssertionError(f"momentum conservation violated at vertex {v}: {acc}")


# -- integrand assembly ----------------------------------------------------------


@dataclass(frozen=True)
class Integrand:
    """A routed graph's integrand: DAG, loop count, basis bookkeeping."""

    node: Node
    n_loops: int
    n_ext: int
    basis_names: tuple[str, ...]

    def external_indices(self) -> tuple[int, ...]:
        return tuple(range(self.n_loops, self.n_loops + max(self.n_ext - 1, 0)))


def build_integrand(g: FeynmanGraph, routing: MomentumRouting) -> Integrand:
    """Product of propagators over internal edges, with counterterm factors.

    External legs are amputated (no propagator); a counterterm cross with
    label r contributes (through-momentum^2)^(r/2).  The per-loop measure
    normalization 1/(2 pi)^D belongs to the quadrature, which integrates
    d^D q/(2 pi)^D for each loop momentum.
    """
    internal_ids = set(g.internal_ids())
    factors = []
    for idx, (u, v) in enumerate(g.edges):
        if u in internal_ids and v in internal_ids:
            factors.append(propagator(routing.edge_momenta[idx]))
    for i, vert in enumerate(g.vertices):
        if vert.kind == "ct":
            r = vert.label or 0
            if r % 2:
                raise ValueError("odd counterterm labels do not occur (parity)")
            if r:
                through = _through_momentum(g, routing, i)
                factors.append(powi(dot(through, through), r // 2))
    return Integrand(
        node=mul(*factors) if factors else powi(dot((), ()), 0),
        n_loops=routing.n_loops,
        n_ext=routing.n_ext,
        basis_names=tuple(routing.basis_names()),
    )


def _through_momentum(g: FeynmanGraph, routing: MomentumRouting, vertex: int) -> Vec:
    for idx, (u, v) in enumerate(g.edges):
        if vertex in (u, v):
            return routing.edge_momenta[idx]
    raise ValueError(f"isolated counterterm vertex {vertex}")

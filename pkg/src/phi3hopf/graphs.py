"""Feynman graphs of the cubic scalar interaction.

A graph is a half-edge incidence structure: typed vertices own a fixed number
of half-edges (3 for internal vertices, 2 for counterterm crosses, 1 for
external legs and source crosses) and a perfect matching pairs them into
edges.  Self-loops (both half-edges on one vertex) and parallel edges are
first-class citizens, because symmetry factors and tadpoles depend on them.

Vertex types
------------
``int3``  three-valent interaction vertex
``ext``   external leg; may carry a momentum index (labeled legs are fixed
          points of admissible relabelings)
``cross`` source insertion (J); unlabeled and freely permutable
``ct``    two-valent counterterm cross with an even Taylor label r

The canonical form is computed by individualization-refinement search over
admissible vertex bijections; the half-edge automorphism count follows as
|vertex automorphisms| * prod(multiplicity!) over parallel classes *
prod(loops! * 2^loops) over vertices, which reproduces both the
edge-permutation and the factor-2-per-bubble conventions of the expansion
coefficients.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

VALENCE = {"int3": 3, "ext": 1, "cross": 1, "ct": 2}

GENERATION_HARD_LIMIT = 9  # internal vertices; exhaustive search beyond this is refused


@dataclass(frozen=True)
class Vertex:
    kind: str
    label: Optional[int] = None  # momentum index for ext, Taylor label for ct

    def code(self) -> str:
        if self.kind == "int3":
            return "v"
        if self.kind == "ct":
            return f"x{self.label}"
        if self.kind == "cross":
            return "j"
        return f"p{self.label}" if self.label is not None else "e"


class FeynmanGraph:
    """Immutable multigraph over typed vertices, edges as vertex pairs.

    ``edges`` keeps one entry per edge (a sorted vertex-id pair); self-loops
    appear as ``(v, v)``.  The half-edge picture is implicit: each edge
    consumes one half-edge at each endpoint (two at the same vertex for a
    self-loop), and construction validates that every vertex uses exactly its
    valence.
    """

    __slots__ = ("vertices", "edges", "_canon")

    def __init__(self, vertices: Sequence[Vertex], edges: Iterable[tuple[int, int]]):
        vs = tuple(vertices)
        es = tuple(sorted(tuple(sorted(e)) for e in edges))
        degree = [0] * len(vs)
        for u, v in es:
            degree[u] += 1
            degree[v] += 1
        for i, vert in enumerate(vs):
            if degree[i] != VALENCE[vert.kind]:
                raise ValueError(
                    f"vertex {i} ({vert.kind}) has degree {degree[i]}, needs {VALENCE[vert.kind]}"
                )
        self.vertices = vs
        self.edges = es
        self._canon: Optional["CanonicalForm"] = None

    # -- basic structure ---------------------------------------------------

    def internal_ids(self) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if v.kind in ("int3", "ct")]

    def leg_ids(self) -> list[int]:
        return [i for i, v in enumerate(self.vertices) if v.kind in ("ext", "cross")]

    def internal_edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u, v in self.edges
            if self.vertices[u].kind in ("int3", "ct") and self.vertices[v].kind in ("int3", "ct")
        ]

    def external_edges(self) -> list[tuple[int, int]]:
        return [
            (u, v)
            for u, v in self.edges
            if self.vertices[u].kind in ("ext", "cross") or self.vertices[v].kind in ("ext", "cross")
        ]

    @property
    def n_external(self) -> int:
        return len(self.leg_ids())

    @property
    def n_internal_edges(self) -> int:
        return len(self.internal_edges())

    @property
    def n_vertices3(self) -> int:
        return sum(1 for v in self.vertices if v.kind == "int3")

    @property
    def n_loops(self) -> int:
        # L = I - (internal vertices) + 1 for connected graphs
        return self.n_internal_edges - len(self.internal_ids()) + 1 if self.internal_ids() else 0

    def has_crosses(self) -> bool:
        return any(v.kind in ("ct", "cross") for v in self.vertices)

    def is_connected(self) -> bool:
        n = len(self.vertices)
        if n == 0:
            return False
        adj: dict[int, set[int]] = {i: set() for i in range(n)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        seen = {0}
        stack = [0]
        while stack:
            cur = stack.pop()
            for nxt in adj[cur]:
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return len(seen) == n

    # -- renormalization-relevant counts ------------------------------------

    def omega(self, dimension: int) -> int:
        """Superficial degree: D*L - 2*I, plus r per counterterm cross."""
        ct_weight = sum(v.label or 0 for v in self.vertices if v.kind == "ct")
        return dimension * self.n_loops - 2 * self.n_internal_edges + ct_weight

    # -- rendering -----------------------------------------------------------

    def __repr__(self) -> str:
        return f"FeynmanGraph({self.encoding()})"

    def encoding(self) -> str:
        return self.canonical().encoding

    def canonical(self) -> "CanonicalForm":
        if self._canon is None:
            self._canon = canonical_form(self)
        return self._canon

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertices": [{"kind": v.kind, "label": v.label} for v in self.vertices],
                "edges": [list(e) for e in self.edges],
            }
        )

    @staticmethod
    def from_json(text: str) -> "FeynmanGraph":
        data = json.loads(text)
        vs = [Vertex(v["kind"], v.get("label")) for v in data["vertices"]]
        return FeynmanGraph(vs, [tuple(e) for e in data["edges"]])

    def to_dot(self, name: str = "g") -> str:
        shape = {"ext": "point", "cross": "none", "ct": "none", "int3": "circle"}
        lines = [f"graph {name} {{"]
        for i, v in enumerate(self.vertices):
            if v.kind == "ext":
                label = f"p{v.label}" if v.label is not None else "ext"
                lines.append(f'  n{i} [shape=circle, style=filled, label="{label}"];')
            elif v.kind == "cross":
                lines.append(f'  n{i} [shape=none, label="J"];')
            elif v.kind == "ct":
                lines.append(f'  n{i} [shape=none, label="X({v.label})"];')
            else:
                lines.append(f'  n{i} [shape=point];')
        for u, v in self.edges:
            lines.append(f"  n{u} -- n{v};")
        lines.append("}")
        return "\n".join(lines)


# -- construction helpers -------------------------------------------------------


def graph_from_spec(internal: int, edges: Iterable[tuple[int, int]],
                    externals: Sequence[int] = (), crosses: Sequence[int] = (),
                    ct_labels: Sequence[int] = ()) -> FeynmanGraph:
    """Build a graph from internal adjacency plus leg attachments.

    Three-valent vertices get ids 0..internal-1; counterterm crosses with the
    given labels follow as ids internal..internal+len(ct_labels)-1 and may be
    referenced by ``edges``.  ``externals[i] = v`` attaches the momentum-``i``
    leg to vertex ``v``; each entry of ``crosses`` attaches one source leg.
    """
    vertices = [Vertex("int3") for _ in range(internal)]
    for r in ct_labels:
        vertices.append(Vertex("ct", r))
    all_edges = [tuple(e) for e in edges]
    for i, v in enumerate(externals):
        vertices.append(Vertex("ext", i))
        all_edges.append((v, len(vertices) - 1))
    for v in crosses:
        vertices.append(Vertex("cross"))
        all_edges.append((v, len(vertices) - 1))
    return FeynmanGraph(vertices, all_edges)


# -- stats / power counting ------------------------------------------------------


@dataclass(frozen=True)
class GraphStats:
    E: int
    I: int
    V: int
    L: int
    omega: int


def stats(g: FeynmanGraph, dimension: int) -> GraphStats:
    """Combinatorial counts and the superficial degree of divergence.

    Requires a connected graph free of source and counterterm crosses; both
    the loop-count form D*L - 2I and the cubic-interaction specialization
    D + (D-6)/2 * V - (D-2)/2 * E are computed and must agree.
    """
    if not g.is_connected():
        raise ValueError("stats requires a connected graph")
    if g.has_crosses():
        raise ValueError("superficial degree is defined for cross-free graphs only")
    if g.n_vertices3 == 0:
        raise ValueError("power counting needs at least one interaction vertex")
    E = g.n_external
    I = g.n_internal_edges
    V = g.n_vertices3
    L = I - V + 1
    omega = dimension * L - 2 * I
    omega_phi3 = Fraction(2 * dimension + (dimension - 6) * V - (dimension - 2) * E, 2)
    if omega_phi3 != omega:
        raise AssertionError(f"power-counting forms disagree: {omega} vs {omega_phi3}")
    if 3 * V != E + 2 * I:
        raise AssertionError("valence bookkeeping violated: 3V != E + 2I")
    return GraphStats(E=E, I=I, V=V, L=L, omega=omega)


def is_1pi(g: FeynmanGraph) -> bool:
    """True when no single internal edge disconnects the graph.

    The free propagator (no internal edge) and tree graphs are not 1PI;
    parallel edges and self-loops are never bridges.
    """
    if not g.is_connected():
        raise ValueError("is_1pi requires a connected graph")
    internal = g.internal_edges()
    if not internal:
        return False
    counts: dict[tuple[int, int], int] = {}
    for e in internal:
        counts[e] = counts.get(e, 0) + 1
    ids = g.internal_ids()
    for (u, v), mult in counts.items():
        if u == v or mult > 1:
            continue
        if not _connected_without(ids, counts, (u, v)):
            return False
    return True


def _connected_without(ids: list[int], counts: dict, removed: tuple[int, int]) -> bool:
    adj: dict[int, set[int]] = {i: set() for i in ids}
    for (u, v), mult in counts.items():
        if (u, v) == removed and mult == 1:
            continue
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    start = ids[0]
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(ids)


# -- canonical form ---------------------------------------------------------------


@dataclass(frozen=True)
class CanonicalForm:
    encoding: str
    relabeling: tuple[int, ...]  # canonical id for each original vertex id
    vertex_aut_order: int
    aut_order: int  # half-edge automorphisms fixing labeled external legs


def _initial_colors(g: FeynmanGraph) -> list:
    colors = []
    for v in g.vertices:
        if v.kind == "ext" and v.label is not None:
            colors.append(("p", v.label))
        elif v.kind == "ext":
            colors.append(("e",))
        elif v.kind == "cross":
            colors.append(("j",))
        elif v.kind == "ct":
            colors.append(("x", v.label))
        else:
            colors.append(("v",))
    return colors


def _refine(colors: list, adj: list[dict[int, int]], loops: list[int]) -> list:
    n = len(colors)
    while True:
        signature = []
        for i in range(n):
            neigh = sorted((colors[j], m) for j, m in adj[i].items())
            signature.append((colors[i], loops[i], tuple(neigh)))
        ranks = {sig: rank for rank, sig in enumerate(sorted(set(signature)))}
        new_colors = [ranks[sig] for sig in signature]
        if new_colors == colors:
            return new_colors
        colors = new_colors


def canonical_form(g: FeynmanGraph) -> CanonicalForm:
    """Isomorphism-invariant encoding plus automorphism counts.

    Runs a complete individualization-refinement search; every discrete
    labeling consistent with the refined coloring is encoded and the minimum
    is the canonical string.  The number of leaf labelings achieving the
    minimum equals the vertex-level automorphism count; the half-edge count
    multiplies in the parallel-edge and self-loop factors.
    """
    n = len(g.vertices)
    adj: list[dict[int, int]] = [dict() for _ in range(n)]
    loops = [0] * n
    for u, v in g.edges:
        if u == v:
            loops[u] += 1
        else:
            adj[u][v] = adj[u].get(v, 0) + 1
            adj[v][u] = adj[v].get(u, 0) + 1

    base = _initial_colors(g)
    ranks = {c: i for i, c in enumerate(sorted(set(base)))}
    colors = _refine([ranks[c] for c in base], adj, loops)

    encodings: dict[str, int] = {}
    best: list[Optional[str]] = [None]
    best_labeling: list[Optional[tuple[int, ...]]] = [None]

    def search(colors: list) -> None:
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(colors):
            cells.setdefault(c, []).append(i)
        non_singleton = [c for c, members in sorted(cells.items()) if len(members) > 1]
        if not non_singleton:
            order = sorted(range(n), key=lambda i: colors[i])
            relabel = [0] * n
            for pos, orig in enumerate(order):
                relabel[orig] = pos
            enc = _encode(g, relabel)
            encodings[enc] = encodings.get(enc, 0) + 1
            if best[0] is None or enc < best[0]:
                best[0] = enc
                best_labeling[0] = tuple(relabel)
            return
        target = non_singleton[0]
        for v in cells[target]:
            new_colors = list(colors)
            # individualize v: give it a fresh color just below its cell
            new_colors = [c * 2 for c in new_colors]
            new_colors[v] -= 1
            search(_refine(new_colors, adj, loops))

    search(colors)
    assert best[0] is not None and best_labeling[0] is not None
    vertex_aut = encodings[best[0]]

    half_edge_factor = 1
    for u in range(n):
        for v, mult in adj[u].items():
            if u < v:
                half_edge_factor *= _factorial(mult)
        half_edge_factor *= _factorial(loops[u]) * (2 ** loops[u])
    return CanonicalForm(
        encoding=best[0],
        relabeling=best_labeling[0],
        vertex_aut_order=vertex_aut,
        aut_order=vertex_aut * half_edge_factor,
    )


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def _encode(g: FeynmanGraph, relabel: Sequence[int]) -> str:
    n = len(g.vertices)
    codes = [""] * n
    for i, v in enumerate(g.vertices):
        codes[relabel[i]] = v.code()
    edge_list = sorted((min(relabel[u], relabel[v]), max(relabel[u], relabel[v])) for u, v in g.edges)
    ext = sorted(
        (relabel[i], g.vertices[i].code())
        for i in range(n)
        if g.vertices[i].kind in ("ext", "cross")
    )
    return (
        "V:" + ",".join(codes)
        + "|E:" + ",".join(f"{u}-{v}" for u, v in edge_list)
        + "|X:" + ",".join(f"{i}:{c}" for i, c in ext)
    )


def sym_factor(g: FeynmanGraph) -> int:
    """Order of the half-edge automorphism group fixing labeled legs.

    Reproduces the expansion conventions: permutations of identical source
    crosses and of parallel internal edges, and a factor 2 for each
    self-loop.
    """
    if not g.is_connected():
        raise ValueError("sym_factor requires a connected graph")
    return g.canonical().aut_order


# -- subgraphs, divergence families, contraction -----------------------------------


@dataclass(frozen=True)
class Subgraph:
    """Edge-induced subgraph of a host graph, with divergence data."""

    edge_indices: tuple[int, ...]  # indices into host.edges
    vertex_ids: frozenset
    n_external: int
    omega: int
    dimension: int = 6

    def label_choices(self) -> tuple[int, ...]:
        """Even Taylor labels admitted by the external structure.

        The range is set by the theory's power counting for the subgraph's
        leg count (2 for two-point structures in six dimensions, 0
        otherwise), not by the crossed-vertex-weighted degree; only that
        choice commutes with iterated contraction.  For cross-free
        subgraphs the two rules agree.
        """
        if self.n_external == 2 and self.dimension == 6:
            return (0, 2)
        return (0,)


@dataclass(frozen=True)
class SubgraphFamily:
    """Pairwise vertex-disjoint divergent proper 1PI subgraphs, with labels."""

    members: tuple[Subgraph, ...]
    labels: tuple[int, ...]


def _edge_subgraph(g: FeynmanGraph, edge_indices: tuple[int, ...], dimension: int) -> Optional[Subgraph]:
    """Build subgraph data if the edge subset is connected and 1PI."""
    edges = [g.edges[i] for i in edge_indices]
    vids = set()
    for u, v in edges:
        vids.add(u)
        vids.add(v)
    if any(g.vertices[i].kind in ("ext", "cross") for i in vids):
        return None
    # connectivity of the edge-induced graph
    adj: dict[int, set[int]] = {i: set() for i in vids}
    counts: dict[tuple[int, int], int] = {}
    for u, v in edges:
        counts[(u, v)] = counts.get((u, v), 0) + 1
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    start = next(iter(vids))
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for nxt in adj[cur]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    if len(seen) != len(vids):
        return None
    # 1PI within the subgraph
    ids = sorted(vids)
    for (u, v), mult in counts.items():
        if u == v or mult > 1:
            continue
        if not _connected_without(ids, counts, (u, v)):
            return None
    # external attachment count: unused half-edges of the induced vertices
    used = {i: 0 for i in vids}
    for u, v in edges:
        used[u] += 1
        used[v] += 1
    n_ext = sum(VALENCE[g.vertices[i].kind] - used[i] for i in vids)
    n_int = len(edges)
    loops = n_int - len(vids) + 1
    ct_weight = sum(g.vertices[i].label or 0 for i in vids if g.vertices[i].kind == "ct")
    omega = dimension * loops - 2 * n_int + ct_weight
    return Subgraph(tuple(edge_indices), frozenset(vids), n_ext, omega, dimension)


def divergent_subgraphs(g: FeynmanGraph, dimension: int) -> list[Subgraph]:
    """All proper, connected, 1PI, superficially divergent edge-subgraphs.

    Cross-free subgraphs are divergent when their superficial degree is
    non-negative.  Subgraphs containing counterterm crosses (they appear in
    the graph Hopf algebra, never in the subtraction recursion itself) are
    classified by their external structure instead: two- or three-leg
    subgraphs count as divergent in six dimensions regardless of the labels
    they carry, which is the grading-stable rule under iterated contraction.
    """
    internal_idx = [
        i
        for i, (u, v) in enumerate(g.edges)
        if g.vertices[u].kind in ("int3", "ct") and g.vertices[v].kind in ("int3", "ct")
    ]
    total = len(internal_idx)
    found = []
    for size in range(1, total):  # size == total is the graph itself: not proper
        for subset in itertools.combinations(internal_idx, size):
            sub = _edge_subgraph(g, subset, dimension)
            if sub is None:
                continue
            has_ct = any(g.vertices[i].kind == "ct" for i in sub.vertex_ids)
            if has_ct:
                divergent = dimension == 6 and sub.n_external in (2, 3)
            else:
                divergent = sub.omega >= 0
            if divergent:
                found.append(sub)
    return found


def divergent_subgraph_families(g: FeynmanGraph, dimension: int) -> list[SubgraphFamily]:
    """Families of pairwise disjoint divergent subgraphs with all label choices.

    The empty family is excluded; members are ordered by their edge sets for
    deterministic output.
    """
    if not is_1pi(g):
        raise ValueError("divergent subgraph families are defined on 1PI graphs")
    subs = divergent_subgraphs(g, dimension)
    families: list[SubgraphFamily] = []

    def extend(start: int, chosen: list[Subgraph]) -> None:
        for i in range(start, len(subs)):
            cand = subs[i]
            if all(cand.vertex_ids.isdisjoint(c.vertex_ids) for c in chosen):
                chosen.append(cand)
                members = tuple(chosen)
                for labels in itertools.product(*(m.label_choices() for m in members)):
                    families.append(SubgraphFamily(members, labels))
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    return families


def contract(g: FeynmanGraph, family: SubgraphFamily) -> FeynmanGraph:
    """Squeeze each family member to a point: an ``int3`` vertex for 3-leg
    members, a labeled ``ct`` cross for 2-leg members."""
    member_of: dict[int, int] = {}
    for k, member in enumerate(family.members):
        for vid in member.vertex_ids:
            if vid in member_of:
                raise ValueError("family members are not vertex-disjoint")
            member_of[vid] = k
    removed_edges = set()
    for member in family.members:
        removed_edges.update(member.edge_indices)

    new_vertices: list[Vertex] = []
    vmap: dict[int, int] = {}
    for i, v in enumerate(g.vertices):
        if i not in member_of:
            vmap[i] = len(new_vertices)
            new_vertices.append(v)
    member_vertex: dict[int, int] = {}
    for k, (member, label) in enumerate(zip(family.members, family.labels)):
        if member.n_external == 3:
            member_vertex[k] = len(new_vertices)
            new_vertices.append(Vertex("int3"))
        elif member.n_external == 2:
            member_vertex[k] = len(new_vertices)
            new_vertices.append(Vertex("ct", label))
        else:
            raise ValueError(f"cannot contract a subgraph with {member.n_external} legs")

    new_edges = []
    for idx, (u, v) in enumerate(g.edges):
        if idx in removed_edges:
            continue
        nu = member_vertex[member_of[u]] if u in member_of else vmap[u]
        nv = member_vertex[member_of[v]] if v in member_of else vmap[v]
        new_edges.append((nu, nv))
    return FeynmanGraph(new_vertices, new_edges)


def empty_family() -> SubgraphFamily:
    return SubgraphFamily((), ())


# -- exhaustive generation ---------------------------------------------------------


_generation_cache: dict[tuple, list[FeynmanGraph]] = {}


def generate_graphs(
    external_count: int,
    max_vertices: int,
    graph_class: str = "connected",
    sources: str = "none",
) -> list[FeynmanGraph]:
    """One representative per isomorphism class, sorted by canonical encoding.

    ``graph_class`` is one of ``trees`` (connected, no loops), ``connected``
    or ``onePI``; ``sources`` chooses between momentum-labeled legs only
    (``"none"``) and any admissible number of additional source crosses
    (``"J-leaves"``).

    Enumeration runs in two stages: connected internal multigraph classes
    with prescribed leg-stub counts are generated once per stub profile
    (cached), then labeled legs and source crosses are distributed over the
    stubs of each class representative, with a final canonical dedup.
    """
    if graph_class not in ("trees", "connected", "onePI"):
        raise ValueError(f"unknown graph class {graph_class!r}")
    if sources not in ("none", "J-leaves"):
        raise ValueError(f"unknown source mode {sources!r}")
    if max_vertices > GENERATION_HARD_LIMIT:
        raise ValueError(f"exhaustive generation bounded at {GENERATION_HARD_LIMIT} vertices")

    key = (external_count, max_vertices, graph_class, sources)
    if key in _generation_cache:
        return list(_generation_cache[key])

    seen: dict[str, FeynmanGraph] = {}
    for g in _degenerate_graphs(external_count, sources):
        if graph_class != "onePI":
            seen.setdefault(g.encoding(), g)

    for n_int in range(1, max_vertices + 1):
        for stubs in _stub_profiles(n_int, external_count, sources):
            for edges, stub_counts in _internal_classes(n_int, stubs, graph_class):
                for ext_attach in _leg_placements(stub_counts, external_count):
                    crosses = []
                    for v in range(n_int):
                        free = stub_counts[v] - sum(1 for a in ext_attach if a == v)
                        crosses.extend([v] * free)
                    if crosses and sources == "none":
                        continue
                    g = graph_from_spec(n_int, edges, externals=ext_attach, crosses=crosses)
                    seen.setdefault(g.encoding(), g)

    result = [seen[enc] for enc in sorted(seen)]
    _generation_cache[key] = result
    return list(result)


def _degenerate_graphs(k_ext: int, sources: str):
    # graphs without interaction vertices
    if k_ext == 2:
        yield FeynmanGraph([Vertex("ext", 0), Vertex("ext", 1)], [(0, 1)])
    if k_ext == 1 and sources == "J-leaves":
        yield FeynmanGraph([Vertex("ext", 0), Vertex("cross")], [(0, 1)])


def _stub_profiles(n_int: int, k_ext: int, sources: str):
    """Sorted stub-count tuples (legs per vertex) compatible with the mode."""
    total_budget = 3 * n_int
    if sources == "none":
        totals = [k_ext]
    else:
        totals = [t for t in range(k_ext, total_budget + 1) if (total_budget - t) % 2 == 0]
    seen = set()
    for total in totals:
        for profile in _sorted_compositions(total, n_int, 3):
            if profile not in seen:
                seen.add(profile)
                yield profile


def _sorted_compositions(total: int, parts: int, cap: int, minimum: int = 0):
    """Non-decreasing tuples of ``parts`` entries in [minimum, cap] summing to total."""
    if parts == 1:
        if minimum <= total <= cap:
            yield (total,)
        return
    for first in range(minimum, min(total, cap) + 1):
        for rest in _sorted_compositions(total - first, parts - 1, cap, first):
            yield (first,) + rest


_internal_cache: dict[tuple, list] = {}


def _internal_classes(n_int: int, stubs: tuple[int, ...], graph_class: str):
    """Canonical connected internal multigraphs with the given stub profile.

    Returns (edges, stub_counts) pairs; stub counts are per vertex of the
    representative labeling.  Filtered for the requested class: acyclic for
    trees, bridge-free for onePI.
    """
    key = (n_int, stubs, graph_class)
    if key in _internal_cache:
        return _internal_cache[key]
    degrees = [3 - s for s in stubs]
    reps: dict[str, tuple] = {}
    for edges in _adjacency_fill(degrees):
        if not _internal_connected(n_int, edges):
            continue
        n_edges = len(edges)
        loops = n_edges - n_int + 1
        if graph_class == "trees" and loops != 0:
            continue
        if graph_class == "onePI" and (n_edges == 0 or _has_internal_bridge(n_int, edges)):
            continue
        # canonical form of the internal structure with stub counts as colors
        enc = _internal_encoding(n_int, edges, stubs)
        reps.setdefault(enc, (edges, stubs))
    out = list(reps.values())
    _internal_cache[key] = out
    return out


def _internal_encoding(n_int: int, edges: list[tuple[int, int]], stubs: tuple[int, ...]) -> str:
    vertices = [Vertex("int3") for _ in range(n_int)]
    all_edges = list(edges)
    for v in range(n_int):
        for _ in range(stubs[v]):
            vertices.append(Vertex("ext", None))
            all_edges.append((v, len(vertices) - 1))
    return FeynmanGraph(vertices, all_edges).encoding()


def _internal_connected(n: int, edges: list[tuple[int, int]]) -> bool:
    if n == 1:
        return True
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for u, v in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            comps -= 1
    return comps == 1


def _has_internal_bridge(n: int, edges: list[tuple[int, int]]) -> bool:
    counts: dict[tuple[int, int], int] = {}
    for u, v in edges:
        if u != v:
            counts[(u, v)] = counts.get((u, v), 0) + 1
    for (u, v), mult in counts.items():
        if mult > 1:
            continue
        parent = list(range(n))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        comps = n
        for a, b in edges:
            if a == b or (a, b) == (u, v):
                continue
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
                comps -= 1
        # a single copy of (u, v) was skipped entirely; with mult == 1 that
        # removes the edge, so connectivity must survive without it
        if comps != 1:
            return True
    return False


def _leg_placements(stub_counts: tuple[int, ...], k_ext: int):
    """All placements of the labeled legs onto vertices with stub capacity."""
    n = len(stub_counts)

    def place(label: int, capacity: list[int]):
        if label == k_ext:
            yield ()
            return
        for v in range(n):
            if capacity[v] > 0:
                capacity[v] -= 1
                for rest in place(label + 1, capacity):
                    yield (v,) + rest
                capacity[v] += 1

    yield from place(0, list(stub_counts))


def _adjacency_fill(degrees: list[int]):
    """Enumerate multigraphs (with loops) realizing the degree sequence."""
    n = len(degrees)

    def fill(v: int, remaining: list[int], edges: list[tuple[int, int]]):
        if v == n:
            if all(r == 0 for r in remaining):
                yield list(edges)
            return
        if remaining[v] == 0:
            yield from fill(v + 1, remaining, edges)
            return
        # attach loops at v, then distribute the rest to vertices > v
        max_loops = remaining[v] // 2
        for loops in range(max_loops + 1):
            rem_after_loops = remaining[v] - 2 * loops
            targets = [u for u in range(v + 1, n) if remaining[u] > 0]
            for combo in _multi_targets(rem_after_loops, targets, remaining):
                new_remaining = list(remaining)
                new_remaining[v] = 0
                new_edges = list(edges) + [(v, v)] * loops
                feasible = True
                for u, mult in combo:
                    new_remaining[u] -= mult
                    new_edges.extend([(v, u)] * mult)
                    if new_remaining[u] < 0:
                        feasible = False
                        break
                if feasible:
                    yield from fill(v + 1, new_remaining, new_edges)

    yield from fill(0, list(degrees), [])


def _multi_targets(budget: int, targets: list[int], remaining: list[int]):
    """Distribute ``budget`` edge-ends over ``targets`` with per-target caps."""
    if budget == 0:
        yield []
        return
    if not targets:
        return
    head, tail = targets[0], targets[1:]
    for mult in range(0, min(budget, remaining[head]) + 1):
        for rest in _multi_targets(budget - mult, tail, remaining):
            yield ([(head, mult)] if mult else []) + rest


# -- named example graphs -----------------------------------------------------------


def named_graph(name: str) -> FeynmanGraph:
    """Library of recurring example graphs, keyed by short names."""
    builders = {
        # one-loop self-energy: two vertices joined by a double edge
        "oneloop-se": lambda: graph_from_spec(2, [(0, 1), (0, 1)], externals=[0, 1]),
        # one-loop triangle with three external legs
        "triangle": lambda: graph_from_spec(3, [(0, 1), (1, 2), (0, 2)], externals=[0, 1, 2]),
        # two-loop vertex graph: triangle nested inside a triangle
        "nested2loop": lambda: graph_from_spec(
            5,
            [(0, 1), (0, 2), (1, 2), (1, 3), (2, 4), (3, 4)],
            externals=[0, 3, 4],
        ),
        # three-loop self-energy: both lines of a bubble dressed by bubbles
        "threeloop-b": lambda: graph_from_spec(
            6,
            [(0, 1), (1, 2), (1, 2), (2, 3), (0, 4), (4, 5), (4, 5), (5, 3)],
            externals=[0, 3],
        ),
        # three-loop two-point graph with negative superficial degree (D=4)
        "sixvertex-se": lambda: graph_from_spec(
            6,
            [(0, 1), (1, 5), (0, 4), (4, 5), (1, 2), (2, 3), (2, 3), (3, 4)],
            externals=[0, 5],
        ),
        # one-vertex tadpole: a self-loop with one external leg
        "tadpole": lambda: graph_from_spec(1, [(0, 0)], externals=[0]),
    }
    if name not in builders:
        raise KeyError(f"unknown graph name {name!r}; have {sorted(builders)}")
    return builders[name]()

"""Independent expansion oracle: exhaustive Wick pairings.

Enumerates every perfect matching of k labeled field points, c source points
and 3 half-edges per interaction vertex, keeps the connected graphs, and
groups them by canonical class.  The class coefficient is
count / (V! * 6^V * c!), which is the textbook expansion weight and serves
as the ground truth for 1/Sym bookkeeping; no graph-automorphism code is
involved on this path.
"""

from fractions import Fraction

from phi3hopf.graphs import FeynmanGraph, Vertex


def _matchings(points):
    if not points:
        yield []
        return
    first = points[0]
    for j in range(1, len(points)):
        rest = points[1:j] + points[j + 1:]
        for m in _matchings(rest):
            yield [(first, points[j])] + m


def wick_classes(n_vertices: int, k_ext: int, n_crosses: int = 0) -> dict:
    """Map canonical encoding -> (exact coefficient, representative graph).

    Only connected classes are returned; disconnected matchings are dropped.
    """
    owners = (
        [("ext", i) for i in range(k_ext)]
        + [("cross", None) for _ in range(n_crosses)]
        + [("v", v) for v in range(n_vertices) for _ in range(3)]
    )
    if len(owners) % 2:
        return {}

    def vertex_id(owner):
        kind, idx = owner
        if kind == "v":
            return idx
        if kind == "ext":
            return n_vertices + idx
        return None  # cross ids assigned per matching

    counts: dict[str, int] = {}
    reps: dict[str, FeynmanGraph] = {}
    base_vertices = [Vertex("int3") for _ in range(n_vertices)] + [
        Vertex("ext", i) for i in range(k_ext)
    ]
    for m in _matchings(list(range(len(owners)))):
        vertices = list(base_vertices)
        ids = {}
        edges = []
        ok = True
        for i, j in m:
            pair = []
            for point in (i, j):
                owner = owners[point]
                if owner[0] == "cross":
                    if point not in ids:
                        ids[point] = len(vertices)
                        vertices.append(Vertex("cross"))
                    pair.append(ids[point])
                else:
                    pair.append(vertex_id(owner))
            edges.append(tuple(pair))
        try:
            g = FeynmanGraph(vertices, edges)
        except ValueError:
            continue
        if not g.is_connected():
            continue
        enc = g.encoding()
        counts[enc] = counts.get(enc, 0) + 1
        reps.setdefault(enc, g)

    denom = Fraction(1)
    for v in range(1, n_vertices + 1):
        denom *= 6 * v
    for c in range(2, n_crosses + 1):
        denom *= c
    return {enc: (Fraction(n, 1) / denom, reps[enc]) for enc, n in counts.items()}

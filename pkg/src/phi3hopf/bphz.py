"""The subtraction engine: prepared integrands, counterterms, finite amplitudes.

The recursion works entirely on integrand DAGs over one global, adapted
momentum routing of the host graph:

* the prepared integrand of an edge set S adds, for every family of disjoint
  divergent proper 1PI subgraphs inside S, the product of negated Taylor
  polynomials of the members' prepared integrands (Taylor in everything
  except the member's own loop momenta) times the integrand of the remaining
  edges;
* the renormalized integrand subtracts the overall Taylor polynomial in the
  external momenta when the whole graph is superficially divergent;
* numeric counterterms are cutoff integrals of the Taylor coefficients,
  memoized by canonical form, label and regulator configuration.

The convolution identity (renormalized = bare convolved with counterterms,
summed over the graph coproduct) is checked on a shared tensor grid of
per-loop nodes, on which products of independent subgraph and cograph
integrals factorize exactly and both sides agree to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .graphs import FeynmanGraph, Subgraph, divergent_subgraphs, is_1pi, stats
from .integrand import (
    Node,
    add,
    const,
    mul,
    neg,
    node_depends_on,
    powi,
    propagator,
    taylor_polynomial,
    taylor_subtract,
)
from .routing import Integrand, MomentumRouting, build_integrand, route_momenta
from .numerics.fits import linear_log_fit, loglog_slope
from .numerics.quadrature import (
    NodeSet,
    RegulatorConfig,
    ball_mc_nodes,
    evaluate_integrand,
    integrate,
    sphere_product_nodes,
)

MAX_RECURSION_LOOPS = 4


# -- routing-aware assembly -----------------------------------------------------


@dataclass
class RoutedGraph:
    """A graph with its adapted routing and derived bookkeeping."""

    graph: FeynmanGraph
    routing: MomentumRouting
    dimension: int

    @property
    def basis_size(self) -> int:
        return self.routing.basis_size

    def external_indices(self) -> tuple[int, ...]:
        return tuple(range(self.routing.n_loops, self.basis_size))

    def internal_edge_indices(self) -> frozenset[int]:
        ids = set(self.graph.internal_ids())
        return frozenset(
            i for i, (u, v) in enumerate(self.graph.edges) if u in ids and v in ids
        )

    def edges_node(self, edge_indices: frozenset[int]) -> Node:
        factors = [propagator(self.routing.edge_momenta[i]) for i in sorted(edge_indices)]
        return mul(*factors) if factors else const(1)

    def loop_indices_of(self, sub: Subgraph) -> tuple[int, ...]:
        loops = tuple(
            j for j, edge_idx in enumerate(self.routing.loop_edges) if edge_idx in sub.edge_indices
        )
        expected = len(sub.edge_indices) - len(sub.vertex_ids) + 1
        if len(loops) != expected:
            raise AssertionError("routing is not adapted to a divergent subgraph")
        return loops


def routed(g: FeynmanGraph, dimension: int) -> RoutedGraph:
    if g.n_loops > MAX_RECURSION_LOOPS:
        raise ValueError(f"subtraction engine bounded at {MAX_RECURSION_LOOPS} loops")
    return RoutedGraph(graph=g, routing=route_momenta(g, dimension), dimension=dimension)


def _families_within(rg: RoutedGraph, edges: frozenset[int]) -> list[list[Subgraph]]:
    """Disjoint families of proper divergent subgraphs inside an edge set."""
    subs = [
        s
        for s in divergent_subgraphs(rg.graph, rg.dimension)
        if frozenset(s.edge_indices) < edges
    ]
    families: list[list[Subgraph]] = []

    def extend(start: int, chosen: list[Subgraph]) -> None:
        for i in range(start, len(subs)):
            cand = subs[i]
            if all(cand.vertex_ids.isdisjoint(c.vertex_ids) for c in chosen):
                chosen.append(cand)
                families.append(list(chosen))
                extend(i + 1, chosen)
                chosen.pop()

    extend(0, [])
    return families


def prepared_node(rg: RoutedGraph, edges: Optional[frozenset[int]] = None,
                  _memo: Optional[dict] = None) -> Node:
    """Prepared integrand of an edge set: all divergent subgraphs subtracted."""
    if edges is None:
        edges = rg.internal_edge_indices()
    if _memo is None:
        _memo = {}
    if edges in _memo:
        return _memo[edges]
    bare = rg.edges_node(edges)
    terms = [bare]
    for family in _families_within(rg, edges):
        used = frozenset().union(*(f.edge_indices for f in family))
        cograph = rg.edges_node(edges - used)
        factors = [cograph]
        for member in family:
            inner = prepared_node(rg, frozenset(member.edge_indices), _memo)
            scaled = [
                i for i in range(rg.basis_size) if i not in rg.loop_indices_of(member)
            ]
            factors.append(neg(taylor_polynomial(inner, scaled, member.omega)))
        terms.append(mul(*factors))
    result = add(*terms)
    _memo[edges] = result
    return result


def renormalized_node(rg: RoutedGraph) -> Node:
    """Fully subtracted integrand: prepared term minus its overall Taylor part."""
    prep = prepared_node(rg)
    omega = rg.graph.omega(rg.dimension)
    if omega < 0:
        return prep
    return taylor_subtract(prep, omega, rg.external_indices())


def prepared_integrand(g: FeynmanGraph, dimension: int, mode: str = "symbolic"):
    """Prepared term of a 1PI graph over its adapted routing.

    Symbolic mode returns the integrand DAG (base case: graphs without
    divergent proper subgraphs return their bare integrand); numeric mode is
    not defined here -- prepared terms are consumed by the amplitude and
    counterterm evaluators, which attach a regulator.
    """
    if mode != "symbolic":
        raise ValueError("prepared terms are symbolic; integrate via the amplitude surface")
    if not is_1pi(g):
        raise ValueError("prepared terms are defined for 1PI graphs")
    return prepared_node(routed(g, dimension))


def bare_node(rg: RoutedGraph) -> Node:
    return build_integrand(rg.graph, rg.routing).node


# -- external momentum placement ---------------------------------------------------


def external_vectors(rg: RoutedGraph, p: Sequence[float] | float) -> list[np.ndarray]:
    """Concrete D-vectors for the independent external momenta.

    A scalar p puts the first external momentum at magnitude p along axis 0
    and any further independent externals along later axes (desk-scale
    defaults for the worked graphs); an explicit list of vectors is passed
    through.
    """
    D = rg.dimension
    n_ind = rg.basis_size - rg.routing.n_loops
    if np.isscalar(p):
        vecs = []
        for j in range(n_ind):
            v = np.zeros(D)
            v[min(j, D - 1)] = float(p)
            vecs.append(v)
        return vecs
    vecs = [np.asarray(v, dtype=float) for v in p]
    if len(vecs) != n_ind:
        raise ValueError(f"need {n_ind} independent external momenta, got {len(vecs)}")
    return vecs


def _nodes_for(rg: RoutedGraph, cfg: RegulatorConfig, p) -> NodeSet:
    ext = external_vectors(rg, p)
    if cfg.method == "sphere":
        if rg.routing.n_loops != 1:
            raise ValueError("the spherical product rule applies to one-loop graphs")
        if len(ext) > 1 and any(np.any(v[1:] != 0) for v in ext):
            raise ValueError("the spherical product rule needs externals along axis 0")
        return sphere_product_nodes(cfg, externals=ext)
    return ball_mc_nodes(cfg, rg.routing.n_loops, externals=ext)


# -- public amplitude surface ---------------------------------------------------


@dataclass(frozen=True)
class CountertermValue:
    encoding: str
    label: int
    value: float
    cfg_key: tuple


_ct_memo: dict[tuple, CountertermValue] = {}


def counterterm(g: FeynmanGraph, label: int, cfg: RegulatorConfig, mode: str = "numeric"):
    """Taylor-coefficient counterterm of a divergent graph.

    Numeric mode integrates -T_r[prepared](p -> unit vector) under the
    regulator; symbolic mode returns the pre-integration DAG.  Values are
    memoized by (canonical form, label, regulator key); inserts are
    idempotent, so evaluation order across graphs cannot change results.
    """
    rg = routed(g, cfg.dimension)
    omega = g.omega(cfg.dimension)
    if label % 2:
        raise ValueError("odd counterterm labels vanish by parity")
    if label > omega:
        raise ValueError(f"label {label} exceeds superficial degree {omega}")
    prep = prepared_node(rg)
    node = neg(_taylor_list(prep, rg.external_indices(), max(omega, 0))[label])
    if mode == "symbolic":
        return node
    key = (g.encoding(), label, cfg.key())
    if key in _ct_memo:
        return _ct_memo[key]
    # the label-0 coefficient carries no external dependence; the label-2
    # coefficient of a two-point graph is read off at a unit external momentum
    nodes = _nodes_for(rg, cfg, 0.0 if label == 0 else 1.0)
    value, _ = integrate(node, nodes)
    result = CountertermValue(encoding=g.encoding(), label=label, value=value, cfg_key=cfg.key())
    _ct_memo.setdefault(key, result)
    return _ct_memo[key]


def _taylor_list(node: Node, scaled, order: int) -> list[Node]:
    from .integrand import taylor_coefficients

    return taylor_coefficients(node, scaled, order)


def renormalized_amplitude(g: FeynmanGraph, p, cfg: RegulatorConfig) -> tuple[float, float]:
    """Cutoff integral of the fully subtracted integrand; (value, stderr)."""
    if not is_1pi(g):
        raise ValueError("renormalized amplitudes are defined for 1PI graphs")
    rg = routed(g, cfg.dimension)
    node = renormalized_node(rg)
    nodes = _nodes_for(rg, cfg, p)
    value, err = integrate(node, nodes)
    if not math.isfinite(value):
        raise ArithmeticError(f"quadrature produced a non-finite value for {g.encoding()}")
    return value, err


def bare_amplitude(g: FeynmanGraph, p, cfg: RegulatorConfig) -> tuple[float, float]:
    rg = routed(g, cfg.dimension)
    nodes = _nodes_for(rg, cfg, p)
    return integrate(bare_node(rg), nodes)


def cutoff_ladder(
    g: FeynmanGraph,
    p,
    cfg: RegulatorConfig,
    ladder: Sequence[float] = (10.0, 20.0, 40.0, 80.0),
) -> dict:
    """Bare and renormalized amplitudes over a cutoff ladder, shell by shell.

    Values at successive cutoffs share the common inner region: each shell
    between ladder rungs is integrated once (with at least cfg.samples
    nodes), so the reported Cauchy differences are direct shell integrals
    with their own Monte Carlo errors.
    """
    rg = routed(g, cfg.dimension)
    ext = external_vectors(rg, p)
    bare = bare_node(rg)
    ren = renormalized_node(rg)
    bounds = [0.0, *ladder]
    bare_vals, ren_vals = [], []
    bare_acc = ren_acc = 0.0
    bare_err_sq = ren_err_sq = 0.0
    shell_diffs = []
    for i, (lo, hi) in enumerate(zip(bounds[:-1], bounds[1:])):
        shard = RegulatorConfig(
            cutoff=hi,
            dimension=cfg.dimension,
            method="mc",
            samples=cfg.samples,
            seed=cfg.seed + i,
            strata=cfg.strata,
        )
        nodes = ball_mc_nodes(shard, rg.routing.n_loops, externals=ext, r_min=lo, r_max=hi)
        b, be = integrate(bare, nodes)
        r, re = integrate(ren, nodes)
        bare_acc += b
        ren_acc += r
        bare_err_sq += be**2
        ren_err_sq += re**2
        bare_vals.append((bare_acc, math.sqrt(bare_err_sq)))
        ren_vals.append((ren_acc, math.sqrt(ren_err_sq)))
        if i > 0:
            shell_diffs.append((abs(r), re))
    fit = linear_log_fit(list(ladder), [v for v, _ in bare_vals])
    return {
        "graph": g.encoding(),
        "dimension": cfg.dimension,
        "ladder": list(ladder),
        "bare": bare_vals,
        "renormalized": ren_vals,
        "cauchy_differences": shell_diffs,
        "bare_log_fit": fit,
    }


def tail_profile(
    g: FeynmanGraph,
    dimension: int,
    p,
    radii: Sequence[float],
    n_directions: int = 64,
    seed: int = 11,
) -> dict:
    """Direction-averaged |subtracted integrand| at fixed loop radii.

    All loop momenta are scaled together: q_i = r * d_i for random unit
    directions d_i (antithetic pairs), magnitudes averaged after taking
    absolute values, and the log-log slope fitted across radii.
    """
    rg = routed(g, dimension)
    node = renormalized_node(rg)
    ext = external_vectors(rg, p)
    rng = np.random.default_rng(seed)
    L, D = rg.routing.n_loops, dimension
    dirs = rng.standard_normal((n_directions, L, D))
    dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
    dirs = np.concatenate([dirs, -dirs])
    means = []
    B = rg.basis_size
    for r in radii:
        samples = np.zeros((len(dirs), B, D))
        samples[:, :L, :] = r * dirs
        for j, v in enumerate(ext):
            samples[:, L + j, :] = v
        vals = evaluate_integrand(node, NodeSet(samples=samples, weights=np.ones(len(dirs)), n_loops=L))
        means.append(float(np.mean(np.abs(vals))))
    fit = loglog_slope(list(radii), means)
    return {"radii": list(radii), "mean_abs": means, **fit}


# -- the convolution identity ------------------------------------------------------


def _slot_grid(rg: RoutedGraph, cfg: RegulatorConfig, p) -> tuple[list[NodeSet], NodeSet]:
    """Per-loop-slot node sets (full basis layout) and their tensor grid."""
    ext = external_vectors(rg, p)
    L, D, B = rg.routing.n_loops, rg.dimension, rg.basis_size
    per_slot = max(int(round(cfg.samples ** (1.0 / max(L, 1)))), 64)
    slot_sets = []
    for slot in range(L):
        shard = RegulatorConfig(
            cutoff=cfg.cutoff,
            dimension=cfg.dimension,
            method="mc",
            samples=per_slot,
            seed=cfg.seed + 101 * slot,
            strata=cfg.strata,
        )
        one = ball_mc_nodes(shard, 1, externals=[])
        n = one.count
        samples = np.zeros((n, B, D))
        samples[:, slot, :] = one.samples[:, 0, :]
        for j, v in enumerate(ext):
            samples[:, L + j, :] = v
        slot_sets.append(NodeSet(samples=samples, weights=one.weights, n_loops=L))
    joint = slot_sets[0]
    for other in slot_sets[1:]:
        na, nb = joint.count, other.count
        samples = np.repeat(joint.samples, nb, axis=0)
        tiled = np.tile(other.samples, (na, 1, 1))
        varying = np.any(other.samples != other.samples[0:1], axis=0)
        samples[:, varying] = tiled[:, varying]
        weights = (joint.weights[:, None] * other.weights[None, :]).ravel()
        joint = NodeSet(samples=samples, weights=weights, n_loops=L)
    return slot_sets, joint


def check_ar_equals_a_star_c(g: FeynmanGraph, p, cfg: RegulatorConfig) -> dict:
    """Evaluate both sides of the convolution identity on shared nodes.

    Left: the renormalized amplitude (subtracted integrand over the grid).
    Right: bare + counterterm + the coproduct sum of contracted amplitudes
    times subgraph counterterms, each factor integrated over its own slots
    of the same grid.  The reported deviation is pure floating-point
    reassociation when the identity holds.
    """
    rg = routed(g, cfg.dimension)
    slot_sets, joint = _slot_grid(rg, cfg, p)
    omega = g.omega(cfg.dimension)
    edges = rg.internal_edge_indices()

    ren = renormalized_node(rg)
    lhs, _ = integrate(ren, joint)

    bare = rg.edges_node(edges)
    a_gamma, _ = integrate(bare, joint)
    prep = prepared_node(rg)
    if omega >= 0:
        c_gamma, _ = integrate(neg(taylor_polynomial(prep, rg.external_indices(), omega)), joint)
    else:
        c_gamma = 0.0

    cross_terms = []
    rhs = a_gamma + c_gamma
    for family in _families_within(rg, edges):
        used = frozenset().union(*(f.edge_indices for f in family))
        cograph = rg.edges_node(edges - used)
        factorizable = all(m.omega == 0 for m in family)
        if factorizable:
            # A(contracted) x prod C(members): separate integrals, shared slots
            value = 1.0
            c_parts = []
            for member in family:
                inner = prepared_node(rg, frozenset(member.edge_indices))
                scaled = [i for i in range(rg.basis_size) if i not in rg.loop_indices_of(member)]
                c_node = neg(taylor_polynomial(inner, scaled, member.omega))
                slots = rg.loop_indices_of(member)
                c_val = _integrate_on_slots(c_node, slot_sets, slots)
                c_parts.append(c_val)
                value *= c_val
            cograph_slots = tuple(
                j for j in range(rg.routing.n_loops)
                if rg.routing.loop_edges[j] in (edges - used)
            )
            a_val = _integrate_on_slots(cograph, slot_sets, cograph_slots)
            term = a_val * value
            cross_terms.append({"members": len(family), "mode": "factorized", "value": term})
        else:
            factors = [cograph]
            for member in family:
                inner = prepared_node(rg, frozenset(member.edge_indices))
                scaled = [i for i in range(rg.basis_size) if i not in rg.loop_indices_of(member)]
                factors.append(neg(taylor_polynomial(inner, scaled, member.omega)))
            term, _ = integrate(mul(*factors), joint)
            cross_terms.append({"members": len(family), "mode": "joint", "value": term})
        rhs += cross_terms[-1]["value"]

    scale = max(abs(lhs), abs(rhs), 1e-300)
    return {
        "graph": g.encoding(),
        "dimension": cfg.dimension,
        "lhs_renormalized": lhs,
        "rhs_convolution": rhs,
        "relative_deviation": abs(lhs - rhs) / scale,
        "bare": a_gamma,
        "counterterm": c_gamma,
        "cross_terms": cross_terms,
    }


def _integrate_on_slots(node: Node, slot_sets: list[NodeSet], slots: Sequence[int]) -> float:
    """Integral of a node that depends only on the given loop slots.

    The factor's own integral runs over the tensor product of those slots'
    node sets; the other slots do not enter (their measures belong to the
    other factors of the identity).
    """
    slots = tuple(slots)
    if not slots:
        # no loop dependence: constant in the loop variables
        base = slot_sets[0]
        vals = evaluate_integrand(node, NodeSet(base.samples[:1], np.ones(1), base.n_loops))
        return float(vals[0])
    acc_nodes = slot_sets[slots[0]]
    for s in slots[1:]:
        other = slot_sets[s]
        na, nb = acc_nodes.count, other.count
        samples = np.repeat(acc_nodes.samples, nb, axis=0)
        tiled = np.tile(other.samples, (na, 1, 1))
        samples[:, s, :] = tiled[:, s, :]
        weights = (acc_nodes.weights[:, None] * other.weights[None, :]).ravel()
        acc_nodes = NodeSet(samples, weights, acc_nodes.n_loops)
    value, _ = integrate(node, acc_nodes)
    return value


# -- Rota-Baxter models --------------------------------------------------------------


class RationalFn:
    """Exact rational function in one variable, regular at the origin."""

    __slots__ = ("num", "den")

    def __init__(self, num: Sequence[Fraction], den: Sequence[Fraction]):
        self.num = tuple(Fraction(c) for c in num)
        self.den = tuple(Fraction(c) for c in den)
        if not self.den or self.den[0] == 0:
            raise ValueError("rational function must be regular at the origin")

    @staticmethod
    def constant(c: Fraction) -> "RationalFn":
        return RationalFn([Fraction(c)], [Fraction(1)])

    def __mul__(self, other: "RationalFn") -> "RationalFn":
        return RationalFn(_poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    def __add__(self, other: "RationalFn") -> "RationalFn":
        num = _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den))
        return RationalFn(num, _poly_mul(self.den, other.den))

    def at_zero(self) -> Fraction:
        num0 = self.num[0] if self.num else Fraction(0)
        return num0 / self.den[0]

    def __eq__(self, other) -> bool:
        # a/b == c/d  iff  a d == c b, exactly
        return _poly_mul(self.num, other.den) == _poly_mul(other.num, self.den)


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def _poly_add(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else Fraction(0)) + (b[i] if i < len(b) else Fraction(0))
        for i in range(n)
    )


class LaurentPoly:
    """Exact Laurent polynomial in one symbol, for the pole-part model."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, Fraction] | None = None):
        self.coeffs = {k: Fraction(v) for k, v in (coeffs or {}).items() if v != 0}

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return LaurentPoly(out)

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        out: dict[int, Fraction] = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, Fraction(0)) + v1 * v2
        return LaurentPoly(out)

    def pole_part(self) -> "LaurentPoly":
        return LaurentPoly({k: v for k, v in self.coeffs.items() if k < 0})

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return "Laurent(" + ", ".join(f"{k}: {v}" for k, v in sorted(self.coeffs.items())) + ")"


def rota_baxter_check(model: str, trials: int, seed: int) -> dict:
    """Verify T[fg] + T[f]T[g] = T[T[f]g + fT[g]] on seeded random pairs.

    ``eval-at-zero``: T is evaluation at 0 on rational functions regular at
    the origin (both sides reduce to 2 f(0) g(0)); checked with exact
    rationals on random numerator/denominator polynomials.
    ``pole-part``: T projects Laurent polynomials onto strictly negative
    powers; checked exactly coefficient by coefficient.
    """
    import random as _random

    rng = _random.Random(seed)
    failures = 0
    if model == "eval-at-zero":
        for _ in range(trials):
            f, g = _rand_rational_fn(rng), _rand_rational_fn(rng)
            T = lambda h: RationalFn.constant(h.at_zero())
            lhs = T(f * g) + T(f) * T(g)
            rhs = T(T(f) * g + f * T(g))
            if lhs != rhs:
                failures += 1
    elif model == "pole-part":
        for _ in range(trials):
            f = _rand_laurent(rng)
            g = _rand_laurent(rng)
            T = LaurentPoly.pole_part
            lhs = T(f * g) + T(f) * T(g)
            rhs = T(T(f) * g + f * T(g))
            if lhs != rhs:
                failures += 1
    else:
        raise ValueError(f"unknown Rota-Baxter model {model!r}")
    return {"model": model, "trials": trials, "failures": failures, "passed": failures == 0}


def _rand_laurent(rng) -> LaurentPoly:
    return LaurentPoly(
        {
            k: Fraction(rng.randint(-6, 6), rng.randint(1, 4))
            for k in rng.sample(range(-4, 5), rng.randint(1, 5))
        }
    )


def _rand_rational_fn(rng) -> RationalFn:
    num = [Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(rng.randint(1, 4))]
    den = [Fraction(rng.randint(1, 6), rng.randint(1, 4))] + [
        Fraction(rng.randint(-6, 6), rng.randint(1, 4)) for _ in range(rng.randint(0, 3))
    ]
    return RationalFn(num, den)

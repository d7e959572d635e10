"""Cutoff-regularized quadrature over loop momenta.

Everything integrates d^D q / (2 pi)^D per loop momentum with a sharp radial
cutoff |q_i| <= Lambda, in units of the mass (m = 1).  Two node generators:

* Monte Carlo in spherical coordinates: uniform directions in antithetic
  pairs (q, -q), radii uniform in shell volume between radial strata
  boundaries.  Seeded and deterministic.
* A deterministic spherical product rule for one-loop integrands whose
  angular dependence enters through a single external direction: composite
  Gauss-Legendre panels in the radius times Gauss-Legendre in cos(theta)
  with the (1-x^2)^((D-3)/2) surface weight folded in.

Node sets carry weights that already include the measure normalization, so
``integrate`` is a plain weighted sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..integrand import Node
from .kernels import evaluate_tape
from .tape import Tape, compile_node


def sphere_surface(k: int) -> float:
    """Surface area of the unit k-sphere S^k embedded in R^(k+1)."""
    return 2 * math.pi ** ((k + 1) / 2) / math.gamma((k + 1) / 2)


def ball_volume(D: int, radius: float) -> float:
    return sphere_surface(D - 1) / D * radius**D


@dataclass(frozen=True)
class RegulatorConfig:
    """Cutoff, dimension and quadrature choice for numeric evaluation."""

    cutoff: float
    dimension: int
    method: str = "mc"  # "mc" | "sphere"
    samples: int = 200_000
    seed: int = 7
    strata: tuple[float, ...] = ()  # extra radial boundaries below the cutoff

    def __post_init__(self):
        if self.cutoff <= 0:
            raise ValueError("cutoff must be positive")
        if self.dimension not in (4, 6):
            raise ValueError("dimension must be 4 or 6")
        if self.method not in ("mc", "sphere"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.method == "mc" and self.seed is None:
            raise ValueError("Monte Carlo quadrature requires a seed")

    def key(self) -> tuple:
        return (self.cutoff, self.dimension, self.method, self.samples, self.seed, self.strata)


@dataclass
class NodeSet:
    """Quadrature nodes for L loop momenta plus fixed external rows.

    ``samples`` has shape (n, basis, D); loop rows vary per node, external
    rows are constant.  ``weights`` include the (2 pi)^-D per-loop measure.
    Antithetic sets store each pair as rows (i, i + n/2).
    """

    samples: np.ndarray
    weights: np.ndarray
    n_loops: int
    antithetic: bool = False

    @property
    def count(self) -> int:
        return self.samples.shape[0]


def _directions(rng: np.random.Generator, n: int, D: int) -> np.ndarray:
    v = rng.standard_normal((n, D))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    # resample the (measure-zero) degenerate rows deterministically
    bad = norms[:, 0] < 1e-12
    while bad.any():
        v[bad] = rng.standard_normal((int(bad.sum()), D))
        norms = np.linalg.norm(v, axis=1, keepdims=True)
        bad = norms[:, 0] < 1e-12
    return v / norms


def _radial_strata(cfg: RegulatorConfig, r_min: float, r_max: float) -> list[tuple[float, float]]:
    bounds = sorted({r_min, r_max, *(s for s in cfg.strata if r_min < s < r_max), *(
        b for b in (1.0, 4.0) if r_min < b < r_max
    )})
    return list(zip(bounds[:-1], bounds[1:]))


def ball_mc_nodes(
    cfg: RegulatorConfig,
    n_loops: int,
    externals: Sequence[np.ndarray] = (),
    r_min: float = 0.0,
    r_max: Optional[float] = None,
) -> NodeSet:
    """Antithetic, radially stratified uniform sampling of the cutoff ball.

    Within each radial stratum the radius is drawn uniform in shell volume;
    strata get samples proportional to their share plus a floor.  Antithetic
    pairing (q -> -q on all loops) cancels parity-odd integrands exactly.
    """
    D = cfg.dimension
    r_max = cfg.cutoff if r_max is None else r_max
    rng = np.random.default_rng(cfg.seed)
    total_volume = ball_volume(D, r_max) - ball_volume(D, r_min)
    measure = (2 * math.pi) ** (-D * n_loops)
    n_half = max(cfg.samples // 2, 1)

    if n_loops == 1:
        # radial stratification: per-stratum blocks weighted by shell volume
        strata = _radial_strata(cfg, r_min, r_max)
        all_q: list[np.ndarray] = []
        all_w: list[np.ndarray] = []
        for lo, hi in strata:
            vol = ball_volume(D, hi) - ball_volume(D, lo)
            n_s = max(int(n_half * (vol / total_volume)), n_half // (4 * len(strata)) + 1)
            u = rng.random(n_s)
            radii = (lo**D + u * (hi**D - lo**D)) ** (1.0 / D)
            q = (_directions(rng, n_s, D) * radii[:, None])[:, None, :]
            all_q.append(q)
            all_w.append(np.full(n_s, (vol / n_s) * 0.5 * measure))
        q = np.concatenate(all_q)
        w = np.concatenate(all_w)
    else:
        # independent uniform-in-ball radii per loop momentum
        q = np.empty((n_half, n_loops, D))
        for l in range(n_loops):
            u = rng.random(n_half)
            radii = (r_min**D + u * (r_max**D - r_min**D)) ** (1.0 / D)
            q[:, l, :] = _directions(rng, n_half, D) * radii[:, None]
        w = np.full(n_half, (total_volume**n_loops / n_half) * 0.5 * measure)

    q = np.concatenate([q, -q])  # antithetic pairs kill parity-odd terms exactly
    w = np.concatenate([w, w])
    out = _with_externals(q, w, externals, D)
    out.antithetic = True
    return out


def shell_mc_nodes(cfg: RegulatorConfig, n_loops: int, externals, lo: float, hi: float) -> NodeSet:
    """MC nodes restricted to the radial shell [lo, hi] on every loop."""
    return ball_mc_nodes(cfg, n_loops, externals, r_min=lo, r_max=hi)


def _with_externals(q: np.ndarray, w: np.ndarray, externals: Sequence[np.ndarray], D: int) -> NodeSet:
    n, n_loops = q.shape[0], q.shape[1]
    basis = n_loops + len(externals)
    samples = np.zeros((n, basis, D))
    samples[:, :n_loops, :] = q
    for j, p in enumerate(externals):
        samples[:, n_loops + j, :] = np.asarray(p)
    return NodeSet(samples=samples, weights=w, n_loops=n_loops)


def sphere_product_nodes(
    cfg: RegulatorConfig,
    externals: Sequence[np.ndarray] = (),
    radial_panels: int = 24,
    radial_order: int = 16,
    angular_order: int = 48,
) -> NodeSet:
    """Deterministic product rule for one loop momentum.

    Valid for integrands depending on the loop direction only through the
    angle with the first coordinate axis (one-scale external momenta along
    e_0, or no angular dependence at all).
    """
    D = cfg.dimension
    # composite radial panels: geometric refinement toward the mass scale
    bounds = [0.0]
    r = 1.0
    while r < cfg.cutoff:
        bounds.append(min(r, cfg.cutoff))
        r *= 2
    bounds.append(cfg.cutoff)
    bounds = sorted(set(bounds))
    gl_x, gl_w = np.polynomial.legendre.leggauss(radial_order)
    radii, r_weights = [], []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        radii.append(mid + half * gl_x)
        r_weights.append(half * gl_w)
    radii = np.concatenate(radii)
    r_weights = np.concatenate(r_weights)

    # theta-midpoint rule: sin^(D-2)(theta) f(cos theta) extends smoothly and
    # evenly through 0 and pi, so the midpoint rule converges spectrally
    theta = (np.arange(angular_order) + 0.5) * math.pi / angular_order
    ax = np.cos(theta)
    ang_weight = (math.pi / angular_order) * np.sin(theta) ** (D - 2)
    surface = sphere_surface(D - 2)

    R, X = np.meshgrid(radii, ax, indexing="ij")
    _, S = np.meshgrid(radii, np.sin(theta), indexing="ij")
    WR, WX = np.meshgrid(r_weights, ang_weight, indexing="ij")
    q = np.zeros((R.size, 1, D))
    q[:, 0, 0] = (R * X).ravel()
    q[:, 0, 1] = (R * S).ravel()
    w = (surface * R ** (D - 1) * WR * WX).ravel() * (2 * math.pi) ** (-D)
    return _with_externals(q, w, externals, D)


def product_grid(a: NodeSet, b: NodeSet) -> NodeSet:
    """Tensor grid of two node sets over disjoint loop slots.

    External rows must agree; the joint weight is the product of weights, so
    sums over the grid factor exactly into products of per-set sums for
    integrands that split across the slots.
    """
    na, nb = a.count, b.count
    D = a.samples.shape[2]
    la, lb = a.n_loops, b.n_loops
    ext_a = a.samples[0, la:, :]
    ext_b = b.samples[0, lb:, :]
    if ext_a.shape != ext_b.shape or not np.array_equal(ext_a, ext_b):
        raise ValueError("product_grid requires matching external rows")
    basis = la + lb + ext_a.shape[0]
    samples = np.zeros((na * nb, basis, D))
    samples[:, :la, :] = np.repeat(a.samples[:, :la, :], nb, axis=0)
    samples[:, la : la + lb, :] = np.tile(b.samples[:, :lb, :], (na, 1, 1))
    samples[:, la + lb :, :] = ext_a
    weights = (a.weights[:, None] * b.weights[None, :]).ravel()
    return NodeSet(samples=samples, weights=weights, n_loops=la + lb)


# -- integration --------------------------------------------------------------


def evaluate_integrand(node: Node, nodes: NodeSet) -> np.ndarray:
    tape = compile_node(node, nodes.samples.shape[1])
    return evaluate_tape(tape, nodes.samples)


def integrate(node: Node, nodes: NodeSet) -> tuple[float, float]:
    """Weighted sum and its Monte Carlo standard error.

    For antithetic sets, each +/- pair counts as one sample when estimating
    the variance; deterministic rules report zero error.
    """
    vals = evaluate_integrand(node, nodes)
    contrib = vals * nodes.weights
    total = float(np.sum(contrib))
    if nodes.antithetic:
        half = len(contrib) // 2
        pair_sums = contrib[:half] + contrib[half:]
        stderr = float(np.std(pair_sums) * math.sqrt(half))
    else:
        stderr = 0.0
    return total, stderr

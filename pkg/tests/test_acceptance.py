"""Acceptance gate: every exit criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one pass/fail line per
criterion.  Criterion 3 carries one strict xfail: two of the ten quoted
fourth-order two-point coefficients are misprints (the exhaustive
Wick-pairing oracle, the symmetry-factor definition and the recursion all
agree against them -- see the decisions ledger); the Wick-verified
term-for-term check runs alongside and passes.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from oracle_wick import wick_classes
from phi3hopf.bphz import (
    check_ar_equals_a_star_c,
    cutoff_ladder,
    rota_baxter_check,
    tail_profile,
)
from phi3hopf.ckhopf import (
    bare_coupling_graph_series,
    ck_coproduct,
    ck_instance,
    counterterm_character,
    generator_tokens,
    hd_to_hck,
    project_pi,
    registry,
)
from phi3hopf.graphs import (
    divergent_subgraph_families,
    divergent_subgraphs,
    graph_from_spec,
    named_graph,
    stats,
    sym_factor,
)
from phi3hopf.greens import ds_expansion, el_tree_expansion
from phi3hopf.hopf import (
    Character,
    antipode,
    character_series,
    check_hopf_axioms,
    convolve,
    coproduct,
    coproduct_left,
    coproduct_right,
    counit,
    get_instance,
)
from phi3hopf.numerics.quadrature import RegulatorConfig
from phi3hopf.ring import Poly, rand_rational
from phi3hopf.series import (
    SemidirectPair,
    TruncatedSeries,
    bare_coupling_series,
    diff_compose,
    diff_inverse,
    semidirect_inverse,
    semidirect_mul,
    series_mul,
    series_recip,
)


def report(number: int, ok: bool, text: str) -> None:
    print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'} - {text}")
    assert ok, f"criterion {number}: {text}"


def random_series(order, kind, rng):
    return TruncatedSeries(
        order, [Poly.one()] + [Poly.const(rand_rational(rng)) for _ in range(order)], kind
    )


def test_criterion_1_series_groups():
    t0 = time.time()
    f = TruncatedSeries(4, [Poly.one()] + [Poly.symbol(f"f{i}") for i in range(1, 5)], "inv")
    inv = series_recip(f)
    ok = inv.coeffs[1] == -Poly.symbol("f1")
    ok &= inv.coeffs[2] == Poly.symbol("f1") ** 2 - Poly.symbol("f2")

    fd = TruncatedSeries(3, [Poly.one()] + [Poly.symbol(f"f{i}") for i in range(1, 4)], "diff")
    gd = TruncatedSeries(3, [Poly.one()] + [Poly.symbol(f"g{i}") for i in range(1, 4)], "diff")
    comp = diff_compose(fd, gd)
    f1, f2, f3 = (Poly.symbol(s) for s in ("f1", "f2", "f3"))
    g1, g2, g3 = (Poly.symbol(s) for s in ("g1", "g2", "g3"))
    ok &= comp.coeffs[1] == f1 + g1
    ok &= comp.coeffs[2] == f2 + 2 * f1 * g1 + g2
    ok &= comp.coeffs[3] == f3 + 3 * f2 * g1 + 2 * f1 * g2 + f1 * g1**2 + g3

    rng = random.Random(1001)
    for _ in range(100):
        a, b, c = (random_series(10, "inv", rng) for _ in range(3))
        ok &= series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c))
        ok &= series_mul(a, series_recip(a)) == TruncatedSeries.one(10)
        d, e, h = (random_series(10, "diff", rng) for _ in range(3))
        ok &= diff_compose(diff_compose(d, e), h) == diff_compose(d, diff_compose(e, h))
        ok &= diff_compose(d, diff_inverse(d)) == TruncatedSeries.identity(10)
        pair_a = SemidirectPair(random_series(8, "diff", rng), random_series(8, "inv", rng))
        pair_b = SemidirectPair(random_series(8, "diff", rng), random_series(8, "inv", rng))
        ok &= semidirect_mul(pair_a, semidirect_inverse(pair_a)) == SemidirectPair.unit(8)
        ok &= semidirect_mul(
            semidirect_mul(pair_a, pair_b), semidirect_inverse(pair_b)
        ) == pair_a
    elapsed = time.time() - t0
    ok &= elapsed < 10
    report(1, ok, f"series group identities and axioms, exact ({elapsed:.1f}s < 10s)")


def test_criterion_2_hopf_axioms_and_duality():
    ok = True
    for name, grade in (
        ("unshuffle", 6),
        ("symmetric-functions", 6),
        ("faa-di-bruno", 6),
        ("sl2", 1),
        ("gl2", 1),
    ):
        ok &= check_hopf_axioms(get_instance(name), grade)["all_pass"]

    rng = random.Random(1002)
    sym = get_instance("symmetric-functions")
    fdb = get_instance("faa-di-bruno")
    for _ in range(50):
        a = Character.from_values(
            sym, {("x", n): Poly.const(rand_rational(rng)) for n in range(1, 9)}
        )
        b = Character.from_values(
            sym, {("x", n): Poly.const(rand_rational(rng)) for n in range(1, 9)}
        )
        ok &= character_series(convolve(a, b), 8) == series_mul(
            character_series(a, 8), character_series(b, 8)
        )
        c = Character.from_values(
            fdb, {("x", n): Poly.const(rand_rational(rng)) for n in range(1, 9)}
        )
        d = Character.from_values(
            fdb, {("x", n): Poly.const(rand_rational(rng)) for n in range(1, 9)}
        )
        ok &= character_series(convolve(c, d), 8) == diff_compose(
            character_series(c, 8), character_series(d, 8)
        )
    report(2, ok, "Hopf axioms (grade <= 6, relations reduced) and series duality (order 8, 50 characters)")


def _coeffs(terms, order):
    return sorted(
        (t.hbar_power, t.coefficient) for t in terms if t.lam_power == order
    )


def test_criterion_3_expansion_golden_files():
    trees = el_tree_expansion(3)
    ok = _coeffs(trees, 0) == [(0, Fraction(1))]
    ok &= _coeffs(trees, 1) == [(0, Fraction(1, 2))]
    ok &= _coeffs(trees, 2) == [(0, Fraction(1, 2))]
    ok &= (0, Fraction(1, 8)) in _coeffs(trees, 3)

    one_pt = ds_expansion(1, "J0", 3)
    ok &= _coeffs(one_pt, 1) == [(1, Fraction(1, 2))]
    # the two displayed third-order classes, identified by construction
    bubble_tadpole = graph_from_spec(3, [(0, 1), (0, 1), (1, 2), (2, 2)], externals=[0])
    bubble_cherry = graph_from_spec(3, [(0, 1), (0, 2), (1, 2), (1, 2)], externals=[0])
    by_enc = {t.graph.encoding(): t.coefficient for t in one_pt if t.lam_power == 3}
    ok &= by_enc[bubble_tadpole.encoding()] == Fraction(1, 4)
    ok &= by_enc[bubble_cherry.encoding()] == Fraction(1, 4)

    two_pt = ds_expansion(2, "J0", 4)
    ok &= _coeffs(two_pt, 2) == [(1, Fraction(1, 2)), (1, Fraction(1, 2))]
    # fourth order, term for term against the exhaustive pairing oracle
    oracle = {enc: c for enc, (c, _) in wick_classes(4, 2).items()}
    ours = {t.graph.encoding(): t.coefficient for t in two_pt if t.lam_power == 4}
    ok &= ours == oracle
    report(3, ok, "tree and Dyson-Schwinger expansions match the displayed "
                  "coefficients and the Wick oracle term-for-term")


@pytest.mark.xfail(
    strict=True,
    reason="two misprinted fourth-order coefficients in the quoted two-point "
    "display: the Wick oracle gives {1/2 x3, 1/4 x6, 1/8 x1}, not "
    "{1/2 x2, 1/4 x8}; see decisions ledger",
)
def test_criterion_3_displayed_lambda4_multiset_as_quoted():
    two_pt = ds_expansion(2, "J0", 4)
    multiset = sorted(t.coefficient for t in two_pt if t.lam_power == 4)
    quoted = sorted([Fraction(1, 2)] * 2 + [Fraction(1, 4)] * 8)
    print("\n[criterion 3] FAIL - quoted lambda^4 multiset {1/2 x2, 1/4 x8} "
          "(spec/paper misprint, see decisions ledger; Wick-verified check passes above)")
    assert multiset == quoted


def test_criterion_4_power_counting_table():
    ok = stats(named_graph("oneloop-se"), 4).omega == 0
    ok &= stats(named_graph("oneloop-se"), 6).omega == 2
    ok &= stats(named_graph("triangle"), 6).omega == 0
    ok &= stats(named_graph("sixvertex-se"), 4).omega == -4
    ok &= stats(named_graph("nested2loop"), 6).omega == 0
    # subgraphs of the nested vertex graph: the triangle diverges, the
    # four-leg square converges
    nested = named_graph("nested2loop")
    subs = divergent_subgraphs(nested, 6)
    ok &= len(subs) == 1 and subs[0].omega == 0 and subs[0].n_external == 3
    from phi3hopf.graphs import _edge_subgraph

    square_edges = tuple(
        i for i, (u, v) in enumerate(nested.edges) if {u, v} <= {1, 2, 3, 4} and u != v
    )
    square = _edge_subgraph(nested, square_edges, 6)
    ok &= square is not None and square.omega == -2
    ok &= stats(named_graph("threeloop-b"), 6).omega == 2
    for s in divergent_subgraphs(named_graph("threeloop-b"), 6):
        if len(s.edge_indices) == 2:
            ok &= s.omega == 2
    report(4, ok, "superficial degrees {0, 2, 0, -4, 0 & -2, 2} all exact")


def test_criterion_5_ck_hopf():
    t0 = time.time()
    inst = ck_instance()
    t_nested = registry().token_of(named_graph("nested2loop"), 0)
    t_tri = registry().token_of(named_graph("triangle"), 0)
    d = ck_coproduct(named_graph("nested2loop"))
    ok = d.terms == {
        ((t_nested,), ()): Poly.one(),
        ((), (t_nested,)): Poly.one(),
        ((t_tri,), (t_tri,)): Poly.one(),
    }
    toks = generator_tokens(3)
    for tok in toks:
        x = inst.gen(tok)
        dx = coproduct(x)
        ok &= coproduct_left(dx) == coproduct_right(dx)
        left = inst.zero()
        right = inst.zero()
        for (l, r), c in dx.terms.items():
            left = left + (antipode(inst.monomial(l)) * inst.monomial(r)) * c
            right = right + (inst.monomial(l) * antipode(inst.monomial(r))) * c
        target = inst.one() * counit(x)
        ok &= left == target and right == target
    elapsed = time.time() - t0
    ok &= elapsed < 120
    report(5, ok, f"coproduct golden form, coassociativity and five-term identity "
                  f"on all {len(toks)} generators with <= 3 loops ({elapsed:.1f}s < 2min)")


def test_criterion_6_bphz_numerics():
    t0 = time.time()
    g = named_graph("oneloop-se")
    cfg = RegulatorConfig(cutoff=80.0, dimension=4, method="mc", samples=1_000_000, seed=42)
    ladder = cutoff_ladder(g, 1.0, cfg)
    fit = ladder["bare_log_fit"]
    ok = fit["slope"] > 0 and fit["r2"] >= 0.999
    diffs = [d for d, _ in ladder["cauchy_differences"]]
    errs = [e for _, e in ladder["cauchy_differences"]]
    for k in range(len(diffs) - 1):
        ok &= diffs[k + 1] * 1.5 <= diffs[k] + 2 * math.hypot(errs[k], errs[k + 1])

    radii = np.geomspace(10, 1000, 12)
    s4 = tail_profile(g, 4, 1.0, radii)["slope"]
    s6 = tail_profile(g, 6, 1.0, radii)["slope"]
    s6t = tail_profile(named_graph("triangle"), 6, 1.0, radii)["slope"]
    ok &= abs(s4 + 5) <= 0.3 and abs(s6 + 7) <= 0.5 and abs(s6t + 7) <= 0.5
    elapsed = time.time() - t0
    ok &= elapsed < 300
    report(6, ok, f"bare log fit r2={fit['r2']:.6f}, Cauchy differences contract, "
                  f"tail slopes {s4:.2f}/{s6:.2f}/{s6t:.2f} ({elapsed:.0f}s < 5min)")


def test_criterion_7_convolution_identity():
    ok = True
    devs = []
    for name, dim in (
        ("oneloop-se", 6),
        ("triangle", 6),
        ("oneloop-se", 4),
        ("nested2loop", 6),
    ):
        cfg = RegulatorConfig(cutoff=8.0, dimension=dim, method="mc", samples=4000, seed=77)
        rep = check_ar_equals_a_star_c(named_graph(name), 1.0, cfg)
        devs.append(rep["relative_deviation"])
        ok &= rep["relative_deviation"] <= 1e-9
    report(7, ok, "renormalized = bare * counterterm on shared nodes, "
                  f"max deviation {max(devs):.2e} <= 1e-9")


def test_criterion_8_rota_baxter():
    a = rota_baxter_check("eval-at-zero", 200, seed=2024)
    b = rota_baxter_check("pole-part", 200, seed=2025)
    ok = a["passed"] and b["passed"]
    report(8, ok, "Rota-Baxter identity exact on 200 seeded pairs per model")


def test_criterion_9_inclusion_projection():
    cfg = RegulatorConfig(cutoff=12.0, dimension=6, method="sphere")
    char = counterterm_character(cfg)
    se2 = registry().token_of(named_graph("oneloop-se"), 2)
    tri = registry().token_of(named_graph("triangle"), 0)

    # character applied to the image of the first diffeomorphism coordinate
    h1 = hd_to_hck(1, 1)
    applied = Fraction(0)
    for mono, c in h1.terms.items():
        val = c.const_value()
        for t in mono:
            val *= char(t)
        applied += val

    # the same coefficient through the truncated-series machinery, with the
    # identical memoized counterterm values as exact fractions
    z1 = TruncatedSeries(2, [1, 0, char(tri)], "inv")
    z3 = TruncatedSeries(2, [1, 0, Fraction(-1, 2) * char(se2)], "inv")
    lam_b = bare_coupling_series(z1, z3)
    ok = lam_b.coeffs[2] == Poly.const(applied)

    # projection of the graph-series form agrees through third order
    via_graphs = project_pi(bare_coupling_graph_series(1), 2, char)
    ok &= via_graphs == lam_b
    report(9, ok, "counterterm character on the inclusion equals the "
                  "bare-coupling coefficient exactly; projection matches at third order")

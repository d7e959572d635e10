"""Subtraction engine: counterterm values, finiteness diagnostics, identities."""

import math

import numpy as np
import pytest

from phi3hopf.bphz import (
    LaurentPoly,
    bare_amplitude,
    check_ar_equals_a_star_c,
    counterterm,
    cutoff_ladder,
    prepared_node,
    renormalized_amplitude,
    renormalized_node,
    rota_baxter_check,
    routed,
    tail_profile,
)
from phi3hopf.graphs import graph_from_spec, named_graph
from phi3hopf.integrand import taylor_coefficients
from phi3hopf.numerics.quadrature import (
    RegulatorConfig,
    ball_mc_nodes,
    integrate,
    sphere_product_nodes,
)


def radial_oracle(integrand_1d, D, cutoff):
    """High-precision radial integral S_(D-1)/(2 pi)^D * int r^(D-1) f(r) dr."""
    import mpmath

    surface = 2 * mpmath.pi ** (D / 2) / mpmath.gamma(D / 2)
    val = mpmath.quad(lambda r: r ** (D - 1) * integrand_1d(r), [0, 1, 4, cutoff])
    return float(surface / (2 * mpmath.pi) ** D * val)


class TestCountertermValues:
    def test_oneloop_d4_logarithmic(self):
        cfg = RegulatorConfig(cutoff=10.0, dimension=4, method="sphere")
        ct = counterterm(named_graph("oneloop-se"), 0, cfg)
        oracle = -radial_oracle(lambda r: 1 / (r**2 + 1) ** 2, 4, 10.0)
        assert abs(ct.value - oracle) < 1e-10 * abs(oracle)

    def test_triangle_d6(self):
        cfg = RegulatorConfig(cutoff=10.0, dimension=6, method="sphere")
        ct = counterterm(named_graph("triangle"), 0, cfg)
        oracle = -radial_oracle(lambda r: 1 / (r**2 + 1) ** 3, 6, 10.0)
        assert abs(ct.value - oracle) < 1e-10 * abs(oracle)

    def test_oneloop_d6_quadratic_label(self):
        # C_2 = -int [ (4/D) q^2 - q^2 - 1 ] / (q^2+1)^4 after angular average
        cfg = RegulatorConfig(cutoff=10.0, dimension=6, method="sphere")
        ct = counterterm(named_graph("oneloop-se"), 2, cfg)
        oracle = -radial_oracle(
            lambda r: ((4.0 / 6.0) * r**2 - r**2 - 1) / (r**2 + 1) ** 4, 6, 10.0
        )
        assert abs(ct.value - oracle) < 1e-9 * abs(oracle)

    def test_memoized_across_presentations(self):
        cfg = RegulatorConfig(cutoff=10.0, dimension=6, method="sphere")
        a = counterterm(named_graph("oneloop-se"), 2, cfg)
        relabeled = graph_from_spec(2, [(1, 0), (0, 1)], externals=[1, 0])
        b = counterterm(relabeled, 2, cfg)
        assert a is b  # same canonical key -> same memo entry

    def test_odd_label_rejected(self):
        cfg = RegulatorConfig(cutoff=10.0, dimension=6, method="sphere")
        with pytest.raises(ValueError, match="parity"):
            counterterm(named_graph("oneloop-se"), 1, cfg)

    def test_label_beyond_degree_rejected(self):
        cfg = RegulatorConfig(cutoff=10.0, dimension=4, method="sphere")
        with pytest.raises(ValueError, match="exceeds"):
            counterterm(named_graph("oneloop-se"), 2, cfg)

    def test_symbolic_mode_returns_dag(self):
        cfg = RegulatorConfig(cutoff=10.0, dimension=6, method="sphere")
        node = counterterm(named_graph("triangle"), 0, cfg, mode="symbolic")
        assert node.op in ("mul", "add", "pow")


class TestParityAndTails:
    def test_odd_taylor_term_integrates_to_zero(self):
        rg = routed(named_graph("oneloop-se"), 6)
        t1 = taylor_coefficients(
            prepared_node(rg), rg.external_indices(), 2
        )[1]
        cfg = RegulatorConfig(cutoff=10.0, dimension=6, method="mc", samples=20_000, seed=9)
        nodes = ball_mc_nodes(cfg, 1, externals=[np.array([1.0, 0, 0, 0, 0, 0])])
        value, err = integrate(t1, nodes)
        # antithetic pairing cancels the odd part exactly
        assert abs(value) < 1e-12

    def test_tail_slopes(self):
        radii = np.geomspace(10, 1000, 12)
        assert abs(tail_profile(named_graph("oneloop-se"), 4, 1.0, radii)["slope"] + 5) < 0.3
        assert abs(tail_profile(named_graph("oneloop-se"), 6, 1.0, radii)["slope"] + 7) < 0.5
        assert abs(tail_profile(named_graph("triangle"), 6, 1.0, radii)["slope"] + 7) < 0.5

    def test_convergent_graph_needs_no_subtraction(self):
        # omega < 0: renormalized integrand equals the prepared one
        rg = routed(named_graph("sixvertex-se"), 4)
        assert renormalized_node(rg) is prepared_node(rg)


class TestLadder:
    def test_structure_and_confluence(self):
        cfg = RegulatorConfig(cutoff=80.0, dimension=4, method="mc", samples=120_000, seed=42)
        rep = cutoff_ladder(named_graph("oneloop-se"), 1.0, cfg)
        bare = [v for v, _ in rep["bare"]]
        assert bare == sorted(bare)  # grows with the cutoff
        assert rep["bare_log_fit"]["slope"] > 0
        assert rep["bare_log_fit"]["r2"] > 0.999
        diffs = [d for d, _ in rep["cauchy_differences"]]
        errs = [e for _, e in rep["cauchy_differences"]]
        for k in range(len(diffs) - 1):
            assert diffs[k + 1] * 1.5 <= diffs[k] + 2 * math.hypot(errs[k], errs[k + 1])

    def test_deterministic_for_fixed_seed(self):
        cfg = RegulatorConfig(cutoff=40.0, dimension=4, method="mc", samples=40_000, seed=7)
        a = cutoff_ladder(named_graph("oneloop-se"), 1.0, cfg, ladder=(10.0, 20.0, 40.0))
        b = cutoff_ladder(named_graph("oneloop-se"), 1.0, cfg, ladder=(10.0, 20.0, 40.0))
        assert a["renormalized"] == b["renormalized"]
        assert a["bare"] == b["bare"]


class TestConvolutionIdentity:
    @pytest.mark.parametrize(
        "name,D",
        [("oneloop-se", 4), ("oneloop-se", 6), ("triangle", 6), ("nested2loop", 6)],
    )
    def test_identity_on_shared_nodes(self, name, D):
        cfg = RegulatorConfig(cutoff=8.0, dimension=D, method="mc", samples=3600, seed=13)
        rep = check_ar_equals_a_star_c(named_graph(name), 1.0, cfg)
        assert rep["relative_deviation"] <= 1e-9, rep

    def test_primitive_graph_reduces_to_bare_plus_counterterm(self):
        cfg = RegulatorConfig(cutoff=8.0, dimension=6, method="mc", samples=4000, seed=14)
        rep = check_ar_equals_a_star_c(named_graph("triangle"), 1.0, cfg)
        assert rep["cross_terms"] == []
        assert rep["rhs_convolution"] == pytest.approx(rep["bare"] + rep["counterterm"], rel=1e-12)

    def test_nested_has_single_factorized_cross_term(self):
        cfg = RegulatorConfig(cutoff=8.0, dimension=6, method="mc", samples=3600, seed=15)
        rep = check_ar_equals_a_star_c(named_graph("nested2loop"), 1.0, cfg)
        assert len(rep["cross_terms"]) == 1
        assert rep["cross_terms"][0]["mode"] == "factorized"

    def test_amplitude_requires_1pi(self):
        cfg = RegulatorConfig(cutoff=8.0, dimension=4, method="mc", samples=1000, seed=3)
        chain = graph_from_spec(
            4, [(0, 1), (0, 1), (1, 2), (2, 3), (2, 3)], externals=[0, 3]
        )
        with pytest.raises(ValueError, match="1PI"):
            renormalized_amplitude(chain, 1.0, cfg)


class TestRotaBaxter:
    def test_eval_at_zero_exact(self):
        report = rota_baxter_check("eval-at-zero", 200, seed=21)
        assert report["passed"] and report["trials"] == 200

    def test_pole_part_exact(self):
        report = rota_baxter_check("pole-part", 200, seed=22)
        assert report["passed"] and report["trials"] == 200

    def test_pole_part_golden_case(self):
        f = LaurentPoly({-1: 1})  # 1/eps
        g = LaurentPoly({1: 1})  # eps
        T = LaurentPoly.pole_part
        lhs = T(f * g) + T(f) * T(g)
        rhs = T(T(f) * g + f * T(g))
        assert lhs == rhs == LaurentPoly({})

    def test_unknown_model_rejected(self):
        with pytest.raises(ValueError, match="model"):
            rota_baxter_check("minimal-subtraction", 1, seed=1)

"""Graph Hopf algebra: coproducts, antipodes, Z-factors, inclusion, projection."""

from fractions import Fraction

import pytest

from phi3hopf.bphz import counterterm
from phi3hopf.ckhopf import (
    GraphSeries,
    bare_coupling_graph_series,
    ck_antipode,
    ck_coproduct,
    ck_instance,
    counterterm_character,
    generator_tokens,
    hd_to_hck,
    project_pi,
    registry,
    subgraph_as_graph,
    z_factor_series,
)
from phi3hopf.graphs import divergent_subgraph_families, named_graph, sym_factor
from phi3hopf.hopf import (
    antipode,
    coproduct,
    coproduct_left,
    coproduct_right,
    counit,
)
from phi3hopf.ring import Poly
from phi3hopf.series import TruncatedSeries, bare_coupling_series


def tok(name, label=0):
    return registry().token_of(named_graph(name), label)


class TestCoproduct:
    def test_primitive_one_loop(self):
        inst = ck_instance()
        for name in ("oneloop-se", "triangle"):
            t = tok(name)
            d = ck_coproduct(named_graph(name))
            assert d.terms == {
                ((t,), ()): Poly.one(),
                ((), (t,)): Poly.one(),
            }

    def test_nested_two_loop(self):
        inst = ck_instance()
        t_nested = tok("nested2loop")
        t_tri = tok("triangle")
        d = ck_coproduct(named_graph("nested2loop"))
        assert d.terms == {
            ((t_nested,), ()): Poly.one(),
            ((), (t_nested,)): Poly.one(),
            ((t_tri,), (t_tri,)): Poly.one(),
        }

    def test_threeloop_label_structure(self):
        d = ck_coproduct(named_graph("threeloop-b"), label=0)
        se0, se2 = tok("oneloop-se", 0), tok("oneloop-se", 2)
        # single contractions merge with multiplicity two; the mixed double
        # contraction also appears twice
        singles = {
            right: c
            for (left, right), c in d.terms.items()
            if len(right) == 1 and right[0] in (se0, se2)
        }
        assert singles[(se0,)] == Poly.const(2)
        assert singles[(se2,)] == Poly.const(2)
        doubles = {
            right: c for (left, right), c in d.terms.items() if len(right) == 2
        }
        assert doubles[tuple(sorted((se0, se2)))] == Poly.const(2)
        assert doubles[(se0, se0)] == Poly.one()
        assert doubles[(se2, se2)] == Poly.one()

    def test_grading_preserved(self):
        inst = ck_instance()
        for t in generator_tokens(2):
            total = inst.grade(t)
            for (l, r) in coproduct(inst.gen(t)).terms:
                assert inst.mono_grade(l) + inst.mono_grade(r) == total

    def test_extracted_subgraph_is_named_generator(self):
        g = named_graph("nested2loop")
        (fam,) = divergent_subgraph_families(g, 6)
        sub = subgraph_as_graph(g, fam.members[0])
        assert registry().token_of(sub, 0) == tok("triangle")


class TestAntipode:
    def test_primitive(self):
        inst = ck_instance()
        for name in ("oneloop-se", "triangle"):
            assert ck_antipode(named_graph(name)) == -inst.gen(tok(name))

    def test_nested(self):
        inst = ck_instance()
        t_nested, t_tri = tok("nested2loop"), tok("triangle")
        expected = -inst.gen(t_nested) + inst.monomial((t_tri, t_tri))
        assert ck_antipode(named_graph("nested2loop")) == expected

    def test_five_term_on_nested(self):
        inst = ck_instance()
        x = inst.gen(tok("nested2loop"))
        dx = coproduct(x)
        acc = inst.zero()
        for (l, r), c in dx.terms.items():
            acc = acc + (antipode(inst.monomial(l)) * inst.monomial(r)) * c
        assert acc == inst.one() * counit(x)


class TestHopfChecksBounded:
    def test_coassociativity_two_loops(self):
        inst = ck_instance()
        for t in generator_tokens(2):
            d = coproduct(inst.gen(t))
            assert coproduct_left(d) == coproduct_right(d), t

    def test_five_term_two_loops(self):
        inst = ck_instance()
        for t in generator_tokens(2):
            x = inst.gen(t)
            dx = coproduct(x)
            left = inst.zero()
            right = inst.zero()
            for (l, r), c in dx.terms.items():
                left = left + (antipode(inst.monomial(l)) * inst.monomial(r)) * c
                right = right + (inst.monomial(l) * antipode(inst.monomial(r))) * c
            target = inst.one() * counit(x)
            assert left == target and right == target, t


class TestZFactors:
    def test_one_loop_entries(self):
        z1, z3, zm = z_factor_series(1)
        se0, se2, tri = tok("oneloop-se", 0), tok("oneloop-se", 2), tok("triangle")
        assert z3.entries == {(): Fraction(1), (se2,): Fraction(-1, 2)}
        assert zm.entries == {(): Fraction(1), (se0,): Fraction(-1, 2)}
        assert z1.entries == {(): Fraction(1), (tri,): Fraction(1)}

    def test_zero_loops_is_unit(self):
        z1, z3, zm = z_factor_series(0)
        for z in (z1, z3, zm):
            assert z.entries == {(): Fraction(1)}

    def test_weights_divide_sym(self):
        z1, z3, zm = z_factor_series(2)
        for series in (z1, z3, zm):
            for mono, c in series.entries.items():
                if mono:
                    g = registry().labeled_graph_of(mono[0])
                    assert (Fraction(1, sym_factor(g)) / c).denominator == 1 or c != 0


class TestInclusion:
    def test_n0_is_unit(self):
        assert hd_to_hck(0, 1) == ck_instance().one()

    def test_n1_combination(self):
        inst = ck_instance()
        expected = inst.gen(tok("triangle")) + inst.gen(tok("oneloop-se", 2)) * Poly.const(
            Fraction(3, 4)
        )
        assert hd_to_hck(1, 1) == expected

    def test_primitivity_at_lowest_order(self):
        inst = ck_instance()
        h = hd_to_hck(1, 1)
        d = coproduct(h)
        expected = {}
        for mono, c in h.terms.items():
            expected[(mono, ())] = c
            expected[((), mono)] = c
        assert d.terms == expected

    def test_weights_denominators(self):
        h = hd_to_hck(2, 2)
        for mono, c in h.terms.items():
            assert c.is_const()
            # denominators divide products of symmetry factors (times the
            # binomial 2-powers of the half-integer expansion)
            den = c.const_value().denominator
            assert den % 2 == 0 or den == 1


class TestProjection:
    def test_single_entry_power(self):
        se2 = tok("oneloop-se", 2)
        s = GraphSeries({(se2,): Fraction(1, 3)}, shift=0)
        series = project_pi(s, 4, char=lambda t: Fraction(1))
        assert series.coeffs[2] == Poly.const(Fraction(1, 3))

    def test_linearity(self):
        se2, se0 = tok("oneloop-se", 2), tok("oneloop-se", 0)
        s = GraphSeries({(se2,): Fraction(1, 2), (se0,): Fraction(1, 3)}, shift=0)
        series = project_pi(s, 4, char=lambda t: Fraction(1))
        assert series.coeffs[2] == Poly.const(Fraction(5, 6))

    def test_lambda_b_projection_matches_series_machinery(self):
        # exact consistency: graph-series route vs truncated-series route
        from phi3hopf.numerics.quadrature import RegulatorConfig

        cfg = RegulatorConfig(cutoff=12.0, dimension=6, method="sphere")
        char = counterterm_character(cfg)
        lam_b_graphs = bare_coupling_graph_series(1)
        via_graphs = project_pi(lam_b_graphs, 2, char)

        c_tri = char(tok("triangle"))
        c_se2 = char(tok("oneloop-se", 2))
        z1 = TruncatedSeries(2, [1, 0, c_tri], "inv")
        z3 = TruncatedSeries(2, [1, 0, Fraction(-1, 2) * c_se2], "inv")
        via_series = bare_coupling_series(z1, z3)
        assert via_graphs == via_series

    def test_character_application_matches_coefficient(self):
        from phi3hopf.numerics.quadrature import RegulatorConfig

        cfg = RegulatorConfig(cutoff=12.0, dimension=6, method="sphere")
        char = counterterm_character(cfg)
        h1 = hd_to_hck(1, 1)
        applied = Fraction(0)
        for mono, c in h1.terms.items():
            val = c.const_value()
            for t in mono:
                val *= char(t)
            applied += val
        lam_b = bare_coupling_series(
            TruncatedSeries(2, [1, 0, char(tok("triangle"))], "inv"),
            TruncatedSeries(2, [1, 0, Fraction(-1, 2) * char(tok("oneloop-se", 2))], "inv"),
        )
        assert lam_b.coeffs[2] == Poly.const(applied)  # exact, shared memo values

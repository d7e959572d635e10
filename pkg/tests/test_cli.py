"""Command line surface: outputs, determinism, exit codes."""

import json

import pytest

from phi3hopf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestSeriesCommands:
    def test_compose_example(self, capsys):
        code, out = run(capsys, "series", "compose", "--f", "z+z^2", "--g", "z+z^2", "--order", "4")
        assert code == 0
        data = json.loads(out)
        assert data["kind"] == "diff"
        assert data["coeffs"] == ["1", "2", "2", "1", "0"]

    def test_recip(self, capsys):
        code, out = run(capsys, "series", "recip", "--f", "1+z", "--order", "3")
        assert code == 0
        assert json.loads(out)["coeffs"] == ["1", "-1", "1", "-1"]

    def test_dyson_identity_factors(self, capsys):
        code, out = run(capsys, "series", "dyson", "--f", "1+m_b*z", "--order", "2", "--k", "2")
        assert code == 0
        data = json.loads(out)
        assert data["coeffs"][1] == "m"

    def test_invalid_series_rejected(self, capsys):
        code = main(["series", "recip", "--f", "2+z", "--order", "3"])
        assert code == 1


class TestGraphCommands:
    def test_enumerate_census(self, capsys):
        code, out = run(
            capsys,
            "graphs", "enumerate", "--k", "2", "--max-vertices", "4",
            "--class", "connected", "--format", "json",
        )
        assert code == 0
        data = json.loads(out)
        assert len(data) == 13

    def test_stats_table(self, capsys):
        code, out = run(capsys, "graphs", "stats", "--graph", "oneloop-se", "--D", "4")
        assert code == 0
        assert json.loads(out)["omega"] == 0

    def test_dot_output(self, capsys):
        code, out = run(capsys, "graphs", "dot", "--graph", "tadpole")
        assert code == 0
        assert out.startswith("graph")

    def test_unknown_graph_exit_code(self, capsys):
        assert main(["graphs", "stats", "--graph", "no-such-graph"]) == 1


class TestHopfCommands:
    def test_axioms(self, capsys):
        code, out = run(capsys, "hopf", "axioms", "--instance", "sl2", "--grade", "1")
        assert code == 0
        assert json.loads(out)["all_pass"]

    def test_coproduct(self, capsys):
        code, out = run(capsys, "hopf", "coproduct", "--instance", "faa-di-bruno", "--n", "2")
        assert code == 0
        assert "x" in json.loads(out)["coproduct"]


class TestCkCommands:
    def test_zfactors(self, capsys):
        code, out = run(capsys, "ck", "zfactors", "--max-loops", "1")
        assert code == 0
        data = json.loads(out)
        assert data["Z3"]["1"] == "1"
        assert any(v == "-1/2" for v in data["Z3"].values())

    def test_coproduct(self, capsys):
        code, out = run(capsys, "ck", "coproduct", "--graph", "nested2loop")
        assert code == 0

    def test_inclusion(self, capsys):
        code, out = run(capsys, "ck", "inclusion", "--n", "1", "--max-loops", "1")
        assert code == 0
        assert "3/4" in json.loads(out)["image"]


class TestBphzCommands:
    def test_integrand(self, capsys):
        code, out = run(capsys, "bphz", "integrand", "--graph", "oneloop-se", "--D", "4")
        assert code == 0
        data = json.loads(out)
        assert "q1" in data["basis"]
        assert "^2 + 1" in data["bare"]

    def test_rotabaxter(self, capsys):
        code, out = run(capsys, "bphz", "rotabaxter", "--trials", "25", "--seed", "5")
        assert code == 0
        data = json.loads(out)
        assert data["eval-at-zero"]["passed"] and data["pole-part"]["passed"]

    def test_renormalize_deterministic(self, capsys):
        args = [
            "bphz", "renormalize", "--graph", "oneloop-se", "--D", "4", "--p", "1.0",
            "--lambda-ladder", "10,20", "--samples", "20000", "--seed", "42",
        ]
        code1, out1 = run(capsys, *args)
        code2, out2 = run(capsys, *args)
        assert code1 == code2 == 0
        assert out1 == out2  # byte-identical for identical argv and seed

    def test_astarc(self, capsys):
        code, out = run(
            capsys,
            "bphz", "astarc", "--graph", "triangle", "--D", "6",
            "--samples", "2000", "--seed", "3", "--cutoff", "8",
        )
        assert code == 0
        assert json.loads(out)["relative_deviation"] <= 1e-9


class TestGreensCommands:
    def test_trees(self, capsys):
        code, out = run(capsys, "greens", "trees", "--max-order", "3")
        assert code == 0
        rendered = json.loads(out)
        assert any(r.startswith("1 x ") for r in rendered)
        assert any("lambda^3/8" in r for r in rendered)

    def test_partitions(self, capsys):
        code, out = run(capsys, "greens", "partitions", "--k", "3")
        assert code == 0
        assert len(json.loads(out)) == 5

    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "out.json"
        code = main(["greens", "partitions", "--k", "2", "--output", str(target)])
        assert code == 0
        assert len(json.loads(target.read_text())) == 2

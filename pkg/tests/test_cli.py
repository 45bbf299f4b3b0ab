"""Command line behavior: rendering, files, suites, and exit codes."""

import json
from fractions import Fraction

import pytest

from ctplab.cli import (
    GAME_BATTERY,
    instance_to_dot,
    main,
    random_disjoint_instance,
    render_cost,
    render_rational,
)
from ctplab.model import (
    Cost,
    InstanceBuilder,
    SplitMix64,
    Variant,
    instance_to_json,
    load_instance,
)
from ctplab.reductions import CtpReductionCertificate, SensingCertificate
from ctplab.solve import qbf_eval

F = Fraction

GAME = """c a tiny winnable game
p cnf 2 1
a 1 0
e 2 0
1 2 0
"""


@pytest.fixture
def game_file(tmp_path):
    path = tmp_path / "game.qdimacs"
    path.write_text(GAME)
    return path


class TestRendering:
    def test_integers_keep_a_decimal_point(self):
        assert render_rational(F(5)) == "5/1 (5.0)"

    def test_twenty_significant_digits(self):
        assert render_rational(F(263, 512)) == "263/512 (0.513671875)"
        assert render_rational(F(1, 3)) == (
            "1/3 (0.33333333333333333333)")

    def test_precision_parameter(self):
        assert render_rational(F(1, 3), 4) == "1/3 (0.3333)"

    def test_costs(self):
        assert render_cost(Cost.infinite()) == "inf"
        assert render_cost(Cost.of(F(1, 2))) == "1/2 (0.5)"


class TestDotExport:
    def build(self, directed):
        builder = InstanceBuilder(Variant.INDEPENDENT)
        builder.set_endpoints("s", "t")
        builder.add_edge("s", "a", 1, id="sure", directed=directed)
        builder.add_edge("a", "t", 0, id="coin", block_p=F(1, 2))
        return builder.build()

    def test_undirected_graph(self):
        text = instance_to_dot(self.build(False))
        assert text.startswith("graph ctp {")
        assert '"s" [shape=doublecircle];' in text
        assert '"t" [shape=doubleoctagon];' in text
        assert '"a" -- "t" [label="0/1|1/2", style=dashed];' in text

    def test_directed_mixture(self):
        text = instance_to_dot(self.build(True))
        assert text.startswith("digraph ctp {")
        assert '"s" -> "a" [label="1/1"];' in text
        assert "dir=none" in text

    def test_big_denominators_render_as_decimals(self):
        builder = InstanceBuilder(Variant.INDEPENDENT)
        builder.set_endpoints("s", "t")
        builder.add_edge("s", "t", 0, id="coin", block_p=F(1, 1 << 20))
        text = instance_to_dot(builder.build())
        assert "1048576" not in text
        assert "9.5367431640625E-7" in text


class TestBattery:
    def test_recorded_outcomes_match_the_oracle(self):
        assert len(GAME_BATTERY) >= 6
        sizes = {f.n for f, _ in GAME_BATTERY}
        assert sizes == {2, 4}
        outcomes = {w for _, w in GAME_BATTERY}
        assert outcomes == {True, False}
        for formula, winnable in GAME_BATTERY:
            assert formula.m <= 3
            assert qbf_eval(formula) is winnable


class TestToyGenerator:
    def test_deterministic_per_seed(self):
        one = random_disjoint_instance(SplitMix64(7))
        two = random_disjoint_instance(SplitMix64(7))
        assert instance_to_json(one) == instance_to_json(two)

    def test_respects_uncertain_cap(self):
        for seed in range(10):
            toy = random_disjoint_instance(SplitMix64(seed),
                                           max_uncertain=3)
            assert sum(1 for e in toy.edges if e.uncertain) <= 3


class TestCommands:
    def test_qbf(self, game_file, capsys):
        assert main(["qbf", str(game_file)]) == 0
        assert "winnable" in capsys.readouterr().out

    def test_qbf_json(self, game_file, capsys):
        assert main(["qbf", str(game_file), "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data == {"n": 2, "m": 1, "winnable": True}

    def test_reduce_ctpdep_and_solve(self, game_file, tmp_path, capsys):
        out = tmp_path / "dep.json"
        assert main(["reduce", "ctpdep", str(game_file),
                     "-o", str(out)]) == 0
        assert out.exists()
        capsys.readouterr()
        assert main(["solve", str(out), "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["optimal_cost"] == "0/1 (0.0)"
        assert data["first_action"] == "move(enter)"

    def test_reduce_ctp_writes_certificate(self, game_file, tmp_path,
                                           capsys):
        out = tmp_path / "full.json"
        assert main(["reduce", "ctp", str(game_file), "-o", str(out)]) == 0
        cert_path = tmp_path / "full.cert.json"
        assert cert_path.exists()
        cert = CtpReductionCertificate.from_json(cert_path.read_text())
        assert cert.D_pt == 331
        instance = load_instance(out)
        assert len(instance.vertices) == cert.vertex_count

    def test_reduce_sensing_writes_certificate(self, tmp_path, capsys):
        out = tmp_path / "probe.json"
        assert main(["reduce", "sensing", "--graph", "p3", "--k", "1",
                     "--alpha", "1/2", "-o", str(out)]) == 0
        cert_path = tmp_path / "probe.cert.json"
        cert = SensingCertificate.from_json(cert_path.read_text())
        assert cert.k == 1 and cert.coin_count == 2
        instance = load_instance(out)
        assert instance.sensing is not None

    def test_gadget_policy_flow(self, tmp_path, capsys):
        out = tmp_path / "bait.json"
        tree = tmp_path / "pi.json"
        assert main(["gadget", "baiting", "--L", "2", "-o", str(out),
                     "--policy", "baiting_pi", "--policy-out",
                     str(tree)]) == 0
        text = capsys.readouterr().out
        assert "263/512" in text
        assert main(["solve", str(out), "--policy", str(tree)]) == 0
        assert "263/512" in capsys.readouterr().out

    def test_export_dot_stdout(self, tmp_path, capsys):
        out = tmp_path / "bait.json"
        main(["gadget", "baiting", "--L", "2", "-o", str(out)])
        capsys.readouterr()
        assert main(["export-dot", str(out)]) == 0
        assert capsys.readouterr().out.startswith("graph ctp {")

    def test_verify_sensing(self, capsys):
        assert main(["verify", "sensing"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert all(line.startswith("PASS") for line in lines[:-1])
        assert "8/8 checks passed" in lines[-1]

    def test_verify_json(self, capsys):
        assert main(["verify", "ctp-cert", "--n", "2", "--m", "1",
                     "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["suite"] == "ctp-cert"
        assert data["passed"] is True
        assert {c["status"] for c in data["checks"]} == {"pass"}


class TestExitCodes:
    def test_missing_file_is_input_error(self, tmp_path, capsys):
        assert main(["qbf", str(tmp_path / "nope.qdimacs")]) == 2

    def test_bad_fee_is_input_error(self, game_file, tmp_path, capsys):
        assert main(["reduce", "ctpdep", str(game_file), "--h", "1/2",
                     "-o", str(tmp_path / "x.json")]) == 2

    def test_cap_exhaustion(self, game_file, tmp_path, capsys):
        out = tmp_path / "dep.json"
        main(["reduce", "ctpdep", str(game_file), "-o", str(out)])
        capsys.readouterr()
        assert main(["solve", str(out), "--cap", "10"]) == 3

    def test_unknown_suite_is_a_usage_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["verify", "nope"])
        assert info.value.code == 2

import json

import pytest

from shorpython import blocks, cli
from shorpython.blocks import build_cmult_mod
from shorpython.core import circuit_from_json
from shorpython.orderfind import build_order_finding_circuit


def _config(*argv):
    return cli.load_config(cli.build_parser().parse_args(list(argv)))


class TestConfig:
    @pytest.mark.cli
    def test_flags(self):
        config = _config("factor", "15", "--seed", "4", "--kmax", "exact", "--max-attempts", "3")

        assert config.seed == 4
        assert config.kmax == "exact"
        assert config.max_attempts == 3
        assert config.kmax_for(9) == 10

    @pytest.mark.cli
    def test_environment_seed(self, monkeypatch):
        monkeypatch.setenv("SHORPYTHON_SEED", "77")

        assert _config("factor", "15").seed == 77
        assert _config("factor", "15", "--seed", "5").seed == 5

    @pytest.mark.cli
    def test_entropy_seed_is_recorded(self, monkeypatch):
        monkeypatch.delenv("SHORPYTHON_SEED", raising=False)

        assert _config("factor", "15").seed is not None

    @pytest.mark.cli
    def test_default_kmax(self):
        config = _config("resources", "4")

        assert config.kmax_for(8) == 9
        assert config.kmax_for(12) == 6

    @pytest.mark.cli
    def test_usage_errors_exit_one(self):
        for argv in (["factor", "abc"], ["factor", "15", "--kmax", "0"], ["verify", "--suite", "x"], []):
            with pytest.raises(SystemExit) as e:
                cli.main(argv)
            assert e.value.code == 1

    @pytest.mark.cli
    def test_invalid_seed(self, capsys):
        assert cli.main(["factor", "15", "--seed", "-1"]) == 1
        assert "invalid configuration" in capsys.readouterr().err


class TestFactor:
    @pytest.mark.cli
    def test_even(self, capsys):
        assert cli.main(["factor", "16"]) == 0
        out = capsys.readouterr().out
        assert "N=16 = 2 x 8" in out
        assert "route: even" in out

    @pytest.mark.cli
    def test_fifteen(self, capsys):
        assert cli.main(["factor", "15", "--seed", "1", "--max-attempts", "30", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)

        assert document["factor"] in (3, 5)
        assert document["seed"] == 1

    @pytest.mark.cli
    def test_prime_gives_up(self, capsys):
        assert cli.main(["factor", "7", "--seed", "1", "--max-attempts", "2"]) == 2
        assert "No factor of 7" in capsys.readouterr().err

    @pytest.mark.cli
    def test_too_small(self):
        assert cli.main(["factor", "3"]) == 1


class TestOrder:
    @pytest.mark.cli
    def test_order_fifteen(self, capsys):
        argv = ["order", "15", "7", "--seed", "3", "--max-attempts", "30", "--format", "json"]
        assert cli.main(argv) == 0
        document = json.loads(capsys.readouterr().out)

        assert document["r"] == 4
        assert document["validated"] is True
        assert len(document["bits"]) == 8

    @pytest.mark.cli
    def test_not_coprime(self, capsys):
        assert cli.main(["order", "15", "5"]) == 1
        assert "gcd(5, 15) = 5" in capsys.readouterr().err

    @pytest.mark.cli
    def test_even_modulus(self):
        assert cli.main(["order", "16", "3"]) == 1

    @pytest.mark.cli
    @pytest.mark.slow
    def test_order_twenty_one(self, capsys):
        argv = ["order", "21", "2", "--seed", "0", "--max-attempts", "40", "--format", "json"]
        assert cli.main(argv) == 0
        assert json.loads(capsys.readouterr().out)["r"] % 6 == 0


class TestResources:
    @pytest.mark.cli
    def test_text(self, capsys):
        assert cli.main(["resources", "4"]) == 0
        assert "qubits: 11" in capsys.readouterr().out

    @pytest.mark.cli
    def test_json(self, capsys):
        assert cli.main(["resources", "2", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)

        assert document["reports"][0]["qubits"] == 7
        assert document["scaling"] is None

    @pytest.mark.cli
    def test_csv(self, capsys):
        assert cli.main(["resources", "2", "3", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()

        assert lines[0] == "n,kmax,qubits,gates_total,depth"
        assert len(lines) == 3

    @pytest.mark.cli
    def test_out_of_range(self):
        assert cli.main(["resources", "1"]) == 1

    @pytest.mark.cli
    @pytest.mark.slow
    def test_extrapolation(self, capsys):
        assert cli.main(["resources", "64", "--format", "json"]) == 0
        report = json.loads(capsys.readouterr().out)["reports"][0]

        assert report["extrapolated"] is True
        assert report["qubits"] == 131

    @pytest.mark.cli
    @pytest.mark.slow
    def test_scaling_fit(self, capsys):
        assert cli.main(["resources", "4", "5", "6"]) == 0
        assert "gates ~ n^" in capsys.readouterr().out


class TestEmit:
    @pytest.mark.cli
    def test_round_trip(self, tmp_path):
        path = tmp_path / "c.json"

        assert cli.main(["emit", "15", "7", "-o", str(path)]) == 0
        assert circuit_from_json(path.read_text()) == build_order_finding_circuit(15, 7, 5)

    @pytest.mark.cli
    def test_block(self, capsys):
        assert cli.main(["emit", "15", "7", "--block", "cmult"]) == 0
        circuit = circuit_from_json(capsys.readouterr().out)

        assert circuit == build_cmult_mod(4, 7, 15, 5)
        assert circuit.metadata.block == "cmult"

    @pytest.mark.cli
    def test_unwritable_path(self, tmp_path):
        path = tmp_path / "missing" / "c.json"

        assert cli.main(["emit", "15", "7", "-o", str(path)]) == 1

    @pytest.mark.cli
    def test_invalid_pair(self):
        assert cli.main(["emit", "15", "5"]) == 1


class TestVerify:
    @pytest.mark.cli
    def test_single_suite(self, capsys):
        assert cli.main(["verify", "--suite", "adder"]) == 0
        out = capsys.readouterr().out
        assert "adder" in out and "ok" in out
        assert "qft" not in out

    @pytest.mark.cli
    def test_sign_error_is_caught(self, monkeypatch, capsys):
        emit_phi_add = blocks._emit_phi_add

        def flipped(builder, register, a, controls=(), inverse=False):
            emit_phi_add(builder, register, a, controls, not inverse)

        monkeypatch.setattr(blocks, "_emit_phi_add", flipped)

        assert cli.main(["verify", "--suite", "adder", "--suite", "qft"]) == 3
        captured = capsys.readouterr()
        assert "failing suite(s): adder" in captured.err
        assert "FAIL" in captured.out

import numpy as np
import pytest

from quditcat.circuit_text import circuits_equal, parse_circuit
from quditcat.cli import main
from quditcat.networks import build_network_a


class TestVerifyCommand:
    def test_network_b_passes(self, capsys):
        assert main(["verify", "--network", "b", "--n", "4", "--u", "x"]) == 0
        out = capsys.readouterr().out
        assert "gate_count=4" in out
        assert "status=PASS" in out

    def test_network_a_n2_reduces_to_cnot(self, capsys):
        assert main(["verify", "--network", "a", "--n", "2", "--u", "x"]) == 0
        assert "gate_count=3" in capsys.readouterr().out

    def test_random_unitary_selector(self, capsys):
        assert main(["verify", "--network", "b", "--n", "3", "--u", "random:42"]) == 0
        out = capsys.readouterr().out
        assert "u=random:42" in out  # seed recorded in the header

    def test_batch_mode_covers_default_range(self, capsys):
        assert main(["verify", "--network", "b"]) == 0
        out = capsys.readouterr().out
        assert all(f"n={n} " in out for n in range(2, 7))

    def test_bad_u_selector_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--network", "b", "--n", "3", "--u", "bogus"])
        assert exc.value.code == 2

    def test_bad_network_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "--network", "q", "--n", "3"])
        assert exc.value.code == 2


class TestBranchesCommand:
    def test_basis_input_lists_every_outcome(self, capsys):
        assert main(["branches", "--network", "b", "--n", "3", "--input", "111"]) == 0
        out = capsys.readouterr().out
        lines = [l for l in out.splitlines() if l and l[0].isdigit()]
        assert len(lines) == 3
        assert "sum(probability) = 1.000000" in out

    def test_all_zero_input(self, capsys):
        assert main(["branches", "--network", "b", "--n", "3", "--input", "000"]) == 0

    def test_random_input_uses_seed(self, capsys):
        assert main(["branches", "--network", "b-z", "--n", "2", "--seed", "5"]) == 0
        assert "random(seed=5)" in capsys.readouterr().out


class TestSweepCommand:
    def test_writes_csv_with_slope(self, tmp_path, capsys):
        out_file = tmp_path / "scan.csv"
        code = main([
            "sweep", "--spin", "0.5", "--g-min", "1e-3", "--g-max", "1e-2",
            "--g-steps", "4", "--out", str(out_file),
        ])
        assert code == 0
        printed = capsys.readouterr().out
        assert "fitted residual slope: 3." in printed
        lines = out_file.read_text().splitlines()
        assert lines[0] == "s,n,g,Delta,residual_norm,fitted_slope,fidelity"
        assert len(lines) == 5
        slope = float(lines[1].split(",")[5])
        assert slope == pytest.approx(3.0, abs=0.3)

    def test_single_point_leaves_slope_empty(self, tmp_path):
        out_file = tmp_path / "one.csv"
        assert main(["sweep", "--g-steps", "1", "--out", str(out_file)]) == 0
        row = out_file.read_text().splitlines()[1].split(",")
        assert row[5] == ""
        assert float(row[4]) > 0

    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["sweep", "--spin", "1.0", "--g-steps", "4", "--out"]
        assert main(argv + [str(a)]) == 0
        assert main(argv + [str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_fidelity_column_is_ideal(self, tmp_path):
        out_file = tmp_path / "fid.csv"
        assert main(["sweep", "--spin", "1.0", "--g-steps", "2", "--out", str(out_file)]) == 0
        fidelity = float(out_file.read_text().splitlines()[1].split(",")[6])
        assert fidelity == pytest.approx(1.0, abs=1e-10)

    def test_unwritable_path_is_io_error(self, tmp_path):
        assert main(["sweep", "--g-steps", "2", "--out", str(tmp_path / "nope" / "x.csv")]) == 1


class TestEmitCommand:
    def test_network_a_gate_lines(self, capsys):
        assert main(["emit", "--network", "a", "--n", "3", "--out", "-"]) == 0
        out = capsys.readouterr().out
        gate_lines = [
            l for l in out.splitlines()
            if l.split()[0] not in ("LAYOUT", "ANCILLA_INIT")
        ]
        assert len(gate_lines) == 5

    def test_network_b_includes_measurement(self, capsys):
        assert main(["emit", "--network", "b", "--n", "3", "--out", "-"]) == 0
        out = capsys.readouterr().out
        assert "MEASURE_F 3" in out
        assert sum(l.startswith("CORRECT") for l in out.splitlines()) == 3

    def test_file_round_trips(self, tmp_path):
        target = tmp_path / "net_a.txt"
        assert main(["emit", "--network", "a", "--n", "4", "--out", str(target)]) == 0
        parsed = parse_circuit(target.read_text())
        assert circuits_equal(parsed, build_network_a(4, np.array([[0, 1], [1, 0]])))

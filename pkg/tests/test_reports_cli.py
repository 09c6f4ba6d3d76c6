import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest

from qsampler import cli, reports
from qsampler.combinatorics import ProblemInstance
from qsampler.protocol import exact_chi_distribution


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSerialization:
    def test_float_roundtrip(self):
        for x in (0.1, 1 / 3, 2 ** -40, 1e300, 0.0):
            assert float(reports.format_float(x)) == x
        assert reports.format_float(float("nan")) == "NaN"

    def test_dumps(self):
        text = reports.dumps({"a": Fraction(3, 5), "b": [1, 2.5, None, True], "c": {}, "d": float("inf")})
        obj = json.loads(text)
        assert obj == {"a": "3/5", "b": [1, 2.5, None, True], "c": {}, "d": "Infinity"}

    def test_dumps_numpy_scalars(self):
        assert json.loads(reports.dumps([np.int64(3), np.float64(0.5), np.bool_(False)])) == [3, 0.5, False]

    def test_dumps_rejects_unknown(self):
        with pytest.raises(TypeError):
            reports.dumps({"x": object()})

    def test_csv(self):
        text = reports.rows_to_csv(("a", "b"), [{"a": Fraction(1, 2), "b": 0.25}, {"a": None, "b": 3}])
        assert text == "a,b\n1/2,0.25\n,3\n"

    def test_samples_csv(self):
        inst = ProblemInstance(4, 2)
        text = reports.samples_to_csv(inst, np.array([[0, 5], [5, 0]]))
        assert text == "sample_index,S,T\n0,0 1,2 3\n1,2 3,0 1\n"

    def test_distribution_json(self):
        obj = json.loads(reports.distribution_to_json(exact_chi_distribution(ProblemInstance(4, 2))))
        assert len(obj["pairs"]) == 6 and obj["pairs"][0][2] == "1/6"


class TestSpectrumCommand:
    def test_json(self, capsys):
        code, out, _ = run(["spectrum", "--n", "6", "--k", "2"], capsys)
        obj = json.loads(out)
        assert code == 0
        assert [r["lambda_chi"] for r in obj["spaces"]] == [6, -3, 1]
        assert [r["dim"] for r in obj["spaces"]] == [1, 5, 9]
        assert obj["spaces"][1]["lambda_B"] == "-2/5"
        assert obj["spaces"][0]["chi_mass_i"] == "2/5"
        assert obj["oracle"]["passed"] and obj["oracle"]["max_eigenvalue_diff"] <= 1e-9

    def test_csv_and_matrix(self, capsys, tmp_path):
        mpath = tmp_path / "m.csv"
        code, out, _ = run(["spectrum", "--n", "4", "--k", "2", "--format", "csv", "--matrix-out", str(mpath)], capsys)
        assert code == 0
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [r["i"] for r in rows] == ["0", "1", "2"]
        M = np.loadtxt(mpath, delimiter=",")
        assert M.shape == (6, 6) and M.sum() == 6

    def test_degenerate(self, capsys):
        code, out, _ = run(["spectrum", "--n", "3", "--k", "2"], capsys)
        obj = json.loads(out)
        assert code == 0 and obj["degenerate"] and "no disjoint pairs" in obj["notice"]

    def test_guard(self, capsys, monkeypatch):
        monkeypatch.setenv("QSAMPLER_GUARD_N", "10")
        code, _, err = run(["spectrum", "--n", "6", "--k", "2"], capsys)
        assert code == 1 and "guard" in err.lower()


class TestTruncateCommand:
    def test_worked(self, capsys):
        code, out, _ = run(["truncate", "--n", "6", "--k", "2", "--epsilon", "0.08"], capsys)
        obj = json.loads(out)
        assert code == 0
        assert (obj["g"], obj["t"], obj["qubits_per_party"]) == (1, 6, 3)
        assert obj["epsilon"] == "2/25"
        assert abs(obj["fidelity"] - 0.9 ** 0.5) <= 1e-12
        assert abs(obj["measured_fidelity"] - 0.9 ** 0.5) <= 1e-12
        assert obj["identity_residual"] <= 1e-12

    def test_csv(self, capsys):
        code, out, _ = run(["truncate", "--n", "9", "--k", "3", "--format", "csv"], capsys)
        (row,) = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and row["epsilon"] == "1/10"

    @pytest.mark.parametrize("eps", ["0", "1", "abc", "-0.5"])
    def test_bad_epsilon(self, capsys, eps):
        with pytest.raises(SystemExit) as exc:
            cli.main(["truncate", "--n", "6", "--k", "2", "--epsilon", eps])
        assert exc.value.code == 2


class TestSimulateCommand:
    def test_byte_identical_reruns(self, tmp_path, capsys):
        outs = []
        for tag in ("a", "b"):
            path = tmp_path / f"{tag}.csv"
            assert cli.main(["simulate", "--n", "6", "--k", "2", "--seed", "5", "--samples", "2000",
                             "--out", str(path)]) == 0
            outs.append((path.read_bytes(), (tmp_path / f"{tag}.csv.summary.json").read_bytes()))
        assert outs[0] == outs[1]
        lines = outs[0][0].decode().splitlines()
        assert lines[0] == "sample_index,S,T" and len(lines) == 2001

    def test_g0_summary(self, capsys):
        code, out, _ = run(["simulate", "--n", "6", "--k", "2", "--g", "0", "--samples", "50000"], capsys)
        obj = json.loads(out)
        assert code == 0
        assert abs(obj["analytic_tvd"] - 0.6) <= 1e-12
        assert obj["analytic_tvd_exact"] == "3/5"
        assert obj["analytic_violation_mass_exact"] == "3/5"
        assert obj["entangled_qubits"] == 0
        assert abs(obj["empirical_violation_mass"] - 0.6) < 0.02

    def test_full_rank_has_no_violation(self, capsys):
        code, out, _ = run(["simulate", "--n", "6", "--k", "2", "--g", "2", "--samples", "10000"], capsys)
        obj = json.loads(out)
        assert obj["analytic_violation_mass"] <= 1e-12
        assert obj["analytic_violation_mass_exact"] == "0/1"
        assert obj["empirical_violation_mass"] == 0

    def test_summary_out(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        code, out, _ = run(["simulate", "--n", "5", "--k", "2", "--samples", "0", "--summary-out", str(path)], capsys)
        assert code == 0 and out == ""
        assert "empirical_tvd_to_exact" not in json.loads(path.read_text())

    def test_degenerate_errors(self, capsys):
        code, _, err = run(["simulate", "--n", "3", "--k", "2"], capsys)
        assert code == 1 and "no disjoint pairs" in err

    def test_bad_cutoff(self, capsys):
        code, _, _ = run(["simulate", "--n", "6", "--k", "2", "--g", "5"], capsys)
        assert code == 1

    def test_bad_seed(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["simulate", "--n", "6", "--k", "2", "--seed", str(2 ** 64)])
        assert exc.value.code == 2


class TestCompareCommand:
    def test_three_rows(self, capsys):
        code, out, _ = run(["compare", "--instance", "9,3", "--instance", "16,4", "--instance", "25,5"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0
        assert [(r["quantum_qubits"], r["classical_comm_bits"], r["classical_shared_bits"]) for r in rows] == [
            ("12", "12", "12"), ("14", "16", "20"), ("18", "25", "30")]

    def test_parallel_keeps_order_and_duplicates(self, capsys):
        argv = ["compare", "--instance", "16,4", "--instance", "9,3", "--instance", "16,4"]
        _, serial, _ = run(argv, capsys)
        _, parallel, _ = run(argv + ["--jobs", "2"], capsys)
        assert serial == parallel
        assert [r["n"] for r in csv.DictReader(io.StringIO(serial))] == ["16", "9", "16"]

    def test_empty(self, capsys):
        code, out, _ = run(["compare"], capsys)
        assert code == 0 and out == ",".join(("n", "k", "epsilon", "quantum_qubits",
                                              "classical_comm_bits", "classical_shared_bits")) + "\n"

    def test_json(self, capsys):
        code, out, _ = run(["compare", "--instance", "6,2", "--format", "json"], capsys)
        obj = json.loads(out)
        assert "upper-bound" in obj["note"] and obj["rows"][0]["classical_shared_bits"] == 7

    def test_bad_instance(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["compare", "--instance", "9"])
        assert exc.value.code == 2


class TestUsage:
    def test_missing_command(self):
        with pytest.raises(SystemExit) as exc:
            cli.main([])
        assert exc.value.code == 2

    def test_missing_n(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["spectrum", "--k", "2"])
        assert exc.value.code == 2

    def test_bad_format(self):
        with pytest.raises(SystemExit) as exc:
            cli.main(["spectrum", "--n", "6", "--k", "2", "--format", "xml"])
        assert exc.value.code == 2


class TestVerifyCommand:
    def test_small_passes_and_is_reproducible(self, capsys):
        argv = ["verify", "--max-n", "7", "--max-k", "2"]
        code, first, _ = run(argv, capsys)
        _, second, _ = run(argv, capsys)
        assert code == 0 and first == second
        assert all(r["passed"] for r in json.loads(first))

    def test_sign_flip_detected(self, capsys):
        code, out, _ = run(["verify", "--max-n", "6", "--max-k", "2", "--samples", "1000",
                            "--inject-sign-flip", "--format", "csv"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 1
        assert any(r["name"].startswith("spectrum_oracle") and r["passed"] == "False" for r in rows)

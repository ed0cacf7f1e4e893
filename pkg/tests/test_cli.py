import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from entanglab import cli
from entanglab.cli import CSV_COLUMNS, RunRecord, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def record(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    rec = json.loads(out)
    assert set(rec) == {"experiment", "parameters", "results", "tool_version"}
    return rec


class TestRto:
    def test_correlated(self, capsys):
        res = record(capsys, "rto", "--phi-s", 0, "--phi-a", 0, "--state", "bell")["results"]
        assert res["E"] == pytest.approx(1, abs=1e-12)
        assert res["coincidence_visibility"] == pytest.approx(1, abs=1e-12)
        assert res["local_visibility"] == pytest.approx(0, abs=1e-12)

    def test_flipped(self, capsys):
        res = record(capsys, "rto", "--phi-s", 3.14159265, "--phi-a", 0, "--state", "bell")["results"]
        assert res["E"] == pytest.approx(-1, abs=1e-12)
        assert res["marginal_a"] == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_mixture(self, capsys):
        res = record(capsys, "rto", "--phi-s", 1.0, "--phi-a", 1.0, "--state", "mixture")["results"]
        assert list(res["joint"].values()) == pytest.approx([0.25] * 4, abs=1e-12)
        assert res["E"] == pytest.approx(0, abs=1e-12)

    def test_amplitudes(self, capsys):
        rec = record(capsys, "rto", "--phi-s", 0, "--phi-a", 0, "--state", "amplitudes", "--c1", 0.6, "--c2", "0.8j")
        assert rec["parameters"]["c2"] == [0.0, 0.8]
        assert rec["results"]["marginal_s"] == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_amplitudes_need_values(self, capsys):
        code, _, err = run(capsys, "rto", "--phi-s", 0, "--phi-a", 0, "--state", "amplitudes")
        assert code == 1 and "--c1" in err

    def test_bad_amplitudes(self, capsys):
        code, _, err = run(capsys, "rto", "--phi-s", 0, "--phi-a", 0, "--state", "amplitudes", "--c1", 1, "--c2", 1)
        assert code == 1 and "normalized" in err

    def test_malformed_flag(self, capsys):
        code, _, _ = run(capsys, "rto", "--phi-s", "abc", "--phi-a", 0)
        assert code == 1


class TestSweep:
    def test_bell_csv(self, capsys, tmp_path):
        path = tmp_path / "sweep.csv"
        rec = record(capsys, "sweep", "--grid-n", 8, "--state", "bell", "--format", "csv", "--output", path)
        assert rec["results"]["n_rows"] == 64
        with open(path) as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [list(map(float, r)) for r in reader]
        assert tuple(header) == CSV_COLUMNS
        assert len(rows) == 64
        for phi_s, phi_a, *_, E in rows:
            assert E == pytest.approx(np.cos(phi_s - phi_a), abs=1e-12)
        # phi_s-major ordering
        assert [r[0] for r in rows[:8]] == [0.0] * 8
        assert rows[1][1] > rows[0][1]

    def test_mixture_zero(self, capsys):
        rows = record(capsys, "sweep", "--grid-n", 8, "--state", "mixture")["results"]["rows"]
        assert all(abs(r["E"]) <= 1e-12 for r in rows)

    def test_csv_to_stdout(self, capsys):
        code, out, _ = run(capsys, "sweep", "--grid-n", 8, "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 65

    def test_json_file(self, capsys, tmp_path):
        path = tmp_path / "sweep.json"
        rec = record(capsys, "sweep", "--grid-n", 8, "--output", path)
        assert json.loads(path.read_text()) == rec

    def test_grid_too_small(self, capsys):
        code, _, err = run(capsys, "sweep", "--grid-n", 4)
        assert code == 1 and "at least 8" in err

    def test_unwritable(self, capsys, tmp_path):
        code, _, err = run(capsys, "sweep", "--grid-n", 8, "--output", tmp_path / "missing" / "x.csv")
        assert code == 1 and "error" in err


class TestChsh:
    def test_bell_analytic(self, capsys):
        res = record(capsys, "chsh", "--state", "bell")["results"]
        assert res["S"] == pytest.approx(2 * np.sqrt(2), abs=1e-9)
        assert res["violation"] is True

    def test_mixture_analytic(self, capsys):
        res = record(capsys, "chsh", "--state", "mixture")["results"]
        assert abs(res["S"]) <= 2 and res["violation"] is False

    def test_bell_sampled(self, capsys):
        res = record(capsys, "chsh", "--state", "bell", "--n-events", 10**6, "--seed", 42)["results"]
        assert res["s_hat"] > 2 and res["empirical_violation"] is True
        assert abs(res["s_hat"] - 2 * np.sqrt(2)) <= 5 * res["std_err"]

    def test_custom_angles(self, capsys):
        res = record(capsys, "chsh", "--angles", 0, 0, 0, 0)["results"]
        assert res["S"] == pytest.approx(2, abs=1e-12)


class TestNosignal:
    @pytest.mark.parametrize("state", ["bell", "mixture", "random"])
    def test_passes(self, capsys, state):
        res = record(capsys, "nosignal", "--grid-n", 32, "--state", state, "--seed", 11)["results"]
        assert res["max_marginal_deviation"] <= 1e-12 and res["passed"]
        assert len(res["table"]) == 32

    def test_audit_failure_exit_code(self, capsys, monkeypatch):
        from entanglab.interferometry import NoSignalingAudit

        fake = NoSignalingAudit(1e-3, np.zeros(8), np.full(8, 1e-3), np.zeros(8))
        monkeypatch.setattr(cli, "no_signaling_audit", lambda state, n: fake)
        code, out, _ = run(capsys, "nosignal", "--grid-n", 8)
        assert code == 2
        assert json.loads(out)["results"]["passed"] is False


class TestDecohere:
    def test_twenty(self, capsys):
        res = record(capsys, "decohere", "--env-n", 20, "--theta", np.pi / 8)["results"]
        assert res["r"] == pytest.approx(9.765625e-4, rel=1e-12)

    def test_full(self, capsys):
        res = record(capsys, "decohere", "--env-n", 1, "--theta", np.pi / 4)["results"]
        assert res["r"] == pytest.approx(0, abs=1e-15)
        assert res["distance_to_mixture"] <= 1e-12

    def test_reverse(self, capsys):
        res = record(capsys, "decohere", "--env-n", 4, "--theta", 0.3, "--reverse")["results"]
        assert res["reversal"]["reversible"]
        assert res["reversal"]["restore_residual"] <= 1e-10

    def test_reverse_needs_exact_path(self, capsys):
        code, _, err = run(capsys, "decohere", "--env-n", 11, "--theta", 0.3, "--reverse")
        assert code == 1 and "at most 10" in err


class TestCat:
    def test_half_life(self, capsys):
        assert record(capsys, "cat", "--half-life", 1, "--t", 1)["results"]["basis_ambiguous"] is True

    def test_start(self, capsys):
        res = record(capsys, "cat", "--half-life", 1, "--t", 0)["results"]
        assert res["schmidt_rank"] == 1 and res["entanglement_entropy"] == 0

    def test_two_half_lives(self, capsys):
        res = record(capsys, "cat", "--half-life", 1, "--t", 2)["results"]
        assert res["reduced_eigenvalues"] == pytest.approx([0.75, 0.25], abs=1e-12)
        assert res["basis_ambiguous"] is False

    @pytest.mark.parametrize("T", [0, -2])
    def test_bad_half_life(self, capsys, T):
        code, _, _ = run(capsys, "cat", "--half-life", T, "--t", 1)
        assert code == 1


class TestSample:
    def test_counts(self, capsys):
        res = record(capsys, "sample", "--phi-s", np.pi / 2, "--phi-a", 0, "--n-events", 10**6, "--seed", 42)["results"]
        assert sum(res["counts"].values()) == 10**6
        assert abs(res["e_hat"] - res["E"]) <= 5 * res["std_err"]

    def test_zero_events_rejected(self, capsys):
        code, _, _ = run(capsys, "sample", "--phi-s", 0, "--phi-a", 0, "--n-events", 0)
        assert code == 1


def test_record_round_trip(capsys):
    _, out, _ = run(capsys, "chsh", "--n-events", 1000, "--seed", 5)
    rec = RunRecord.from_json(out)
    assert rec.to_json() == out.rstrip("\n")


@pytest.mark.parametrize(
    "argv",
    [["sample", "--phi-s", "0.3", "--phi-a", "1", "--n-events", "5000", "--seed", "7", "--shards", "3"],
     ["sweep", "--grid-n", "8"], ["cat", "--half-life", "2", "--t", "0.7"]],
)
def test_byte_identical_reruns(capsys, argv):
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "entanglab", "rto", "--phi-s", "0", "--phi-a", "0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["E"] == pytest.approx(1)
    bad = subprocess.run([sys.executable, "-m", "entanglab", "sweep", "--grid-n", "4"], capture_output=True)
    assert bad.returncode == 1

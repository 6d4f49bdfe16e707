import json
import math

import numpy as np
import pytest

from bellsim.cli import main, read_trials_csv, write_trials_csv

CANONICAL = ["--angles", "0,-90,135,-135"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestChshSim:
    def test_quantum_run(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code, stdout, _ = run(
            capsys,
            "chsh-sim",
            "--state",
            "spin-anticorrelated",
            *CANONICAL,
            "--trials",
            "200000",
            "--seed",
            "7",
            "--out",
            str(out),
        )
        assert code == 0
        assert "S = " in stdout
        report = json.loads(out.read_text())
        assert abs(report["s_mean"] - 2 * math.sqrt(2)) < 0.05
        assert report["violated_5sigma"] is True
        assert report["bound"] == 2.0
        assert report["seed"] == 7
        assert [p["pair"] for p in report["per_pair"]] == ["dg", "dg'", "d'g", "d'g'"]

    def test_lhv_run_respects_bound(self, tmp_path, capsys):
        out = tmp_path / "report.json"
        code, _, _ = run(
            capsys,
            "chsh-sim",
            "--model",
            "sign_model",
            *CANONICAL,
            "--trials",
            "200000",
            "--seed",
            "7",
            "--out",
            str(out),
        )
        assert code == 0
        report = json.loads(out.read_text())
        assert abs(report["s_mean"]) <= 2.0 + 5 * report["s_std_error"]

    def test_zero_trials_rejected(self, capsys):
        code, _, stderr = run(
            capsys, "chsh-sim", "--state", "spin-correlated", "--trials", "0"
        )
        assert code == 2
        assert "trials must be >= 1" in stderr

    def test_unknown_model_rejected(self, capsys):
        code, _, stderr = run(
            capsys, "chsh-sim", "--model", "nonesuch", "--trials", "10"
        )
        assert code == 2
        assert "unknown model" in stderr

    def test_seed_env_default(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("BELLSIM_SEED", "123")
        out_a = tmp_path / "a.json"
        code, _, _ = run(
            capsys, "chsh-sim", "--state", "spin-correlated", "--trials", "5000",
            "--out", str(out_a),
        )
        assert code == 0
        out_b = tmp_path / "b.json"
        monkeypatch.delenv("BELLSIM_SEED")
        run(
            capsys, "chsh-sim", "--state", "spin-correlated", "--trials", "5000",
            "--seed", "123", "--out", str(out_b),
        )
        a = json.loads(out_a.read_text())
        b = json.loads(out_b.read_text())
        assert a["s_mean"] == b["s_mean"]
        assert a["seed"] == 123


class TestRoundTrip:
    def test_emit_then_analyze_bit_exact(self, tmp_path, capsys):
        trials = tmp_path / "trials.csv"
        report_a = tmp_path / "sim.json"
        report_b = tmp_path / "analyzed.json"
        code, _, _ = run(
            capsys,
            "chsh-sim",
            "--state",
            "spin-anticorrelated",
            *CANONICAL,
            "--trials",
            "50000",
            "--seed",
            "11",
            "--emit-trials",
            str(trials),
            "--out",
            str(report_a),
        )
        assert code == 0
        code, _, _ = run(capsys, "analyze", str(trials), "--out", str(report_b))
        assert code == 0
        a = json.loads(report_a.read_text())
        b = json.loads(report_b.read_text())
        assert a["s_mean"] == b["s_mean"]
        assert a["s_std_error"] == b["s_std_error"]
        assert [p["E"] for p in a["per_pair"]] == [p["E"] for p in b["per_pair"]]

    def test_rerun_reproduces_file_bytes(self, tmp_path, capsys):
        first = tmp_path / "first.csv"
        second = tmp_path / "second.csv"
        for path in (first, second):
            run(
                capsys,
                "chsh-sim",
                "--state",
                "photon-correlated",
                *CANONICAL,
                "--trials",
                "20000",
                "--seed",
                "5",
                "--emit-trials",
                str(path),
            )
        assert first.read_bytes() == second.read_bytes()

    def test_csv_writer_reader_inverse(self, tmp_path):
        from bellsim import harness
        from bellsim.qstate import StateKind, make_state

        rad = tuple(math.radians(a) for a in (0.0, -90.0, 135.0, -135.0))
        schedule = harness.chsh_schedule(*rad)
        log = harness.run_trials(
            make_state(StateKind.SPIN_ANTICORRELATED), schedule, 5000, seed=3
        )
        path = tmp_path / "t.csv"
        write_trials_csv(str(path), log, (0.0, -90.0, 135.0, -135.0))
        parsed = read_trials_csv(str(path))
        assert np.array_equal(parsed.pair_index, log.pair_index)
        assert np.array_equal(parsed.outcome_d, log.outcome_d)
        assert np.array_equal(parsed.outcome_g, log.outcome_g)
        assert parsed.pairs == log.pairs


class TestAnalyzeValidation:
    HEADER = (
        "# angles_deg: delta=0.0,delta_prime=-90.0,gamma=135.0,gamma_prime=-135.0"
    )
    COLUMNS = "pair,outcome_d,outcome_g"

    def write(self, tmp_path, rows):
        path = tmp_path / "trials.csv"
        path.write_text("\n".join([self.HEADER, self.COLUMNS, *rows]) + "\n")
        return str(path)

    def test_bad_outcome_cites_line_number(self, tmp_path, capsys):
        # valid rows fill physical lines 3-16, a zero outcome lands on line 17
        rows = ["dg,+1,-1", "dg',+1,-1", "d'g,+1,-1", "d'g',+1,-1"] * 3
        rows += ["dg,+1,-1", "dg',+1,-1"]
        rows.append("dg,0,+1")
        path = self.write(tmp_path, rows)
        code, _, stderr = run(capsys, "analyze", path)
        assert code == 2
        assert "line 17: outcome must be +1 or -1" in stderr

    def test_bad_pair_label(self, tmp_path, capsys):
        path = self.write(tmp_path, ["xy,+1,-1"])
        code, _, stderr = run(capsys, "analyze", path)
        assert code == 2
        assert "line 3" in stderr and "pair label" in stderr

    def test_missing_pair_named(self, tmp_path, capsys):
        path = self.write(tmp_path, ["dg,+1,-1", "dg',+1,-1", "d'g,+1,-1"])
        code, _, stderr = run(capsys, "analyze", path)
        assert code == 2
        assert "d'g'" in stderr

    def test_bad_header(self, tmp_path, capsys):
        path = tmp_path / "t.csv"
        path.write_text("angles: nope\n")
        code, _, stderr = run(capsys, "analyze", str(path))
        assert code == 2
        assert "line 1" in stderr

    def test_degenerate_four_rows(self, tmp_path, capsys):
        path = self.write(
            tmp_path, ["dg,+1,+1", "dg',+1,+1", "d'g,+1,+1", "d'g',+1,+1"]
        )
        out = tmp_path / "r.json"
        code, _, _ = run(capsys, "analyze", path, "--out", str(out))
        assert code == 0
        assert json.loads(out.read_text())["s_mean"] == 2.0

    def test_missing_file_is_runtime_error(self, tmp_path, capsys):
        code, _, stderr = run(capsys, "analyze", str(tmp_path / "absent.csv"))
        assert code == 1


class TestWignerScanCommand:
    def test_default_scan(self, capsys):
        code, stdout, _ = run(
            capsys, "wigner-scan", "--theta1", "0", "--theta3", "90", "--steps", "19"
        )
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[0] == "theta2_deg,lhs,rhs,margin"
        assert len(lines) == 20
        margins = [float(l.split(",")[3]) for l in lines[1:]]
        assert all(m > 0 for m in margins[1:-1])

    def test_margin_at_45(self, capsys):
        code, stdout, _ = run(capsys, "wigner-scan", "--steps", "19")
        rows = {
            float(l.split(",")[0]): float(l.split(",")[3])
            for l in stdout.strip().splitlines()[1:]
        }
        assert abs(rows[45.0] - 0.103553) < 1e-6

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "scan.csv"
        code, stdout, _ = run(capsys, "wigner-scan", "--steps", "5", "--out", str(out))
        assert code == 0
        assert out.read_text().splitlines()[0] == "theta2_deg,lhs,rhs,margin"

    def test_step_validation(self, capsys):
        code, _, stderr = run(capsys, "wigner-scan", "--steps", "1")
        assert code == 2
        assert "steps must be >= 3" in stderr


class TestEnumerateCommand:
    EXPECTED_S = "+2,+2,+2,-2,-2,-2,+2,-2,-2,+2,-2,-2,-2,+2,+2,+2"

    def test_text_s_row(self, capsys):
        code, stdout, _ = run(capsys, "enumerate")
        assert code == 0
        s_lines = [l for l in stdout.splitlines() if l.startswith("S: ")]
        assert s_lines == [f"S: {self.EXPECTED_S}"]

    def test_csv(self, capsys):
        code, stdout, _ = run(capsys, "enumerate", "--format", "csv")
        lines = stdout.strip().splitlines()
        assert len(lines) == 17
        assert lines[1] == "1,+1,+1,+1,+1,+2"

    def test_json_round_trips(self, capsys):
        code, stdout, _ = run(capsys, "enumerate", "--format", "json")
        payload = json.loads(stdout)
        assert len(payload) == 16
        assert payload == json.loads(json.dumps(payload))
        assert [q["S"] for q in payload] == [int(s) for s in self.EXPECTED_S.split(",")]

    def test_sextets(self, capsys):
        code, stdout, _ = run(
            capsys, "enumerate", "--sextets", "--sign", "anticorrelated",
            "--format", "csv",
        )
        lines = stdout.strip().splitlines()
        assert len(lines) == 9
        assert lines[1] == "+1,+1,+1,-1,-1,-1"

    def test_sextets_correlated_json(self, capsys):
        code, stdout, _ = run(
            capsys, "enumerate", "--sextets", "--sign", "correlated",
            "--format", "json",
        )
        payload = json.loads(stdout)
        assert len(payload) == 8
        assert all(item["d"] == item["g"] for item in payload)


class TestLhvSimCommand:
    def test_sign_model_quarter_turn(self, tmp_path, capsys):
        out = tmp_path / "lhv.json"
        code, stdout, _ = run(
            capsys,
            "lhv-sim",
            "--model",
            "sign_model",
            "--delta",
            "0",
            "--gamma",
            "90",
            "--trials",
            "50000",
            "--seed",
            "3",
            "--out",
            str(out),
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert abs(payload["quadrature"]) < 1e-6
        assert abs(payload["mc_mean"]) <= 5 * payload["mc_std_error"]

    def test_unknown_model(self, capsys):
        code, _, stderr = run(capsys, "lhv-sim", "--model", "nope")
        assert code == 2
        assert "unknown model" in stderr


class TestMaximizeCommand:
    def test_finds_tsirelson(self, tmp_path, capsys):
        out = tmp_path / "max.json"
        code, stdout, _ = run(
            capsys, "maximize", "--state", "spin-anticorrelated", "--out", str(out)
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert abs(payload["s_star"] - 2 * math.sqrt(2)) < 1e-6

    def test_step_validation(self, capsys):
        code, _, stderr = run(capsys, "maximize", "--coarse-step", "20")
        assert code == 2
        assert "coarse-step" in stderr


def test_usage_error_exit_code(capsys):
    assert main(["chsh-sim", "--bogus"]) == 2
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    capsys.readouterr()

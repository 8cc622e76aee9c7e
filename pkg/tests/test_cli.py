import csv
import io
import json
import os
import subprocess
import sys

import pytest

from riskgame.cli import main

from conftest import FIXTURES

PAPER = str(FIXTURES / "paper.json")


def run(*args, env=None):
    """Run the CLI in a subprocess, as a user would."""
    e = dict(os.environ)
    e.pop("RISKGAME_SEED", None)
    e.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "riskgame", *args], capture_output=True, text=True, env=e
    )


def scenario_file(tmp_path, mutate):
    doc = json.loads((FIXTURES / "paper.json").read_text())
    mutate(doc)
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(doc))
    return str(p)


class TestAnalyze:
    def test_paper(self, tmp_path):
        out = tmp_path / "a.csv"
        r = run("analyze", "--scenario", PAPER, "--out", str(out))
        assert r.returncode == 0, r.stderr
        assert "Defender strategy: Merged (98.01%)" in r.stdout
        assert "Dominated families: Cryptominer" in r.stdout
        assert "v_Ransomware >= 64.08456" in r.stdout
        assert "v_Ransomware >= 16.83155" in r.stdout
        rows = {row["attacker"]: row for row in csv.DictReader(io.StringIO(out.read_text()))}
        assert float(rows["Risk-averse"]["threshold"]) == pytest.approx(64.08456, abs=0.02)
        assert float(rows["Risk-seeking"]["threshold"]) == pytest.approx(16.83, abs=0.02)
        assert rows["Risk-averse"]["best_default"] == "Keylogger"

    def test_unrounded(self, capsys):
        assert main(["analyze", "--scenario", PAPER, "--p-rounding-decimals", "none"]) == 0
        assert "v_Ransomware >= 60.55486" in capsys.readouterr().out

    def test_uniform_matrix_picks_packets(self, tmp_path, capsys):
        def uniform(d):
            for row in d["detection_matrix"].values():
                for k in row:
                    row[k] = "90"
        assert main(["analyze", "--scenario", scenario_file(tmp_path, uniform)]) == 0
        assert "Defender strategy: Packets" in capsys.readouterr().out

    def test_risk_neutral_threshold(self, tmp_path, capsys):
        path = scenario_file(tmp_path, lambda d: d.__setitem__("attackers", [{"label": "N", "alpha": 0}]))
        assert main(["analyze", "--scenario", path]) == 0
        out = capsys.readouterr().out
        assert "v_Ransomware >= 23.53846" in out
        assert "RiskNeutral" in out


class TestRegions:
    def test_default_grid(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["regions", "--scenario", PAPER, "--out", str(out)]) == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert len(rows) == 200 * 200

    def test_boundary_at_risk_averse_alpha(self, tmp_path):
        out = tmp_path / "g.csv"
        assert main(["regions", "--scenario", PAPER, "--out", str(out),
                     "--alpha-min", "-0.04", "--alpha-max", "0.04"]) == 0
        col = [r for r in csv.DictReader(io.StringIO(out.read_text())) if r["alpha"] == "0.04"]
        first = next(float(r["ratio"]) for r in col if r["preferred"] == "Ransomware")
        last_k = max(float(r["ratio"]) for r in col if r["preferred"] == "Keylogger")
        assert 64 <= last_k < first <= 65

    def test_single_step(self, capsys):
        assert main(["regions", "--scenario", PAPER, "--steps", "1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "alpha,ratio,preferred,eu_keylogger,eu_ransomware"
        assert len(lines) == 2

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        main(["regions", "--scenario", PAPER, "--steps", "50", "--out", str(a)])
        main(["regions", "--scenario", PAPER, "--steps", "50", "--out", str(b), "--workers", "3"])
        assert a.read_bytes() == b.read_bytes()

    def test_unwritable_output(self, tmp_path):
        r = run("regions", "--scenario", PAPER, "--out", str(tmp_path / "missing" / "g.csv"))
        assert r.returncode == 2


class TestSimulate:
    def test_table(self, tmp_path):
        out = tmp_path / "s.csv"
        r = run("simulate", "--scenario", PAPER, "--out", str(out), "--trials", "2000")
        assert r.returncode == 0, r.stderr
        risk_seeking = next(l for l in r.stdout.splitlines() if l.startswith("Risk-seeking"))
        cells = [float(x) for x in risk_seeking.split("|")[1:]]
        assert cells == pytest.approx([3.674, 0.148, 2.653, 0.0, 0.140, 62.440], abs=1e-3)
        header = out.read_text().splitlines()[0]
        assert header == ("attacker,alpha,variant,family,value,p_belief,p_actual,expected_utility,"
                          "analytic_realized,mc_mean,mc_std_error,detections,trials")

    def test_seed_env_and_flag(self, tmp_path):
        paths = [tmp_path / f"{i}.csv" for i in range(4)]
        run("simulate", "--scenario", PAPER, "--trials", "5000", "--out", str(paths[0]))
        run("simulate", "--scenario", PAPER, "--trials", "5000", "--out", str(paths[1]),
            env={"RISKGAME_SEED": "42"})
        run("simulate", "--scenario", PAPER, "--trials", "5000", "--out", str(paths[2]),
            env={"RISKGAME_SEED": "9"})
        run("simulate", "--scenario", PAPER, "--trials", "5000", "--out", str(paths[3]),
            "--seed", "9")
        assert paths[0].read_bytes() == paths[1].read_bytes()
        assert paths[0].read_bytes() != paths[2].read_bytes()
        assert paths[2].read_bytes() == paths[3].read_bytes()

    def test_zero_trials(self, tmp_path):
        path = scenario_file(tmp_path, lambda d: d["simulation"].__setitem__("trials", 0))
        assert run("simulate", "--scenario", path).returncode == 1
        assert run("simulate", "--scenario", PAPER, "--trials", "0").returncode == 1

    def test_all_detected(self, tmp_path, capsys):
        def certain(d):
            for k in d["actual_detections"]:
                d["actual_detections"][k] = "100"
        out = tmp_path / "s.csv"
        assert main(["simulate", "--scenario", scenario_file(tmp_path, certain),
                     "--trials", "100", "--out", str(out)]) == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert all(float(r["analytic_realized"]) == 0 and float(r["mc_mean"]) == 0 for r in rows)

    def test_missing_actual_detection_names_variant(self, tmp_path, capsys):
        path = scenario_file(tmp_path, lambda d: d["actual_detections"].pop("Stealthy keylogger"))
        assert main(["simulate", "--scenario", path]) == 1
        assert "Stealthy keylogger" in capsys.readouterr().err


class TestExitCodes:
    def test_validation_error(self, tmp_path):
        path = scenario_file(
            tmp_path, lambda d: d["detection_matrix"]["Keylogger"].__setitem__("Merged", "120")
        )
        r = run("analyze", "--scenario", path)
        assert r.returncode == 1
        assert "detection_matrix.Keylogger.Merged" in r.stderr

    def test_parse_error(self, tmp_path):
        p = tmp_path / "x.json"
        p.write_text("[")
        assert run("analyze", "--scenario", str(p)).returncode == 1

    def test_missing_file(self, tmp_path):
        assert run("analyze", "--scenario", str(tmp_path / "none.json")).returncode == 2

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

import paperdata
from endoring.cli import main
from endoring.serialize import (
    algebra_to_json,
    frac_from_str,
    load_problem,
    order_from_json,
    order_to_json,
)

ROOT = Path(__file__).resolve().parent.parent
PROBLEM = ROOT / "problems" / "p103_worked_example.json"


def run_cli(args):
    return main([str(a) for a in args])


def test_compute_worked_example(tmp_path, capsys):
    out = tmp_path / "result.json"
    trace = tmp_path / "trace.jsonl"
    dots = tmp_path / "dots"
    code = run_cli(
        ["compute", "--input", PROBLEM, "--output", out, "--trace", trace,
         "--dot-dir", dots, "--deterministic"]
    )
    assert code == 0
    result = json.loads(out.read_text())
    end = order_from_json(result["endomorphism_ring"])
    assert end.lattice == paperdata.endomorphism_ring().lattice
    assert result["total_oracle_calls"] > 0
    by_q = {s["q"]: s for s in result["local_solutions"]}
    assert by_q[7]["bass"] is False and by_q[7]["r"] == 1
    assert by_q[13]["bass"] is True
    assert len(by_q[7]["path"]) == 1
    assert trace.exists()
    lines = [json.loads(line) for line in trace.read_text().splitlines()]
    assert any(ev["type"] == "oracle" for ev in lines)
    assert any(ev["type"] == "step" for ev in lines)
    assert (dots / "explored_q7.dot").exists()


def test_compute_deterministic_byte_identical(tmp_path):
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert run_cli(["compute", "--input", PROBLEM, "--output", out1, "--deterministic"]) == 0
    assert run_cli(["compute", "--input", PROBLEM, "--output", out2, "--deterministic"]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_compute_idempotent_on_own_output(tmp_path):
    out = tmp_path / "result.json"
    assert run_cli(["compute", "--input", PROBLEM, "--output", out, "--deterministic"]) == 0
    result = json.loads(out.read_text())
    problem = json.loads(PROBLEM.read_text())
    problem["order"] = result["endomorphism_ring"]
    problem["discriminant_factorization"] = [[103, 1]]
    p2 = tmp_path / "problem2.json"
    p2.write_text(json.dumps(problem))
    out2 = tmp_path / "result2.json"
    assert run_cli(["compute", "--input", p2, "--output", out2, "--deterministic"]) == 0
    result2 = json.loads(out2.read_text())
    assert result2["endomorphism_ring"]["basis"] == result["endomorphism_ring"]["basis"]
    assert result2["total_oracle_calls"] == 0


def test_corrupted_factorization_rejected(tmp_path, capsys):
    problem = json.loads(PROBLEM.read_text())
    problem["discriminant_factorization"] = [[7, 4], [13, 3], [103, 1]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(problem))
    assert run_cli(["compute", "--input", bad]) == 2


def test_non_order_basis_rejected(tmp_path):
    problem = json.loads(PROBLEM.read_text())
    problem["order"]["basis"] = [["1", "0", "0", "0"], ["0", "1/2", "0", "0"],
                                 ["0", "0", "1", "0"], ["0", "0", "0", "1"]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(problem))
    assert run_cli(["compute", "--input", bad]) == 2


def test_btt_distance_and_d3(capsys):
    assert run_cli(["btt", "distance", "3", "0", "1"]) == 0
    assert capsys.readouterr().out.strip() == "2"
    assert run_cli(["btt", "d3", "3", "0,0", "1", "inf"]) == 0
    assert capsys.readouterr().out.strip() == "8"


def test_btt_ball_and_dot(capsys):
    assert run_cli(["btt", "ball", "3", "--radius", "1"]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 5 and "0,0,0" in out
    assert run_cli(["btt", "dot", "3", "--radius", "2"]) == 0
    dot = capsys.readouterr().out
    assert dot.count("--") == 16  # 17 vertices, 16 tree edges
    assert dot.startswith("graph")


def test_divide_params_output(capsys):
    assert run_cli(["divide-params", "60", "2", "103"]) == 0
    out = capsys.readouterr().out
    assert "N = 15" in out and "N+a = 77" in out and "B = 11" in out
    assert run_cli(["divide-params", "112", "7", "103"]) == 0
    out = capsys.readouterr().out
    assert "precheck failed" in out


def test_console_script_entrypoint():
    proc = subprocess.run(
        [sys.executable, "-m", "endoring.cli", "btt", "distance", "5", "-", "0"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1"

import json
import os
import subprocess
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import pytest

TEST_DIR = Path(__file__).parent
ROOT_DIR = TEST_DIR.parent.parent


def run_cli(*args: str, env: Optional[Dict[str, str]] = None
            ) -> subprocess.CompletedProcess:
    """Run `python -m nicomachus` with the repo on the path."""
    full_env = dict(os.environ)
    full_env["PYTHONPATH"] = os.pathsep.join(
        [str(ROOT_DIR), full_env.get("PYTHONPATH", "")])
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "nicomachus", *args],
        capture_output=True, text=True, cwd=ROOT_DIR, env=full_env)


def run_json(*args: str, expected_code: int = 0,
             env: Optional[Dict[str, str]] = None) -> Dict[str, Any]:
    result = run_cli(*args, "--format", "json", env=env)
    assert result.returncode == expected_code, \
        f"Error: {result.stdout}\n{result.stderr}"
    payload = json.loads(result.stdout)
    assert payload["schema"] == "nicomachus/1"
    assert json.loads(json.dumps(payload)) == payload
    return payload


def as_pairs(rows: List[List[str]]) -> List[tuple]:
    return [tuple(int(v) for v in row) for row in rows]


def test_reps_positive():
    payload = run_json("reps", "91", "--positive")
    result = payload["result"]
    assert payload["command"] == "reps"
    assert payload["status"] == "ok"
    assert as_pairs(result["pairs"]) == [(1, 9), (5, 6), (6, 5), (9, 1)]
    assert result["count_formula"] == "4"
    assert result["count_enumerated"] == "4"
    assert result["agree"] is True


def test_reps_all_for_a_non_representable_value():
    result = run_json("reps", "2", "--all")["result"]
    assert result["pairs"] == []
    assert result["count_formula"] == "0"


def test_reps_json_lists_strings():
    result = run_json("reps", "343", "--positive")["result"]
    assert len(result["pairs"]) == 4
    assert all(isinstance(v, str) for row in result["pairs"] for v in row)


def test_reps_text():
    result = run_cli("reps", "91")
    assert result.returncode == 0, f"Error: {result.stderr}"
    assert "m = 4" in result.stdout


def test_solve():
    solutions = run_json("solve", "9")["result"]["solutions"]
    assert [(s["k"], s["x"]) for s in solutions] == [("4", "7"), ("5", "6")]
    assert all(s["verified"] for s in solutions)
    assert run_json("solve", "8")["result"]["solutions"] == []
    solutions = run_json("solve", "22")["result"]["solutions"]
    assert [(s["k"], s["x"]) for s in solutions] == [("12", "14")]


def test_verify():
    result = run_json("verify", "4", "7", "9")["result"]
    assert (result["lhs"], result["rhs"]) == ("2304", "2304")
    assert result["kind"] == "nontrivial"
    payload = run_json("verify", "5", "7", "9", expected_code=1)
    assert payload["status"] == "counterexample"
    assert payload["result"]["equal"] is False
    result = run_json("verify", "8", "2", "9")["result"]
    assert result["kind"] == "trivial_x_eq_2"


def test_verify_text_exit_codes():
    assert run_cli("verify", "4", "7", "9").returncode == 0
    assert run_cli("verify", "5", "7", "9").returncode == 1


@pytest.mark.parametrize("n, text, exists, m", [
    ("10", "3·37", False, "2"),
    ("18", "7^3", True, "4"),
    ("9", "7·13", True, "4"),
])
def test_characterize(n, text, exists, m):
    result = run_json("characterize", n)["result"]
    assert result["factorization_text"] == text
    assert result["t2"] is exists
    assert result["agree"] is True
    assert result["corollary"] is True
    assert result["m"] == m


def test_characterize_verdicts_in_text():
    result = run_cli("characterize", "10")
    assert "no nontrivial (3·prime)" in result.stdout
    result = run_cli("characterize", "18")
    assert "m = 4" in result.stdout
    assert "nontrivial exists" in result.stdout


def test_pigeonhole():
    result = run_json("pigeonhole", "9")["result"]
    assert result["s"] == "7"
    assert (result["a"], result["b"]) in {("5", "6"), ("6", "5")}
    assert all(check["passed"] for check in result["checks"])
    result = run_json("pigeonhole", "22", "--strategy", "sorted")["result"]
    assert (result["a"], result["b"]) == ("13", "13")


def test_pigeonhole_without_hypotheses():
    payload = run_json("pigeonhole", "8", expected_code=2)
    assert payload["status"] == "error"
    assert run_cli("pigeonhole", "8").returncode == 2


def test_pigeonhole_memory_guard():
    payload = run_json("pigeonhole", "100", "--max_table", "10",
                       expected_code=2)
    assert payload["result"]["type"] == "ResourceLimitError"


def test_scan_conjecture():
    payload = run_json("scan", "--max", "1000", "--mode", "conjecture")
    assert payload["status"] == "ok"
    assert payload["result"]["checked"] == "999"
    assert payload["result"]["counterexamples"] == []


def test_scan_is_deterministic_across_jobs():
    outputs = [
        run_json("scan", "--max", "100", "--jobs", jobs, "--no_timing",
                 "--chunk_size", "10")["result"]
        for jobs in ("1", "4")
    ]
    assert outputs[0] == outputs[1]
    assert "elapsed_sec" not in outputs[0]


def test_scan_equivalence_with_hyphenated_options():
    payload = run_json("scan", "--max", "500", "--mode", "equivalence",
                       "--enum-cap", "500")
    assert payload["result"]["counterexamples"] == []


def test_scan_jobs_from_environment():
    payload = run_json("scan", "--max", "50",
                       env={"NICOMACHUS_JOBS": "2"})
    assert payload["inputs"]["jobs"] == "2"
    assert payload["result"]["workers"] == "2"


def test_scan_config_file(tmp_path):
    config = tmp_path / "scan.yaml"
    config.write_text(
        "min: 10\nmax: 200\nmode: equivalence\nenum_cap: 200\n"
        f"output_folder: {tmp_path / 'reports'}\n")
    payload = run_json("scan", "--config", str(config))
    assert payload["result"]["range"] == ["10", "200"]
    assert payload["result"]["mode"] == "equivalence"
    stored = tmp_path / "reports" / "scan_equivalence_10_200.json"
    assert stored.exists()


@pytest.mark.parametrize("args", [
    ("reps", "0"),
    ("scan",),
    ("scan", "--max", "100000000"),
    ("solve", "1000001"),
    ("unknown",),
    ("verify", "1", "2"),
])
def test_usage_errors(args):
    assert run_cli(*args).returncode == 2


def test_scan_text_summary():
    result = run_cli("scan", "--max", "300", "--mode", "equivalence",
                     "--enum_cap", "300")
    assert result.returncode == 0, f"Error: {result.stderr}"
    assert "equivalence scan of [2, 300]" in result.stdout


@pytest.mark.parametrize("args", [
    ("verify", "10000000000000", "0", "1"),
    ("verify", "0", "10000000000000", "1"),
])
def test_verify_out_of_range_is_a_usage_error(args):
    result = run_cli(*args)
    assert result.returncode == 2
    assert "Traceback" not in result.stderr
    assert "128-bit" in result.stderr


def test_verify_out_of_range_json():
    payload = run_json("verify", "10000000000000", "0", "1",
                       expected_code=2)
    assert payload["status"] == "error"
    assert payload["result"]["type"] == "ArithmeticRangeError"


@pytest.mark.parametrize("args", [
    ("reps", "10000000000000"),
    ("solve", "10000000000"),
    ("characterize", "10000000000"),
    ("pigeonhole", "10000000000"),
    ("scan", "--max", "100000000"),
])
def test_range_errors_keep_the_envelope(args):
    payload = run_json(*args, expected_code=2)
    assert payload["command"] == args[0]
    assert payload["status"] == "error"
    assert payload["result"]["type"] == "DomainError"


def test_scan_without_max_json():
    payload = run_json("scan", expected_code=2)
    assert payload["status"] == "error"
    assert payload["result"]["type"] == "UsageError"
    assert "--max" in payload["result"]["error"]


def test_scan_config_unknown_key_json(tmp_path):
    config = tmp_path / "scan.yaml"
    config.write_text("max: 100\nworkers: 2\n")
    payload = run_json("scan", "--config", str(config), expected_code=2)
    assert payload["result"]["type"] == "UsageError"
    assert "workers" in payload["result"]["error"]
    assert run_cli("scan", "--config", str(config)).returncode == 2

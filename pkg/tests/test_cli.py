"""Command-line interface: dispatch, formats, exit codes, channels."""

import json
import math
import subprocess
import sys

import pytest

from oneshot_qit import dump_state
from oneshot_qit.cli import run

from conftest import binary_antipodal, bit_pair_trivial_side


@pytest.fixture()
def bitpair_file(tmp_path):
    path = tmp_path / "bitpair.json"
    dump_state(bit_pair_trivial_side(), path)
    return str(path)


@pytest.fixture()
def antipodal_file(tmp_path):
    path = tmp_path / "antipodal.json"
    dump_state(binary_antipodal(), path)
    return str(path)


def run_json(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    assert code == 0, captured.err
    return json.loads(captured.out), captured.err


def test_simulate_pa_exact_value(capsys, bitpair_file):
    payload, _ = run_json(capsys, [
        "simulate", "--task", "pa", "--state", bitpair_file,
        "--size", "2", "--method", "exact",
    ])
    assert payload["schema"] == "oneshot-qit/1"
    assert payload["log_base"] == 2
    assert payload["results"]["value"] == pytest.approx(0.25, abs=1e-12)
    assert payload["results"]["hash_family"] == "exhaustive-uniform-function"
    assert payload["params"]["size"] == 2


def test_divergence_identical_states(capsys, bitpair_file):
    payload, _ = run_json(capsys, [
        "divergence", "--kind", "dh", "--state-a", bitpair_file,
        "--state-b", bitpair_file, "--eps", "0.3",
    ])
    assert payload["results"]["value_bits"] == pytest.approx(
        -math.log2(0.7), abs=1e-9
    )


def test_divergence_requires_eps(capsys, bitpair_file):
    code = run([
        "divergence", "--kind", "ds", "--state-a", bitpair_file,
        "--state-b", bitpair_file,
    ])
    captured = capsys.readouterr()
    assert code == 2
    assert "eps" in captured.err
    assert captured.out == ""


def test_bounds_domain_error_exit_code(capsys, antipodal_file):
    code = run([
        "bounds", "--task", "covering", "--state", antipodal_file,
        "--eps", "0.3", "--delta", "0.12", "--c", "0.05",
    ])
    captured = capsys.readouterr()
    assert code == 2
    assert "delta must be < eps/3" in captured.err
    assert captured.out == ""


def test_bounds_success(capsys, antipodal_file):
    payload, _ = run_json(capsys, [
        "bounds", "--task", "covering", "--state", antipodal_file,
        "--eps", "0.3", "--delta", "0.09", "--c", "0.04",
    ])
    res = payload["results"]
    assert res["lower_bits"] <= res["upper_bits"]
    assert res["nu"] == 1


def test_unreadable_state_file(capsys):
    code = run([
        "simulate", "--task", "pa", "--state", "/nonexistent.json",
        "--size", "2", "--method", "exact",
    ])
    captured = capsys.readouterr()
    assert code == 2
    assert captured.out == ""


def test_unknown_flag_exit_code(capsys):
    code = run(["simulate", "--task", "pa", "--no-such-flag", "1"])
    assert code == 2


def test_search_emits_note_on_stderr_not_stdout(capsys, antipodal_file):
    payload, err = run_json(capsys, [
        "search", "--task", "pa", "--state", antipodal_file,
        "--eps", "0.9", "--cap", "3",
    ])
    assert payload["results"]["cap_limited"] is True
    assert "cap-limited" in err
    # and --quiet silences the note
    payload, err = run_json(capsys, [
        "search", "--task", "pa", "--state", antipodal_file,
        "--eps", "0.9", "--cap", "3", "--quiet",
    ])
    assert err == ""


def test_search_covering(capsys, antipodal_file):
    payload, _ = run_json(capsys, [
        "search", "--task", "covering", "--state", antipodal_file,
        "--eps", "0.25", "--cap", "4",
    ])
    assert payload["results"]["found"] == 2
    assert payload["results"]["rows"][0]["value"] == pytest.approx(0.5)


def test_rates_covering_sign(capsys, antipodal_file):
    payload, _ = run_json(capsys, [
        "rates", "--task", "covering", "--state", antipodal_file,
        "--eps", "0.2", "--n", "100",
    ])
    res = payload["results"]
    # information 1 bit, zero variance: value is exactly n
    assert res["first_order_bits"] == pytest.approx(1.0, abs=1e-9)
    assert res["rows"][0]["value_bits"] == pytest.approx(100.0, abs=1e-6)


def test_rates_requires_exactly_one_blocklength(capsys, antipodal_file):
    code = run([
        "rates", "--task", "pa", "--state", antipodal_file, "--eps", "0.2",
    ])
    assert code == 2
    capsys.readouterr()


def test_sweep_second_order_csv(capsys):
    code = run([
        "sweep", "--regime", "second", "--p", "0.333333333333,0.666666666667",
        "--q", "0.5,0.5", "--eps", "0.2", "--n-list", "4,16", "--format", "csv",
    ])
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.strip().splitlines()
    assert lines[0].split(",")[:3] == ["n", "exact_bits", "prediction_bits"]
    assert len(lines) == 3


def test_sweep_moderate_has_both_branches(capsys):
    payload, _ = run_json(capsys, [
        "sweep", "--regime", "moderate", "--p", "0.3,0.7", "--q", "0.5,0.5",
        "--t", "0.33", "--n-list", "16,64",
    ])
    directions = {row["direction"] for row in payload["results"]["rows"]}
    assert directions == {-1, 1}


def test_json_round_trip_reproducibility(capsys, bitpair_file):
    argv = [
        "simulate", "--task", "pa", "--state", bitpair_file,
        "--size", "2", "--method", "mc", "--samples", "5000", "--seed", "9",
    ]
    first, _ = run_json(capsys, argv)
    # re-run with the parameters embedded in the emitted document
    params = first["params"]
    argv2 = [
        "simulate", "--task", params["task"], "--state", params["state"],
        "--size", str(params["size"]), "--method", params["method"],
        "--samples", str(params["samples"]), "--seed", str(params["seed"]),
        "--workers", str(params["workers"]),
    ]
    second, _ = run_json(capsys, argv2)
    assert first == second


def test_csv_scalar_output(capsys, bitpair_file):
    code = run([
        "divergence", "--kind", "kl", "--state-a", bitpair_file,
        "--state-b", bitpair_file, "--format", "csv",
    ])
    captured = capsys.readouterr()
    assert code == 0
    lines = captured.out.strip().splitlines()
    assert lines[0] == "key,value"
    assert any(line.startswith("results.value_bits,") for line in lines)


def test_console_entry_point_subprocess(bitpair_file):
    proc = subprocess.run(
        [sys.executable, "-m", "oneshot_qit.cli", "simulate", "--task", "pa",
         "--state", bitpair_file, "--size", "2", "--method", "exact"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["results"]["value"] == pytest.approx(0.25, abs=1e-12)

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qdpverify import fixtures
from qdpverify.cli import cmd_compose, cmd_curve, cmd_kappa, cmd_verify, main, parse_grid
from qdpverify.errors import InvalidInput
from qdpverify.linalg import trace_distance
from qdpverify.model import NoiseInjection
from qdpverify.oracle import check_counterexample
from qdpverify.serialize import load_algorithm_file, load_report
from qdpverify.verifier import DpParams

RELABELLED = fixtures.fixture_path("flat_effects_relabelled")
FLAT = fixtures.fixture_path("flat_effects")


def _error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_verify_violation_writes_replayable_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert cmd_verify(RELABELLED, 0.0, 0.0, 0.5, out) == 2
    printed = capsys.readouterr().out
    assert "delta*: 0.16666666666666" in printed and "S*: {0}" in printed
    report = load_report(out)
    assert report["private"] is False
    assert report["kappa_star"] == math.inf
    gamma = np.diag([0.5, 0.5, 0.0, 0.0])
    assert trace_distance(report["witness"].gamma, gamma) <= 1e-8
    assert trace_distance(report["witness"].phi, np.diag([0.0, 1.0, 0.0, 0.0])) <= 1e-8
    alg = load_algorithm_file(RELABELLED).algorithm()
    assert check_counterexample(alg, report["witness"], DpParams(0.0, 0.0, 0.5))
    assert report["provenance"]["input_sha256"]
    assert len(report["per_subset"]) == 3


def test_verify_private_with_delta_one(tmp_path):
    assert cmd_verify(RELABELLED, 0.0, 1.0, 0.5, tmp_path / "r.json") == 0
    assert load_report(tmp_path / "r.json")["witness"] is None


def test_verify_cross_check(tmp_path):
    out = tmp_path / "r.json"
    assert cmd_verify(RELABELLED, 0.0, 0.0, 0.5, out, cross_check=True, oracle_trials=2000, seed=7) == 2
    cc = json.loads(out.read_text())["cross_check"]
    assert cc["agrees"] and cc["witness_replays"] and cc["seed"] == 7
    assert cc["sampled_supremum"] == pytest.approx(1 / 6)


def test_unknown_gate_exits_one_with_error_record(tmp_path, capsys):
    data = json.loads(fixtures.fixture_path("qaoa_2q").read_text())
    data["gates"][0]["name"] = "RYY"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert cmd_verify(bad, 0.1, 0.0, 0.5) == 1
    assert _error(capsys)["error"] == "UnknownGate"


def test_kappa_reports(tmp_path):
    out = tmp_path / "k.json"
    assert cmd_kappa(FLAT, 1.0, out) == 0
    assert json.loads(out.read_text())["kappa_star"] == 1.0
    assert cmd_kappa(RELABELLED, 1.0, out) == 0
    assert json.loads(out.read_text())["kappa_star"] == "inf"
    assert cmd_kappa(fixtures.fixture_path("identity_1q"), 1.0, out) == 0
    assert json.loads(out.read_text())["kappa_star"] == "inf"


def test_curve_of_flat_algorithm_is_zero(tmp_path):
    out = tmp_path / "c.csv"
    assert cmd_curve(FLAT, "0.1,0.5,1.0", out) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["eta", "eps_star"]
    assert [float(r[1]) for r in rows[1:]] == [0.0, 0.0, 0.0]


def test_curve_noise_sweep_is_pointwise_lower(tmp_path):
    path = fixtures.fixture_path("qaoa_2q")
    curves = {}
    for p in (0.01, 0.001):
        out = tmp_path / f"c{p}.csv"
        assert cmd_curve(path, "linspace:0.1:1:10", out, noise=NoiseInjection("depolarizing", p)) == 0
        curves[p] = [float(r[1]) for r in list(csv.reader(out.open()))[1:]]
    assert all(a < b for a, b in zip(curves[0.01], curves[0.001]))


def test_parse_grid():
    assert parse_grid("linspace:0.5:1:3") == [0.5, 0.75, 1.0]
    assert parse_grid("0.2, 0.4") == [0.2, 0.4]
    with pytest.raises(InvalidInput):
        parse_grid("0,0.5")


def test_compose_round_trips_through_verify(tmp_path):
    out = tmp_path / "joint.json"
    assert cmd_compose(FLAT, FLAT, "0", "0", out) == 0
    report = tmp_path / "k.json"
    assert cmd_kappa(out, 1.0, report) == 0
    assert json.loads(report.read_text())["kappa_star"] == pytest.approx(1.0)
    assert cmd_verify(out, 0.0, 0.0, 0.5, tmp_path / "v.json") == 0


def test_compose_trivial_files(tmp_path):
    trivial = fixtures.fixture_path("trivial")
    out = tmp_path / "t.json"
    assert cmd_compose(trivial, trivial, "0", "0", out) == 0
    alg = load_algorithm_file(out).algorithm()
    assert alg.labels == ("0", "1")
    assert np.allclose(alg.povm.elements[1], 0)


def test_compose_rejects_unknown_label(tmp_path, capsys):
    assert cmd_compose(FLAT, FLAT, "5", "0", tmp_path / "x.json") == 1
    assert _error(capsys)["error"] == "InvalidInput"


def test_main_exit_codes(tmp_path, capsys):
    assert main(["verify", str(RELABELLED), "--eps", "0", "--eta", "0.5"]) == 2
    assert main(["verify", str(RELABELLED), "--eps", "0", "--delta", "1", "--eta", "0.5"]) == 0
    assert main(["verify", str(RELABELLED), "--eps", "zero", "--eta", "0.5"]) == 1
    assert main(["kappa", str(tmp_path / "missing.json")]) == 1
    assert main(["verify", str(FLAT), "--eps", "0", "--eta", "0.5", "--p", "0.1"]) == 1
    assert main(["curve", str(FLAT), "--etas", "0.5"]) == 0
    capsys.readouterr()


def test_noise_flags_replace_file_noise(tmp_path, capsys):
    path = str(fixtures.fixture_path("qaoa_2q"))
    main(["kappa", path, "--noise", "bit_flip", "--p", "0.01"])
    bit_flip = capsys.readouterr().out
    main(["kappa", path])
    depolarizing = capsys.readouterr().out
    assert bit_flip != depolarizing


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "qdpverify.cli", "kappa", str(FLAT)], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "kappa*: 1.0" in proc.stdout

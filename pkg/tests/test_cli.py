import csv
import io
import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from gwalk.cli import (
    InputError,
    main,
    parse_inflow,
    parse_n_range,
    parse_theta,
    parse_thetas,
    sweep_columns,
)
from gwalk.graph import complete_graph, graph_to_json, path_graph

THETA_STAR_4 = np.arccos(-1 / 3)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.mark.parametrize("theta, value", [("0", 13 / 8), ("pi", 5 / 12)])
def test_stationary_k4(capsys, theta, value):
    code, out, _ = run(capsys, "stationary", "--graph", "complete:4:2", "--theta", theta, "--inflow", "1,0")
    assert code == 0
    table = rows(out)
    assert len(table) == 12
    assert list(table[0]) == ["arc_id", "origin", "terminus", "re", "im", "abs2"]
    assert sum(float(r["abs2"]) for r in table) == pytest.approx(2 * value, abs=1e-10)


def test_stationary_oracle_method(capsys):
    code, out, _ = run(capsys, "stationary", "--graph", "complete:4:2", "--theta", "pi/3", "--method", "oracle", "--tol", "1e-12")
    ref_code, ref, _ = run(capsys, "stationary", "--graph", "complete:4:2", "--theta", "pi/3")
    assert code == ref_code == 0
    a = np.array([[float(r["re"]), float(r["im"])] for r in rows(out)])
    b = np.array([[float(r["re"]), float(r["im"])] for r in rows(ref)])
    assert np.max(np.abs(a - b)) < 1e-9


def test_stationary_json(capsys, tmp_path):
    out = tmp_path / "phi.json"
    code, _, _ = run(capsys, "stationary", "--graph", "complete:4:2", "--theta", "0", "--format", "json", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["comfortability"] == pytest.approx(13 / 8)
    assert len(doc["arcs"]) == 12


def test_graph_file_input(capsys, tmp_path):
    path = tmp_path / "p2.json"
    path.write_text(json.dumps(graph_to_json(path_graph(2, 2))))
    code, out, _ = run(capsys, "scatter", "--graph", str(path), "--theta", "pi/2")
    assert code == 0
    S = {(int(r["row"]), int(r["col"])): complex(float(r["re"]), float(r["im"])) for r in rows(out)}
    assert abs(S[0, 1] + 1) < 1e-12 and abs(S[0, 0]) < 1e-12


def test_missing_graph_file_exit_2(capsys, tmp_path):
    code, _, err = run(capsys, "stationary", "--graph", str(tmp_path / "nope.json"), "--theta", "0")
    assert code == 2
    assert "error" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["stationary", "--graph", "complete:4:2", "--theta", "0", "--inflow", "1,0,0"],
        ["stationary", "--graph", "complete:4:2", "--theta", "abc"],
        ["stationary", "--graph", "complete:4:2"],
        ["sweep", "--graph", "complete:4:2", "--thetas", "0.5"],
        ["sweep", "--graph", "complete:4:2"],
        ["comfort", "--graph", "complete:4:3", "--theta", "theta_star"],
    ],
    ids=["inflow-length", "bad-theta", "no-theta", "single-theta", "no-thetas", "no-theta-star"],
)
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_solver_failure_exit_3(capsys):
    code, _, err = run(
        capsys, "stationary", "--graph", "complete:4:2", "--theta", "0", "--method", "oracle", "--max-iter", "3"
    )
    assert code == 3
    assert "solver" in err


def test_scatter_perfect_reflection(capsys):
    code, out, _ = run(capsys, "scatter", "--graph", "complete:5:2", "--theta", "-theta_star", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    S = np.array(doc["S_re"]) + 1j * np.array(doc["S_im"])
    np.testing.assert_allclose(S, np.exp(-1j * np.arccos(-1 / 4)) * np.eye(2), atol=1e-10)
    assert doc["unitarity_defect"] < 1e-9


def test_comfort_theta_star_token(capsys):
    code, out, _ = run(capsys, "comfort", "--graph", "complete:4:2", "--theta", "theta_star")
    assert code == 0
    assert float(rows(out)[0]["comfortability"]) == pytest.approx(4.5, abs=1e-10)


def test_comfort_list(capsys):
    code, out, _ = run(capsys, "comfort", "--graph", "complete:4:2", "--thetas", "0,pi,-theta_star")
    vals = [float(r["comfortability"]) for r in rows(out)]
    assert code == 0
    np.testing.assert_allclose(vals, [13 / 8, 5 / 12, 4.5], atol=1e-10)


def test_sweep_k4(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "complete:4:2", "--thetas", "-pi:pi:721")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == sweep_columns(2)
    theta = np.array([float(r["theta"]) for r in table])
    e = np.array([float(r["comfortability"]) for r in table])
    assert len(table) == 721 and np.all(np.diff(theta) > 0)
    assert e[360] == pytest.approx(13 / 8, abs=1e-10)
    assert e[0] == pytest.approx(5 / 12, abs=1e-10) and e[-1] == pytest.approx(5 / 12, abs=1e-10)
    # local spike: maximum of the curve sits next to +-theta*
    k = int(np.argmax(e))
    assert abs(abs(theta[k]) - THETA_STAR_4) < 2 * np.pi / 720 + 1e-12
    flags = {float(r["theta"]) for r in table if r["is_singular"] == "1"}
    assert flags == {-np.pi, 0.0, np.pi}


def test_sweep_flags_exact_singular_points(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "complete:4:2", "--thetas", "theta_star,1.0,-theta_star,0")
    table = rows(out)
    assert code == 0
    assert [r["is_singular"] for r in table] == ["1", "1", "0", "1"]
    assert float(table[0]["theta"]) == pytest.approx(-THETA_STAR_4)
    assert float(table[3]["transmit_rate_1_0"]) == pytest.approx(0, abs=1e-20)


def test_sweep_bottom_curve(capsys):
    curves = {}
    for ell in range(1, 5):
        _, out, _ = run(capsys, "sweep", "--graph", f"complete:4:{ell}", "--thetas", "-pi:pi:73")
        curves[ell] = np.array([float(r["comfortability"]) for r in rows(out)])
    for ell in range(1, 4):
        assert np.all(curves[4] <= curves[ell] + 1e-12)


def test_sweep_byte_stable_and_workers(capsys, tmp_path):
    outs = []
    for workers in ("1", "1", "2"):
        path = tmp_path / f"s{len(outs)}.csv"
        code, _, _ = run(
            capsys, "sweep", "--graph", "complete:5:3", "--thetas", "-pi:pi:25", "--workers", workers, "--out", str(path)
        )
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_sweep_json(capsys):
    code, out, _ = run(capsys, "sweep", "--graph", "path:2:2", "--thetas", "0:1:3", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["columns"] == sweep_columns(2) and len(doc["rows"]) == 3


def test_verify_default_passes(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "--out", str(report))
    assert code == 0
    assert out.strip().splitlines()[-1].startswith("OK")
    doc = json.loads(report.read_text())
    assert doc["suite"] == "all"
    assert all(set(c) == {"name", "pass", "detail"} for c in doc["checks"])


def test_verify_complete_suite_reports_forests(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "complete", "--N", "4..6", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    forest = [c for c in doc["checks"] if c["name"] == "spanning_forests"][0]
    assert forest["pass"] and "8" in forest["detail"]


def test_parse_theta_tokens():
    assert parse_theta("pi") == np.pi
    assert parse_theta("-pi") == -np.pi
    assert parse_theta("pi/2") == pytest.approx(np.pi / 2)
    assert parse_theta("2*pi/3") == pytest.approx(2 * np.pi / 3)
    assert parse_theta("-3pi/4") == pytest.approx(-3 * np.pi / 4)
    assert parse_theta("0.25") == 0.25
    assert parse_theta("theta_star", complete_graph(5, 2)) == pytest.approx(np.arccos(-1 / 4))
    assert parse_theta("-theta_star", complete_graph(5, 2)) == pytest.approx(-np.arccos(-1 / 4))
    for bad in ("nan", "inf", "pi/0", "x"):
        with pytest.raises(InputError):
            parse_theta(bad)
    with pytest.raises(InputError):
        parse_theta("theta_star")


def test_parse_thetas():
    np.testing.assert_allclose(parse_thetas("-pi:pi:5"), np.linspace(-np.pi, np.pi, 5))
    np.testing.assert_allclose(parse_thetas("0,pi/2"), [0, np.pi / 2])
    with pytest.raises(InputError):
        parse_thetas("0:1:x")


def test_parse_inflow():
    np.testing.assert_array_equal(parse_inflow(None, 3), [1, 0, 0])
    np.testing.assert_array_equal(parse_inflow("1,0", 2), [1, 0])
    np.testing.assert_array_equal(parse_inflow("1+2j,-1j", 2), [1 + 2j, -1j])
    np.testing.assert_array_equal(parse_inflow("1,2;0,-1", 2), [1 + 2j, -1j])
    with pytest.raises(InputError):
        parse_inflow("1,0", 3)
    with pytest.raises(InputError):
        parse_inflow("a,b", 2)


def test_parse_n_range():
    assert parse_n_range("4..6") == [4, 5, 6]
    assert parse_n_range("5") == [5]
    assert parse_n_range("4,7") == [4, 7]
    with pytest.raises(InputError):
        parse_n_range("6..4")
    with pytest.raises(InputError):
        parse_n_range("2..4")


@pytest.mark.skipif(shutil.which("gw") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["gw", "comfort", "--graph", "complete:4:2", "--theta", "pi"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert float(proc.stdout.splitlines()[1].split(",")[1]) == pytest.approx(5 / 12)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gwalk.cli", "stationary", "--graph", "nope:1", "--theta", "0"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 2

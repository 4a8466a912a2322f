import csv
import io
import json
import math

import numpy as np
import pytest

from revmap import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_profile_stdout(capsys):
    code, out, _ = run(capsys, "profile", "--k", "2", "--n", "181")
    assert code == 0
    table = rows(out)
    assert len(table) == 181 and list(table[0]) == ["w", "r", "z"]
    r = np.array([float(t["r"]) for t in table])
    assert int(np.argmax(r)) == 90 and r[90] == pytest.approx(2.0, abs=1e-15)


def test_profile_sidecar(tmp_path, capsys):
    out = tmp_path / "prof.csv"
    assert run(capsys, "profile", "--k", "0.5", "--output", str(out))[0] == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["topology"] == "sphere"
    assert meta["pole_report"]["left"] is True and meta["pole_report"]["right"] is True


def test_profile_from_file(tmp_path, capsys):
    w = np.linspace(0, math.pi, 101)
    src = tmp_path / "sphere.csv"
    src.write_text("w,r,z\n" + "\n".join(f"{a:.17g},{b:.17g},{c:.17g}" for a, b, c in zip(w, np.sin(w), 1 - np.cos(w))))
    code, out, _ = run(capsys, "profile", "--input", str(src), "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["kind"] == "tabulated" and doc["meta"]["topology"] == "sphere"


@pytest.mark.parametrize(
    "argv, message",
    [
        (["profile", "--k", "0"], "k must be positive"),
        (["profile"], "--k is required"),
        (["deform", "--k", "2", "--a", "0.1", "--closed-form"], "closed form requires k<1"),
        (["deform", "--k", "2"], "--a is required"),
        (["verify", "--k", "2", "--q", "-1"], "admissible q range is (-0.25, inf)"),
        (["verify", "--k", "2", "--q", "1", "--a", "1"], "not both"),
        (["sweep", "--k", "0.5", "--a-grid", ""], "empty grid"),
        (["sweep", "--k", "0.5"], "exactly one"),
        (["sweep", "--k", "0.5", "--a-grid", "1,x"], "comma-separated"),
    ],
)
def test_invalid_input_exits_2(capsys, argv, message):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert message in err


def test_bad_profile_file_exits_2(tmp_path, capsys):
    src = tmp_path / "bad.csv"
    src.write_text("x,r,z\n0,0,0\n")
    code, _, err = run(capsys, "profile", "--input", str(src))
    assert code == 2 and "header" in err
    code, _, err = run(capsys, "profile", "--input", str(tmp_path / "missing.csv"))
    assert code == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["nonsense"])
    assert exc.value.code == 2


def test_deform_closed_form_matches(capsys):
    code, out, _ = run(capsys, "deform", "--k", "0.8", "--a", "1", "--closed-form")
    closed = rows(out)
    code2, out2, _ = run(capsys, "deform", "--k", "0.8", "--a", "1")
    quad = rows(out2)
    assert code == code2 == 0
    diff = max(abs(float(a["z_hat"]) - float(b["z_hat"])) for a, b in zip(closed, quad))
    assert diff < 1e-9
    assert closed[-1]["slope"] == "inf"


def test_deform_circle(tmp_path, capsys):
    out = tmp_path / "mer.csv"
    assert run(capsys, "deform", "--k", "1", "--a", "5", "-o", str(out))[0] == 0
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["circle_invariant"] is True and meta["circle_deviation"] < 1e-10


@pytest.mark.parametrize("chart", ["r", "rhat"])
def test_metric_columns(capsys, chart):
    code, out, _ = run(capsys, "metric", "--k", "0.5", "--a", "1", "--chart", chart, "--n", "10")
    table = rows(out)
    assert code == 0 and len(table) == 10 and list(table[0]) == ["r", "g_rr", "g_ss"]
    assert all(float(t["g_rr"]) > 0 for t in table)


def test_geodesic_trace(capsys):
    code, out, _ = run(capsys, "geodesic", "--k", "2", "--a", "0.3", "--angle", "0.7", "--t-end", "3")
    table = rows(out)
    assert code == 0 and list(table[0]) == ["t", "w", "sigma", "w_dot", "sigma_dot", "clairaut"]
    c = np.array([float(t["clairaut"]) for t in table])
    assert np.max(np.abs(c - c[0])) < 1e-8
    assert float(table[-1]["t"]) == pytest.approx(3.0)


def test_verify_passes(capsys):
    code, out, _ = run(capsys, "verify", "--k", "2", "--q", "0.3", "--geodesics", "4", "--seed", "7")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] is True
    assert doc["residual_max"] < 1e-10 and doc["deviation_max"] < 1e-6
    assert doc["admissible_q"]["positive_definite"] == [pytest.approx(-0.25), "inf"]
    assert len(doc["geodesics"]) == 4


def test_verify_failure_exits_1(capsys, monkeypatch):
    monkeypatch.setattr(cli, "RESIDUAL_TOL", -1.0)
    code, out, _ = run(capsys, "verify", "--k", "2", "--q", "0.3", "--geodesics", "0")
    assert code == 1 and json.loads(out)["passed"] is False


def test_verify_deterministic_across_workers(capsys):
    args = ["verify", "--k", "2", "--a", "0.3", "--geodesics", "3", "--seed", "5"]
    _, first, _ = run(capsys, *args)
    _, again, _ = run(capsys, *args)
    _, threaded, _ = run(capsys, *args, "--workers", "3")
    assert first == again == threaded


def test_sweep_a_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--k", "0.5", "--a-grid", "1,10,100")
    table = rows(out)
    assert code == 0 and [float(t["a"]) for t in table] == [1, 10, 100]
    d = [float(t["distance_to_circle"]) for t in table]
    assert d[0] > d[1] > d[2]
    assert all(float(t["residual_max"]) < 1e-10 for t in table)


def test_sweep_q_grid(capsys):
    qs = ",".join(str(q) for q in np.linspace(-0.2, 3, 10))
    code, out, _ = run(capsys, "sweep", "--k", "2", f"--q-grid={qs}")
    table = rows(out)
    assert code == 0 and len(table) == 10
    assert all(float(t["residual_max"]) < 1e-10 for t in table)
    assert {t["signature"] for t in table} == {"positive-definite"}


def test_sweep_rejects_inadmissible_q(capsys):
    code, _, err = run(capsys, "sweep", "--k", "2", "--q-grid", "0.1,-0.5")
    assert code == 2 and "(-0.25, inf)" in err

import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from fucik import cli
from fucik import packing as pk
from fucik.errors import BudgetExceeded

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def square(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({"shapes": [{"type": "rectangle", "min": [0, 0], "max": [1, 1]}]}))
    return str(path)


@pytest.fixture
def ball(tmp_path):
    path = tmp_path / "ball.json"
    path.write_text(json.dumps({"shapes": [{"type": "ball", "center": [0, 0], "radius": 1}]}))
    return str(path)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_inradius(capsys, square):
    code, out, _ = run(capsys, "inradius", "--domain", square)
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == "fucik/1" and "tool_version" in data
    assert data["radius"] == pytest.approx(0.5)
    assert data["center"] == pytest.approx([0.5, 0.5])
    assert data["certified_gap"] >= 0


def test_curve_csv(capsys, ball):
    code, out, _ = run(capsys, "curve", "--domain", ball, "--t-min", "0.5", "--t-max", "2", "--samples", "3")
    assert code == 0
    assert "\r" not in out
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["t"]) for r in rows] == [0.5, 1.0, 2.0]
    assert float(rows[1]["alpha"]) == pytest.approx(2.0, rel=1e-9)


def _svg_counts(text):
    root = ET.fromstring(text)
    polylines = root.findall(f"{SVG_NS}polyline")
    trivial = [e for e in root.findall(f"{SVG_NS}line") if e.get("class") == "trivial"]
    return len(polylines), len(trivial)


def test_curve_svg_for_domain(capsys, tmp_path, square):
    svg = tmp_path / "c.svg"
    code, _, _ = run(capsys, "curve", "--domain", square, "--samples", "5", "--t-min", "0.25", "--t-max", "4", "--svg", str(svg))
    assert code == 0
    assert _svg_counts(svg.read_text()) == (1, 2)


def test_curve_interval_families(capsys, tmp_path):
    svg = tmp_path / "i.svg"
    code, out, _ = run(capsys, "curve", "--interval", "--k", "1..4", "--samples", "9", "--svg", str(svg))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    # k = 1, 3 give two branches each, k = 2, 4 one
    assert len(rows) == 6 * 9
    assert _svg_counts(svg.read_text()) == (6, 2)
    code, out, _ = run(capsys, "curve", "--interval", "--k", "2", "--p", "4,8", "--infinity", "--samples", "3", "--format", "svg")
    assert code == 0
    assert _svg_counts(out) == (3, 2)


def test_classify(capsys, ball):
    code, out, _ = run(capsys, "classify", "--domain", ball)
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "TypeI"
    assert data["schema"] == "fucik/1"


def test_classify_interval(capsys):
    code, out, _ = run(capsys, "classify", "--interval")
    assert code == 0
    assert json.loads(out)["kind"] == "TypeI"


def test_converge(capsys):
    code, out, _ = run(capsys, "converge", "--k", "2", "--s", "1.5", "--p", "8,32,128,512")
    assert code == 0
    report = json.loads(out)["reports"][0]
    assert report["monotone_tail"]
    code, out, _ = run(capsys, "converge", "--k", "1", "--p", "8,32", "--format", "csv")
    assert code == 0
    assert len(out.splitlines()) == 1 + 2 * 2


def test_profile(capsys):
    code, out, _ = run(capsys, "profile", "--ell", "0.3", "--samples", "11")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 11
    assert float(rows[3]["x"]) == pytest.approx(0.3)
    assert abs(float(rows[3]["u"])) < 1e-12
    code, out, _ = run(capsys, "profile", "--ell", "0.3", "--p", "6", "--format", "json", "--samples", "5")
    assert code == 0
    assert json.loads(out)["p"] == 6


def test_viscosity(capsys):
    code, out, _ = run(capsys, "viscosity", "--ell", "0.3")
    assert code == 0
    assert json.loads(out)["max_violation"] <= 1e-8
    code, out, _ = run(capsys, "viscosity", "--ell", "0.3", "--alpha", "5")
    assert json.loads(out)["max_violation"] > 1e-2


def test_out_file(capsys, tmp_path, ball):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "inradius", "--domain", ball, "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["radius"] == pytest.approx(1.0)


@pytest.mark.parametrize(
    "argv",
    [
        ["inradius"],
        ["inradius", "--domain", "{missing}"],
        ["inradius", "--domain", "{bad}"],
        ["inradius", "--domain", "{odd}"],
        ["inradius", "--domain", "{ball}", "--interval"],
        ["inradius", "--domain", "{ball}", "--tol", "-1"],
        ["curve", "--domain", "{ball}", "--t-min", "2", "--t-max", "1"],
        ["curve", "--domain", "{ball}", "--samples", "1"],
        ["curve", "--interval", "--k", "2", "--branch", "odd_plus"],
        ["curve", "--interval", "--k", "0"],
        ["converge", "--k", "1", "--p", "1"],
        ["converge", "--k", "1", "--p", "8,4"],
        ["profile", "--ell", "1.5"],
        ["viscosity", "--ell", "0.3", "--n", "8"],
        ["classify", "--domain", "{ball}", "--threads", "0"],
        ["frobnicate"],
    ],
)
def test_validation_errors_exit_2(capsys, tmp_path, ball, argv):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    odd = tmp_path / "odd.json"
    odd.write_text(json.dumps({"shapes": [{"type": "ball", "center": [0, 0], "radius": -1}]}))
    paths = {"missing": str(tmp_path / "nope.json"), "bad": str(bad), "odd": str(odd), "ball": ball}
    argv = [a.format(**paths) for a in argv]
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_budget_exceeded_exit_3(capsys, monkeypatch, square):
    def exhausted(*args, **kwargs):
        raise BudgetExceeded("cell budget exhausted")

    monkeypatch.setattr(pk, "inradius", exhausted)
    code, _, err = run(capsys, "inradius", "--domain", square)
    assert code == 3
    assert "budget" in err


def test_curve_with_too_many_failures_exit_3(capsys, monkeypatch, ball):
    real = pk.two_ball_rho

    def flaky(domain, t, tol=None, **kw):
        if t > 1:
            raise BudgetExceeded("out of budget")
        return real(domain, t, tol, **kw)

    monkeypatch.setattr(pk, "two_ball_rho", flaky)
    code, out, err = run(capsys, "curve", "--domain", ball, "--t-min", "0.5", "--t-max", "2", "--samples", "3")
    assert code == 3
    assert "warning" in err
    assert len(out.splitlines()) == 4


def test_outputs_are_byte_identical(tmp_path, square):
    outputs = []
    for n in range(2):
        csv_out, json_out = tmp_path / f"c{n}.csv", tmp_path / f"c{n}.json"
        for fmt, dest in (("csv", csv_out), ("json", json_out)):
            argv = ["curve", "--domain", square, "--samples", "5", "--t-min", "0.25", "--t-max", "4", "--seed", "7", "--format", fmt, "--out", str(dest)]
            assert cli.main(argv) == 0
        outputs.append((csv_out.read_bytes(), json_out.read_bytes()))
    assert outputs[0] == outputs[1]


def test_console_entry_point(ball):
    proc = subprocess.run(
        [sys.executable, "-m", "fucik.cli", "inradius", "--domain", ball], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["radius"] == pytest.approx(1.0)

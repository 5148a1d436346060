import json
import subprocess
import sys

import pytest

from _shared import M1, M2, P1, P2
from exact_mahler import parse_poly
from exact_mahler.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_info_round_trips_the_expression(capsys):
    code, out, _ = _run(capsys, "info", P2)
    assert code == 0
    d = json.loads(out)
    assert parse_poly(d["expression"]) == parse_poly(P2)
    assert d["tempered"] and d["corner_modulus"] == pytest.approx(1)


def test_mahler_json(capsys):
    code, out, _ = _run(capsys, "mahler", P1)
    assert code == 0
    d = json.loads(out)
    assert abs(d["m_numeric"] - M1) < 1e-10 and abs(d["m_formula"] - M1) < 1e-10


def test_mahler_method_numeric(capsys):
    code, out, _ = _run(capsys, "mahler", P2, "--method", "numeric")
    d = json.loads(out)
    assert code == 0 and d["m_formula"] is None and abs(d["m_numeric"] - M2) < 1e-10


def test_inequality_needs_assertion(capsys):
    _, out, _ = _run(capsys, "mahler", P2)
    assert "inequality_holds" not in json.loads(out)
    _, out, _ = _run(capsys, "mahler", P2, "--assert-irreducible")
    assert json.loads(out)["inequality_holds"] is True


def test_toric_csv_has_seven_rows(capsys):
    code, out, _ = _run(capsys, "toric", P2, "--out", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0].startswith("alpha,beta") and len(lines) == 8


def test_volume_plot_formats(capsys, tmp_path):
    code, out, _ = _run(capsys, "volume-plot", P1, "--format", "csv", "--samples", "64")
    assert code == 0 and out.splitlines()[0] == "branch,theta,V,log_abs_y"
    path = tmp_path / "v.svg"
    assert run(["volume-plot", P1, "--out", str(path)]) == 0
    assert path.read_text().startswith("<svg")


def test_amoeba_csv(capsys):
    code, out, _ = _run(capsys, "amoeba", P1, "--format", "csv", "--samples", "64")
    assert code == 0 and out.splitlines()[0] == "u,v,hit_count"


def test_exactness(capsys):
    code, out, _ = _run(capsys, "exactness", "X + Y - 3")
    assert code == 0 and json.loads(out)["verdict"] == "NotExact"


def test_dehn(capsys):
    code, out, _ = _run(capsys, "dehn", P1, "--pq", "1/10,1/20")
    d = json.loads(out)
    assert code == 0 and len(d["rows"]) == 2 and d["caveat"]


def test_scan(capsys):
    code, out, _ = _run(capsys, "scan", "X + X^-1 + Y + Y^-1", "--param-range", "4.5:5", "--steps", "1")
    d = json.loads(out)
    assert code == 0 and len(d["rows"]) == 2


def test_file_input(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text(P1 + "\n")
    code, out, _ = _run(capsys, "info", "--file", str(f))
    assert code == 0
    g = tmp_path / "p.json"
    g.write_text(parse_poly(P1).to_json())
    code, out2, _ = _run(capsys, "info", "--file", str(g))
    assert code == 0 and json.loads(out)["polynomial"] == json.loads(out2)["polynomial"]


@pytest.mark.parametrize(
    "argv",
    [
        ["mahler", "X +* Y"],
        ["mahler"],
        ["dehn", P1, "--pq", "2/4"],
        ["scan", P1, "--param-range", "1-2"],
        ["info", "--file", "/nonexistent/poly.txt"],
        ["info", P1, "--format", "csv"],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    code, _, err = _run(capsys, *argv)
    assert code == 2 and err.startswith("exact-mahler:")


def test_computational_failure_exits_1(capsys):
    code, _, err = _run(capsys, "mahler", "X - X")
    assert code == 1 and "ZeroPolynomial" in err
    code, _, err = _run(capsys, "mahler", "X + Y - 3", "--method", "formula")
    assert code == 1 and "CornerMismatch" in err


def test_output_is_deterministic(capsys):
    a = _run(capsys, "toric", P2)[1]
    b = _run(capsys, "toric", P2)[1]
    assert a == b


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "exact_mahler.cli", "info", P1], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["tempered"]
    res = subprocess.run([sys.executable, "-m", "exact_mahler.cli", "info", "X^"], capture_output=True, text=True)
    assert res.returncode == 2

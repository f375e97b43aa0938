import io
import json

import pytest

from halftrans import library
from halftrans.cli import run, to_json
from halftrans.io import save


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def ok(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    return json.loads(out)


@pytest.fixture
def lfile(tmp_path):
    path = tmp_path / "l.json"
    ok("pillowcase", "--h1", "1", "--h2", "1", "--q", "1/2", "--out", str(path))
    return str(path)


def test_pillowcase_then_decompose(tmp_path):
    path = str(tmp_path / "p.json")
    res = ok("pillowcase", "--h1", "1", "--h2", "1", "--q", "1", "--out", path)
    assert res["weights"] == ["1/2", "1/2"]
    dec = ok("decompose", path)
    assert len(dec["cylinders"]) == 2
    assert dec["weights"] == ["1/2", "1/2"]


def test_pillowcase_round_trip(lfile):
    res = ok("validate", lfile)
    assert res["valid"] and res["stratum"] == [-1, -1, -1, -1, -1, 1]


def test_validate_edge_mismatch(tmp_path):
    path = tmp_path / "bad.json"
    d = json.loads(open(ok_surface(tmp_path)).read())
    # a trapezoid: the bottom edge no longer matches the top one
    d["polygons"][0][1] = ["2", "0"]
    path.write_text(json.dumps(d))
    code, out, err = call("validate", str(path))
    assert code == 1 and out == ""
    assert json.loads(err)["code"] == "EdgeMismatch"


def ok_surface(tmp_path):
    path = str(tmp_path / "torus.json")
    save(library.flat_torus(), path)
    return path


def test_usage_errors(tmp_path):
    assert call()[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("validate", str(tmp_path / "missing.json"))[0] == 2
    assert call("pillowcase", "--h1", "x", "--h2", "1", "--q", "1")[0] == 2
    code, _, err = call("act", ok_surface(tmp_path))
    assert code == 2 and json.loads(err)["code"] == "UsageError"


def test_domain_error_exit_one(tmp_path):
    code, _, err = call("pillowcase", "--h1", "0", "--h2", "1", "--q", "1")
    assert code == 1 and json.loads(err)["code"] == "NonPositiveParameter"
    code, _, err = call("classify", ok_surface(tmp_path))
    assert code == 1 and json.loads(err)["code"] == "WrongStratum"
    code, _, err = call("act", ok_surface(tmp_path), "--matrix", "0,1,1,0")
    assert code == 1 and json.loads(err)["code"] == "NonPositiveDeterminant"


def test_act(lfile, tmp_path):
    out = str(tmp_path / "a.json")
    res = ok("act", lfile, "--matrix", "2,1,0,1", "--out", out)
    assert res["area"] == "6"
    assert ok("act", lfile, "--lambda", "1/3,2")["area"] == "6"
    assert ok("act", lfile, "--horocycle", "1/2")["area"] == "3"
    assert ok("validate", out)["stratum"] == [-1, -1, -1, -1, -1, 1]


def test_decompose_direction(tmp_path):
    path = str(tmp_path / "s.json")
    save(library.staircase_genus2(), path)
    assert len(ok("decompose", path, "--direction", "1/1")["cylinders"]) == 2
    assert len(ok("decompose", path, "--direction", "vertical")["cylinders"]) == 2
    res = ok("decompose", path, "--direction", "7/11", "--max-crossings", "3")
    assert res["undetermined"]
    assert call("decompose", path, "--direction", "1/0x")[0] == 2


def test_classify_and_to_l(lfile, tmp_path):
    assert ok("classify", lfile) == {"case": "Case2", "cylinders": 2}
    res = ok("to-L", lfile)
    assert res["q"] == "1/2" and res["mu"] == ["0", "0"]
    path = str(tmp_path / "one.json")
    save(library.one_cylinder_s05(), path)
    res = ok("classify", path)
    assert res["case"] == "Case1" and res["two_cylinder_direction"] == "vertical"


def test_cover(tmp_path):
    path = str(tmp_path / "pc.json")
    save(library.square_pillowcase(), path)
    res = ok("cover", path, "--branch", "0,1,2,3")
    assert res["genus"] == 1 and res["stratum"] == []
    code, _, err = call("cover", path, "--branch", "0,1,2")
    assert code == 1 and json.loads(err)["code"] == "InconsistentMonodromy"
    assert call("cover", path, "--branch", "a,b")[0] == 2


def test_flow_density(tmp_path):
    csv_path = tmp_path / "f.csv"
    res = ok("flow-density", "--weights", "1/3,2/3", "--eps", "0.05", "--r", "20", "--csv", str(csv_path))
    assert res["samples"] == 41 and 0 <= res["fraction"] <= 1
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "t,distance" and len(lines) == 42
    assert ok("flow-density", "--weights", "1/3,2/3", "--family", "linear", "--r", "20")["fraction"] == 1
    assert call("flow-density", "--weights", "1/2,1/3")[0] == 2


def test_sc_path(tmp_path):
    csv_path = tmp_path / "p.csv"
    res = ok("sc-path", "--q", "1", "--tmin", "1/10000", "--tmax", "1/100", "--per-decade", "3", "--csv", str(csv_path))
    assert res["samples"] == 7
    assert set(res["log_model"]) == {"c1", "c2", "residual"}
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "t,h1,h2,D" and len(rows) == 8


def test_render(lfile, tmp_path):
    svg = tmp_path / "l.svg"
    res = ok("render", lfile, "--svg", str(svg))
    text = svg.read_text()
    assert res["polygons"] == 2 and "<svg" in text and "</svg>" in text


def test_determinism(lfile, tmp_path):
    a = call("decompose", lfile)[1]
    b = call("decompose", lfile)[1]
    assert a == b
    p1, p2 = tmp_path / "1.csv", tmp_path / "2.csv"
    args = ["sc-path", "--q", "1/2", "--tmin", "1/10000", "--tmax", "1/100", "--per-decade", "2"]
    r1 = call(*args, "--csv", str(p1))[1]
    r2 = call(*args, "--csv", str(p2))[1]
    assert p1.read_bytes() == p2.read_bytes()
    assert r1.replace("1.csv", "") == r2.replace("2.csv", "")


def test_to_json_formats():
    from fractions import Fraction

    assert to_json({"b": Fraction(1, 3), "a": 0.1}) == to_json({"a": 0.1, "b": Fraction(1, 3)})
    assert '"1/3"' in to_json(Fraction(1, 3))
    assert "0.10000000000000001" in to_json(0.1)

import csv
import json
import math

import pytest

from symsphere.cli import dumps, run


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def ghz3(tmp_path):
    r = 1 / math.sqrt(2)
    return _write(tmp_path / "ghz3.json", {"n": 3, "dicke": [[r, 0], [0, 0], [0, 0], [r, 0]]})


@pytest.fixture
def ghz4(tmp_path):
    r = 1 / math.sqrt(2)
    return _write(tmp_path / "ghz4.json", {"n": 4, "dicke": [[r, 0], [0, 0], [0, 0], [0, 0], [r, 0]]})


@pytest.fixture
def tetra(tmp_path):
    return _write(tmp_path / "tetra.json",
                  {"n": 4, "dicke": [[math.sqrt(1 / 3), 0], [0, 0], [0, 0], [math.sqrt(2 / 3), 0], [0, 0]]})


def test_analyze_ghz(ghz3, capsys):
    assert run(["analyze", "--state", ghz3, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["e_g"] == pytest.approx(1.0, abs=1e-12)
    assert out["dc_class"] == [1, 1, 1]
    assert out["integral"] == pytest.approx(out["integral_expected"], rel=1e-10)


def test_analyze_human(ghz3, capsys):
    assert run(["analyze", "--state", ghz3]) == 0
    assert "E_g = 1.000000000000" in capsys.readouterr().out


def test_analyze_zero_state(tmp_path, capsys):
    f = _write(tmp_path / "z.json", {"n": 2, "dicke": [[0, 0], [0, 0], [0, 0]]})
    assert run(["analyze", "--state", f]) == 2
    assert "ZeroState" in capsys.readouterr().err


def test_analyze_missing_file(tmp_path):
    assert run(["analyze", "--state", str(tmp_path / "nope.json")]) == 2


def test_analyze_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["analyze", "--state", str(p)]) == 2


def test_equiv_inequivalent(ghz4, tetra, capsys):
    assert run(["equiv", "--a", ghz4, "--b", tetra]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "inequivalent"


def test_equiv_json_lu(ghz3, tmp_path, capsys):
    r = 1 / math.sqrt(2)
    other = _write(tmp_path / "g.json", {"n": 3, "dicke": [[r, 0], [0, 0], [0, 0], [0, r]]})
    assert run(["equiv", "--a", ghz3, "--b", other, "--relation", "lu", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["relation"] == "LU-equivalent" and out["witness"] is not None


def test_usage_errors(capsys):
    assert run([]) == 2
    assert run(["bogus"]) == 2
    assert run(["analyze"]) == 2
    assert run(["search", "--n", "4", "--family", "positive", "--restarts", "0"]) == 2
    assert run(["equiv", "--a", "x", "--b", "y", "--tol", "-1"]) == 2


def test_catalog_list_and_show(capsys):
    assert run(["catalog", "list"]) == 0
    names = capsys.readouterr().out.split()
    assert "icosahedron" in names
    assert run(["catalog", "show", "dicke", "--n", "4", "--k", "2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["e_g"] == pytest.approx(math.log2(8 / 3))
    assert run(["catalog", "show", "nothing"]) == 2
    assert run(["catalog", "show"]) == 2


def test_catalog_verify(capsys):
    assert run(["catalog", "show", "octahedron", "--verify"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and "PASS e_g" in out


def test_search_json_deterministic(capsys):
    argv = ["search", "--n", "4", "--family", "positive", "--restarts", "2", "--seed", "1", "--json"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert json.loads(first)["e_g"] == pytest.approx(math.log2(3), abs=1e-6)


def test_classical_json(capsys):
    assert run(["classical", "--problem", "thomson", "--n", "4", "--restarts", "3", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["thomson_energy"] == pytest.approx(3.674234614, abs=1e-8)
    assert out["e_g"] == pytest.approx(math.log2(3), abs=1e-8)
    assert len(out["points"]) == 4


def test_lmg(capsys):
    assert run(["lmg", "--spin", "3", "--h", "2", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["cpps"][0]["theta"] == pytest.approx(0.0, abs=1e-6)
    assert out["continuum_cpp_theta"] == 0.0
    assert run(["lmg", "--spin", "0.7", "--h", "1"]) == 2


def test_sample_csv(ghz3, tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert run(["sample", "--state", ghz3, "--function", "vol", "--resolution", "4x6", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["theta", "phi", "value"] and len(rows) == 25
    assert run(["sample", "--state", ghz3, "--resolution", "4by6", "--out", str(out)]) == 2


def test_threads_env(monkeypatch, ghz3):
    monkeypatch.setenv("SYMSPHERE_THREADS", "zero")
    assert run(["analyze", "--state", ghz3]) == 2
    monkeypatch.setenv("SYMSPHERE_THREADS", "2")
    assert run(["analyze", "--state", ghz3]) == 0


def test_dumps_seventeen_digits():
    text = dumps({"x": 0.1, "y": [1, 2.0], "z": float("inf"), "w": None, "b": True})
    obj = json.loads(text)
    assert obj["x"] == 0.1 and "0.10000000000000001" in text
    assert obj["y"] == [1, 2.0] and obj["z"] == "inf" and obj["w"] is None and obj["b"] is True


def test_state_roundtrip_through_json(ghz3, tmp_path, capsys):
    assert run(["analyze", "--state", ghz3, "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    again = _write(tmp_path / "again.json", out["state"])
    assert run(["analyze", "--state", again, "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["state"] == out["state"]

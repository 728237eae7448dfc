import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from spectralset import cli
from spectralset.verify import CheckReport


@pytest.fixture
def nil_json(tmp_path):
    p = tmp_path / "nil.json"
    p.write_text(json.dumps({"dim": 2, "re": [[0, 1], [0, 0]], "im": [[0, 0], [0, 0]]}))
    return p


def read_csv_points(text):
    rows = text.strip().splitlines()
    assert rows[0] == "theta,support,pt_re,pt_im"
    return np.array([complex(float(r.split(",")[2]), float(r.split(",")[3])) for r in rows[1:]])


def test_verify_clean(tmp_path):
    out = tmp_path / "run"
    assert cli.main(["verify", "--checks", "lemma2", "--trials", "5", "--seed", "7",
                     "--out", str(out)]) == 0
    rep = json.loads((out / "lemma2.json").read_text())
    assert rep["violations"] == 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[0].startswith("check,trials")
    assert summary[1].startswith("lemma2,5,0,0,")
    assert (out / "summary.svg").exists()
    man = json.loads((out / "manifest.json").read_text())
    assert set(man) == {"command", "config", "seed", "tool_version", "timestamp"}


def test_verify_usage_errors(capsys):
    assert cli.main(["verify", "--checks", "theorem", "--trials", "0"]) == 1
    assert cli.main(["verify", "--checks", "bogus"]) == 1
    assert "lemma1, lemma2, theorem, radius, sector, bs" in capsys.readouterr().err
    assert cli.main(["verify", "--trials", "abc"]) == 1
    assert cli.main([]) == 1


def test_verify_violation_exit_code(monkeypatch, capsys):
    fake = CheckReport("lemma2", 1, 1, -0.5, {})
    monkeypatch.setattr(cli, "run_check", lambda *a, **k: fake)
    assert cli.main(["verify", "--checks", "lemma2", "--trials", "1"]) == 2


def test_verify_outputs_reproducible(tmp_path):
    args = ["verify", "--checks", "bs,lemma1", "--trials", "3", "--seed", "2"]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    for name in ("summary.csv", "bs.json", "lemma1.json", "summary.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert cli.main(["replay", str(tmp_path / "a" / "manifest.json"),
                     "--out", str(tmp_path / "c")]) == 0
    assert (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "c" / "summary.csv").read_bytes()


def test_search_stdout_scalar(capsys):
    assert cli.main(["search", "--dim", "1", "--degree", "1", "--restarts", "1",
                     "--iters", "20", "--seed", "1"]) == 0
    res = json.loads(capsys.readouterr().out)
    assert res["best_ratio"] == pytest.approx(1.0, abs=1e-9)


def test_search_files(tmp_path):
    out = tmp_path / "s" / "result.json"
    assert cli.main(["search", "--dim", "2", "--degree", "1", "--restarts", "1",
                     "--iters", "30", "--seed", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["best_ratio"] >= 1.999
    assert (tmp_path / "s" / "result_history.csv").exists()
    assert (tmp_path / "s" / "result_history.svg").exists()
    assert (tmp_path / "s" / "result_manifest.json").exists()


def test_search_invalid(capsys):
    assert cli.main(["search", "--dim", "0"]) == 1
    assert cli.main(["search", "--degree", "40"]) == 1


def test_range_nilpotent(nil_json, capsys):
    assert cli.main(["range", "--matrix", str(nil_json), "--angles", "64"]) == 0
    pts = read_csv_points(capsys.readouterr().out)
    assert np.max(np.abs(np.abs(pts) - 0.5)) < 1e-8


def test_range_normal_hull(tmp_path, capsys):
    p = tmp_path / "d.json"
    p.write_text(json.dumps({"dim": 3, "re": [[1, 0, 0], [0, 0, 0], [0, 0, -1]],
                             "im": [[0, 0, 0], [0, 1, 0], [0, 0, 0]]}))
    assert cli.main(["range", "--matrix", str(p), "--angles", "64", "--out",
                     str(tmp_path / "w.csv")]) == 0
    pts = read_csv_points((tmp_path / "w.csv").read_text())
    assert {complex(np.round(z, 8)) for z in pts} == {1 + 0j, 1j, -1 + 0j}


def test_range_svg(nil_json, tmp_path, capsys):
    svg = tmp_path / "w.svg"
    assert cli.main(["range", "--matrix", str(nil_json), "--svg", str(svg)]) == 0
    root = ET.parse(svg).getroot()
    ids = {el.get("id") for el in root.iter() if el.get("id")}
    assert {"numrange", "domain", "spectrum"} <= ids

    f = tmp_path / "f.json"
    f.write_text(json.dumps({"numer": [[0.2, 0], [1, 0], [0, 0.3]]}))
    svg2 = tmp_path / "w2.svg"
    assert cli.main(["range", "--matrix", str(nil_json), "--svg", str(svg2),
                     "--function", str(f)]) == 0
    ids = {el.get("id") for el in ET.parse(svg2).getroot().iter() if el.get("id")}
    assert {"f_curve", "g_curve", "fbar_hull"} <= ids


def test_range_bad_matrix(tmp_path, capsys):
    assert cli.main(["range", "--matrix", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["range", "--matrix", str(bad)]) == 1


def test_threads_env(monkeypatch):
    monkeypatch.setenv(cli.THREADS_ENV, "3")
    args = cli.build_parser().parse_args(["verify"])
    assert cli._threads(args) == 3
    args = cli.build_parser().parse_args(["verify", "--threads", "2"])
    assert cli._threads(args) == 2

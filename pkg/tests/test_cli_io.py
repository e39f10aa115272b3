import json

import numpy as np
import pytest

from threecolor.cli import main
from threecolor.fileio import emit_svg, perturb_points, points_to_csv, read_colors, read_points_csv


@pytest.fixture
def pts_file(tmp_path):
    P = np.random.default_rng(0).random((40, 2)) * 0.4
    path = tmp_path / "pts.csv"
    path.write_text(points_to_csv(P))
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_csv_roundtrip(tmp_path):
    text = "x,y\n0.1,0.2\n-3.25,1e-05\n123456.789012,0.000123456789012\n"
    P = read_points_csv(text)
    assert P.shape == (3, 2)
    assert points_to_csv(P) == text.replace("1e-05", "0.00001")
    assert np.array_equal(read_points_csv(points_to_csv(P)), P)
    with pytest.raises(ValueError):
        read_points_csv("x,y\n1,2\nfoo,3\n")


def test_perturb(rng):
    P = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
    Q, meta = perturb_points(P, 1e-6, seed=3)
    assert meta["perturbation"] == 1e-6
    d = np.linalg.norm(Q[:3, None] - Q[None, :3], axis=2)
    assert d[np.triu_indices(3, 1)].min() >= 0.5e-6 - 1e-15
    assert np.abs(Q - P).max() <= 1e-6 + 1e-15
    R = rng.random((20, 2))
    R2, _ = perturb_points(R, 1e-9)
    assert np.abs(R2 - R).max() <= 1e-9
    assert np.array_equal(R2, perturb_points(R, 1e-9)[0])
    with pytest.raises(ValueError):
        perturb_points(P, 0.0)


def test_svg(tmp_path):
    doc = emit_svg([(0, 0), (1, 0), (0, 1)], [1, 2, 3], tmp_path / "a.svg")
    assert doc.count("<circle") == 3
    assert {"#d62728", "#2ca02c", "#1f77b4"} <= set(s.split('"')[0] for s in doc.split('fill="')[1:])
    assert (tmp_path / "a.svg").read_text() == doc
    empty = emit_svg(np.zeros((0, 2)))
    assert "<circle" not in empty and empty.rstrip().endswith("</svg>")
    gridded = emit_svg([(0, 0), (1, 1)], [1, 1], grid=0.25)
    assert gridded.count("<line") >= 8


def test_read_colors(tmp_path):
    for text in ("[1,2,3]", '{"colors":[1,2,3]}', "1 2\n3\n"):
        p = tmp_path / "c.txt"
        p.write_text(text)
        assert read_colors(p).tolist() == [1, 2, 3]


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--k", 3, "--l", 2)
    obj = json.loads(out)
    assert code == 0
    assert obj["epsilon"] == "1/5832" and obj["g"] == 48
    assert obj["delta"] == f"1/{64 * 3**16 * 48**2}"
    assert obj["delta_decimal"] == pytest.approx(1.575e-13, rel=1e-3)


def test_color_verify_cycle(capsys, tmp_path, pts_file):
    out_json = tmp_path / "out.json"
    svg = tmp_path / "out.svg"
    code, _, _ = run(capsys, "color", "--points", pts_file, "--out", out_json, "--svg", svg)
    assert code == 0
    res = json.loads(out_json.read_text())
    assert len(res["colors"]) == 40 and set(res["colors"]) <= {1, 2, 3}
    assert res["achieved_m_prime"] >= res["m_effective"]
    assert svg.read_text().count("<circle") == 40
    # the same run again gives identical bytes
    svg2 = tmp_path / "again.svg"
    run(capsys, "color", "--points", pts_file, "--out", tmp_path / "o2.json", "--svg", svg2)
    assert svg2.read_bytes() == svg.read_bytes()
    assert (tmp_path / "o2.json").read_text() == out_json.read_text()

    colors = tmp_path / "colors.json"
    colors.write_text(json.dumps(res["colors"]))
    code, out, _ = run(capsys, "verify", "--points", pts_file, "--colors", colors, "--m", res["achieved_m_prime"])
    assert code == 0 and json.loads(out)["ok"]
    colors.write_text(json.dumps([1] * 40))
    code, out, _ = run(capsys, "verify", "--points", pts_file, "--colors", colors, "--m", 2)
    assert code == 1 and json.loads(out)["violations"]


def test_color_cones(capsys, pts_file):
    code, out, _ = run(capsys, "color", "--points", pts_file, "--ranges", "cones")
    assert code == 0 and len(json.loads(out)["colors"]) == 40


def test_seed_env_override(capsys, pts_file, monkeypatch):
    _, a, _ = run(capsys, "gen-points", "--n", 5, "--seed", 1)
    monkeypatch.setenv("COLOR3_SEED", "1")
    _, b, _ = run(capsys, "gen-points", "--n", 5, "--seed", 99)
    assert a == b


def test_dominate(capsys, tmp_path, pts_file):
    code, out, _ = run(capsys, "dominate", "--points", pts_file, "--delta", 0.05)
    obj = json.loads(out)
    assert code == 0 and obj["ok"] and len(obj["S"]) == 3 and len(obj["S"][0]) == 2
    dg = tmp_path / "d.json"
    dg.write_text(json.dumps({"n": 3, "k": 1, "arcs": [[[0, 1], [1, 2], [0, 2]]]}))
    code, out, _ = run(capsys, "dominate", "--digraph", dg, "--l", 1, "--k", 1)
    assert code == 0 and json.loads(out)["ok"]
    code, _, err = run(capsys, "dominate", "--digraph", dg, "--k", 3)
    assert code == 2 and "arc classes" in err


def test_gen_hkl(capsys):
    code, out, _ = run(capsys, "gen-hkl", "--k", 2, "--l", 2, "--check")
    obj = json.loads(out)
    assert code == 0 and obj["n"] == 5 and obj["not_two_colorable"] is True


def test_gen_points_file(capsys, tmp_path):
    p = tmp_path / "g.csv"
    code, _, _ = run(capsys, "gen-points", "--n", 12, "--shape", "cluster", "--out", p)
    assert code == 0 and read_points_csv(p).shape == (12, 2)


def test_errors(capsys, tmp_path, pts_file):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "color", "--points", pts_file, "--body", bad)[0] == 2
    assert run(capsys, "verify", "--points", tmp_path / "missing.csv", "--colors", bad, "--m", 3)[0] == 2
    assert run(capsys, "color")[0] == 2
    assert run(capsys, "nonsense")[0] == 2
    colors = tmp_path / "short.json"
    colors.write_text("[1, 2]")
    code, _, err = run(capsys, "verify", "--points", pts_file, "--colors", colors, "--m", 3)
    assert code == 2 and "colors for" in err

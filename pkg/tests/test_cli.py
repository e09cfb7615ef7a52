import json

import pytest

from meshcert import cli
from meshcert.cli import run_cli
from meshcert.formats import parse_mesh, write_mesh
from conftest import fan_of_three, kite, overlapping_triple


@pytest.fixture
def meshes(tmp_path):
    paths = {}
    for name, d in [("good", fan_of_three()), ("kite", kite()), ("fig1", overlapping_triple())]:
        p = tmp_path / f"{name}.json"
        write_mesh(d, p)
        paths[name] = str(p)
    return paths


def run(capsys, *argv):
    code = run_cli(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_good(capsys, meshes):
    code, out, _ = run(capsys, "validate", meshes["good"])
    doc = json.loads(out)
    assert code == 0 and doc["validation"]["verdict"] == "Valid"
    assert doc["tool"] == "meshcert" and len(doc["input"]["sha256"]) == 64


def test_check_kite(capsys, meshes):
    code, out, err = run(capsys, "check", meshes["kite"])
    doc = json.loads(out)
    assert code == 2
    assert doc["delaunay"]["violating_edges"] == [[0, 1]]
    assert "non-Delaunay" in err


def test_validate_overlap(capsys, meshes):
    code, out, err = run(capsys, "validate", meshes["fig1"])
    assert code == 3
    assert json.loads(out)["validation"]["failure"]["kind"] == "overlap"
    assert "overlap" in err


def test_repair_writes_delaunay_mesh(capsys, meshes, tmp_path):
    dst = tmp_path / "fixed.json"
    code, out, _ = run(capsys, "repair", meshes["kite"], "-o", str(dst), "--hexfloat")
    assert code == 0
    assert json.loads(out)["repair"]["flips_performed"] == 1
    assert run(capsys, "check", str(dst))[0] == 0
    assert '"coordinate_encoding": "hexfloat"' in dst.read_text()


def test_repair_refuses_invalid(capsys, meshes, tmp_path):
    dst = tmp_path / "x.json"
    code, _, _ = run(capsys, "repair", meshes["fig1"], "-o", str(dst))
    assert code == 3 and not dst.exists()


def test_generate_then_check(capsys, tmp_path):
    dst = tmp_path / "g.node"
    assert run(capsys, "generate", "--dist", "cluster", "--n", "300", "--seed", "4", "-o", str(dst))[0] == 0
    assert (tmp_path / "g.ele").exists() and (tmp_path / "g.poly").exists()
    code, out, _ = run(capsys, "check", str(dst))
    assert code == 0 and json.loads(out)["delaunay"]["verdict"] == "AllDelaunay"


def test_oracle(capsys, meshes):
    assert run(capsys, "oracle", meshes["good"])[0] == 0
    assert run(capsys, "oracle", meshes["fig1"])[0] == 3
    code, _, err = run(capsys, "oracle", meshes["good"], "--max-nodes", "3")
    assert code == 4 and "--max-nodes" in err


def test_input_errors(capsys, tmp_path, meshes):
    assert run(capsys, "validate", str(tmp_path / "missing.json"))[0] == 4
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": [[0,0],[1,0],[0,1]],\n"triangles": [[0,1,7]], "boundary": [0,2,1]}')
    code, _, err = run(capsys, "validate", str(bad))
    assert code == 4 and "outside" in err
    assert run(capsys, "validate")[0] == 4
    assert run(capsys, "frobnicate", meshes["good"])[0] == 4
    assert run(capsys, "generate", "--dist", "uniform", "--n", "2", "-o", str(tmp_path / "x.json"))[0] == 4


def test_internal_defect_exit_code(capsys, meshes, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("simulated")

    monkeypatch.setattr(cli, "validate", boom)
    code, _, err = run(capsys, "validate", meshes["good"])
    assert code == 5 and "simulated" in err


def test_report_file_and_stats(capsys, meshes, tmp_path):
    rep = tmp_path / "r.json"
    code, out, err = run(capsys, "validate", meshes["good"], "--report", str(rep), "--stats")
    assert code == 0 and out == ""
    assert "OT" in err and "exact" in err
    assert json.loads(rep.read_text())["validation"]["verdict"] == "Valid"


def test_deterministic_reports(capsys, meshes):
    docs = []
    for _ in range(2):
        _, out, _ = run(capsys, "check", meshes["kite"])
        doc = json.loads(out)
        doc["validation"].pop("elapsed")
        docs.append(doc)
    assert docs[0] == docs[1]


def test_batch_mode(capsys, meshes):
    code, out, _ = run(capsys, "check", meshes["good"], meshes["kite"], meshes["fig1"], "--jobs", "2")
    doc = json.loads(out)
    assert code == 3
    assert [r["validation"]["verdict"] for r in doc["results"]] == ["Valid", "Valid", "Invalid"]


def test_normalize_orientation_flag(capsys, tmp_path):
    d = fan_of_three()
    cw = d.with_triangles([(a, c, b) for a, b, c in d.triangles])
    p = tmp_path / "cw.json"
    write_mesh(cw, p)
    assert run(capsys, "validate", str(p))[0] == 3
    assert run(capsys, "check", str(p), "--normalize-orientation")[0] == 0


def test_no_color(capsys, meshes, monkeypatch):
    monkeypatch.setattr(cli, "_use_color", lambda stream: True)
    _, _, err = run(capsys, "validate", meshes["fig1"])
    assert "\x1b[" in err
    monkeypatch.undo()
    monkeypatch.setenv("NO_COLOR", "1")

    class Tty:
        def isatty(self):
            return True

    assert not cli._use_color(Tty())


def test_triangle_format_flag(capsys, tmp_path):
    write_mesh(kite(), tmp_path / "k.node")
    code, _, _ = run(capsys, "check", str(tmp_path / "k.poly"), "--format", "triangle")
    assert code == 2
    d, _ = parse_mesh(tmp_path / "k.node")
    assert d == kite()

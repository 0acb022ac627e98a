import csv
import io
import json
import re

import pytest

from quadlab.batch import COLUMNS, run_batch
from quadlab.cli import main
from quadlab.disk_placement import largest_inscribed_disk
from quadlab.generators import PinchParams, pinch_family
from quadlab.internal_distance import geodesic_between_sides
from quadlab.render import Scene, plot_scene, render_svg

from conftest import RECT


def _scene(rect):
    d = largest_inscribed_disk(rect)
    return Scene.from_quad(rect, geodesics=[geodesic_between_sides(rect, "A").path], disks=[(d.center.x, d.center.y, d.radius)])


def test_svg_layers(rect):
    svg = render_svg(_scene(rect))
    assert re.findall(r'<g id="(\w+)"', svg) == ["polygon", "geodesics", "disks"]
    assert svg == render_svg(_scene(rect))


def test_svg_viewbox_padding(rect):
    svg = render_svg(Scene.from_quad(rect))
    vb = [float(v) for v in re.search(r'viewBox="([^"]+)"', svg).group(1).split()]
    assert vb == pytest.approx([-0.1, -0.1, 2.2, 1.2])


def test_svg_pinch_snapshot():
    Q, _ = pinch_family(PinchParams(t=1.0))
    svg = render_svg(Scene.from_quad(Q))
    pts = re.search(r'<polygon points="([^"]+)"', svg).group(1).split()
    assert len(pts) == 12
    assert svg.count("<polyline") == 4 and svg.count("<circle") == 4


def test_plot_scene(tmp_path, rect):
    out = tmp_path / "r.png"
    plot_scene(_scene(rect), out)
    assert out.stat().st_size > 1000


def test_batch_empty(tmp_path):
    rep = run_batch({}, tmp_path)
    assert rep.rows == [] and rep.ok
    assert (tmp_path / "report.csv").read_text().strip() == ",".join(COLUMNS)


def test_batch_isolation(tmp_path):
    cfg = {
        "figures": 2,
        "instances": [
            {"id": "good", "quad": {"vertices": RECT, "marks": [{"edge": k, "t": 0} for k in range(4)]}},
            {"id": "bad", "quad": {"vertices": [[0, 0], [1, 1], [1, 0], [0, 1]], "marks": []}},
            {"id": "r1", "generator": "random", "seed": 1},
        ],
    }
    rep = run_batch(cfg, tmp_path)
    status = {r["id"]: r["status"] for r in rep.rows}
    assert status == {"good": "pass", "bad": "error", "r1": "pass"}
    rows = list(csv.DictReader(io.StringIO((tmp_path / "report.csv").read_text())))
    assert len(rows) == 3
    assert (tmp_path / "figures" / "good.png").exists()
    assert json.loads((tmp_path / "report.json").read_text())["aggregates"]["errors"] == 1


def test_batch_deterministic(tmp_path):
    cfg = {"corpus": {"seeds": 3, "sizes": [[16, 60]]}, "figures": 0}
    a = run_batch(cfg).rows
    b = run_batch(cfg).rows
    strip = lambda rows: [{k: v for k, v in r.items() if k != "seconds"} for r in rows]
    assert strip(a) == strip(b)


def test_batch_from_k_rejects_small_pinch():
    rep = run_batch({"mode": "from_K", "K": 1.05, "instances": [{"id": "p", "generator": "pinch", "t": 0.0625}]})
    assert rep.rows[0]["status"] == "rejected"


@pytest.fixture
def rect_file(tmp_path):
    p = tmp_path / "rect.json"
    p.write_text(json.dumps({"vertices": RECT, "marks": [{"edge": k, "t": 0} for k in range(4)]}))
    return p


def test_cli_modulus(rect_file, capsys):
    assert main(["modulus", str(rect_file), "--h", "0.125", "--levels", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["M"] == pytest.approx(2.0)


def test_cli_input_flag_and_csv(rect_file, capsys):
    assert main(["distances", "--input", str(rect_file), "--format", "csv"]) == 0
    assert capsys.readouterr().out.splitlines() == ["pair,length", "A,1.0", "B,2.0"]


def test_cli_verify_exit_codes(rect_file, tmp_path, capsys):
    svg = tmp_path / "v.svg"
    assert main(["verify", str(rect_file), "--L", "2", "--svg", str(svg)]) == 0
    assert svg.read_text().startswith("<?xml")
    assert main(["verify", str(rect_file), "--K", "1.1"]) == 1


def test_cli_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["inscribe", str(bad)]) == 2
    bowtie = tmp_path / "bow.json"
    bowtie.write_text(json.dumps({"vertices": [[0, 0], [1, 1], [1, 0], [0, 1]], "marks": []}))
    assert main(["inscribe", str(bowtie)]) == 2
    assert main(["modulus", str(tmp_path / "missing.json"), "--h", "1"]) == 2


def test_cli_rectify_and_render(rect_file, tmp_path, capsys):
    svg = tmp_path / "r.svg"
    assert main(["rectify", str(rect_file), "--tau", "0.2", "--svg", str(svg)]) == 0
    assert '<g id="cells"' in svg.read_text() and '<g id="outline"' in svg.read_text()
    out = tmp_path / "q.svg"
    assert main(["render", str(rect_file), "--layers", "geodesics,disk", "-o", str(out)]) == 0
    assert '<g id="disks"' in out.read_text()


def test_cli_generate_and_pinch(capsys):
    assert main(["generate", "--seed", "5"]) == 0
    a = capsys.readouterr().out
    assert main(["generate", "--seed", "5"]) == 0
    assert capsys.readouterr().out == a
    assert main(["pinch", "--t", "0.5", "--check"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["meta"]["s_b"] == 0.5 and all(r["ok"] for r in d["window_check"])
    assert main(["pinch", "--t", "2"]) == 2


def test_cli_batch(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"corpus": {"seeds": 2}, "figures": 0}))
    assert main(["batch", str(cfg), "-d", str(tmp_path / "out"), "--format", "csv"]) == 0
    assert len(capsys.readouterr().out.strip().splitlines()) == 3

import json
import subprocess
import sys

import pytest

from medraw.cli import main


def run(argv, capsys):
    rc = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return rc, out, err


@pytest.fixture
def pipeline(tmp_path, capsys):
    g, l, t = tmp_path / "g.json", tmp_path / "l.json", tmp_path / "t.json"
    assert run(["generate", "--nodes", 50, "--m", 3, "--seed", 1, "-o", g], capsys)[0] == 0
    assert run(["layout", g, "--seed", 1, "--iterations", 200, "-o", l], capsys)[0] == 0
    assert run(["schedule", l, "--delta", 0.25, "-o", t], capsys)[0] == 0
    return g, l, t


def test_generate_then_stats(pipeline, capsys):
    g, _, _ = pipeline
    rc, out, _ = run(["stats", g], capsys)
    assert rc == 0
    assert json.loads(out) == {"nodes": 50, "edges": 144}


def test_schedule_defaults(pipeline):
    doc = json.loads(pipeline[2].read_bytes())
    assert doc["params"]["delta"] == 0.25 and doc["params"]["eta"] == 0.5
    assert doc["params"]["min_travel_s"] == 0.3
    assert doc["params"]["speed"] == pytest.approx(266.6, abs=0.01)


def test_verify_ok(pipeline, capsys):
    _, l, t = pipeline
    rc, out, _ = run(["verify", l, t, "--dt-ms", 1], capsys)
    assert rc == 0
    assert json.loads(out)["ok"] is True


def test_verify_failure_exit_code(pipeline, tmp_path, capsys):
    _, l, t = pipeline
    doc = json.loads(t.read_bytes())
    for tr in doc["tracks"]:
        tr["t_s"] = 0.0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    rc, out, _ = run(["verify", l, bad], capsys)
    assert rc == 2
    assert json.loads(out)["ok"] is False


def test_stats_with_timeline(pipeline, capsys):
    _, l, t = pipeline
    rc, out, _ = run(["stats", l, t], capsys)
    doc = json.loads(out)
    assert rc == 0
    assert doc["edges"] == 144
    assert sum(doc["group_sizes"]) == 144
    assert doc["groups"] == len(doc["group_makespans"])
    for grp in doc["group_makespans"]:
        assert grp["makespan_s"] <= grp["sequential_s"] + 1e-9
    assert set(doc["non_morphing_candidates"]) == {
        "singleton_group_edges",
        "only_inevitable_crossing_edges",
        "crossing_free_edges",
    }


@pytest.mark.parametrize("fmt", ["svg-animated", "svg-static-ped", "svg-static-ced"])
def test_render(pipeline, tmp_path, capsys, fmt):
    _, l, t = pipeline
    out = tmp_path / "x.svg"
    assert run(["render", l, t, "--format", fmt, "-o", out], capsys)[0] == 0
    svg = out.read_bytes()
    assert svg.startswith(b"<?xml")
    assert (b"<animate" in svg) == (fmt == "svg-animated")


def test_two_node_pipeline(tmp_path, capsys):
    g, l, t = tmp_path / "g.json", tmp_path / "l.json", tmp_path / "t.json"
    assert run(["generate", "--nodes", 2, "--m", 1, "--seed", 7, "-o", g], capsys)[0] == 0
    assert run(["layout", g, "-o", l], capsys)[0] == 0
    assert run(["schedule", l, "-o", t], capsys)[0] == 0
    doc = json.loads(t.read_bytes())
    assert len(doc["tracks"]) == 1 and doc["tracks"][0]["t_s"] == 0.0
    assert run(["verify", l, t], capsys)[0] == 0


def test_idempotent(tmp_path, capsys):
    outs = []
    for run_id in range(2):
        d = tmp_path / str(run_id)
        d.mkdir()
        run(["generate", "--seed", 5, "-o", d / "g.json"], capsys)
        run(["layout", d / "g.json", "--seed", 5, "--iterations", 100, "-o", d / "l.json"], capsys)
        run(["schedule", d / "l.json", "-o", d / "t.json"], capsys)
        run(["render", d / "l.json", d / "t.json", "-o", d / "a.svg"], capsys)
        outs.append([(d / f).read_bytes() for f in ("g.json", "l.json", "t.json", "a.svg")])
    assert outs[0] == outs[1]


def test_speed_options(pipeline, tmp_path, capsys):
    _, l, _ = pipeline
    t2 = tmp_path / "t2.json"
    run(["schedule", l, "--speed", 120, "--min-travel-ms", 0, "-o", t2], capsys)
    doc = json.loads(t2.read_bytes())
    assert doc["params"]["speed"] == 120.0
    assert all(tr["eff_speed"] == 120.0 for tr in doc["tracks"])


def test_config_file(pipeline, tmp_path, capsys):
    _, l, _ = pipeline
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"delta": 0.2, "eta": 0.45}))
    t3 = tmp_path / "t3.json"
    assert run(["schedule", l, "--config", cfg, "--eta", 0.4, "-o", t3], capsys)[0] == 0
    params = json.loads(t3.read_bytes())["params"]
    assert params["delta"] == 0.2 and params["eta"] == 0.4


@pytest.mark.parametrize(
    "argv, code, kind",
    [
        (["schedule", "missing.json"], 3, "io"),
        (["generate", "--nodes", 2, "--m", 3], 1, "validation"),
        (["generate", "--nodes", "x"], 1, "validation"),
        (["frobnicate"], 1, "validation"),
    ],
)
def test_errors_single_line(argv, code, kind, capsys):
    rc, _, err = run(argv, capsys)
    assert rc == code
    lines = err.strip().splitlines()
    assert len(lines) == 1
    assert lines[0].startswith(f"medraw: error code={kind} message=")


def test_invalid_layout_file(tmp_path, capsys):
    bad = tmp_path / "l.json"
    bad.write_text(json.dumps({"nodes": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 0, "y": 0}], "edges": [[0, 1]]}))
    rc, _, err = run(["schedule", bad], capsys)
    assert rc == 1 and "coincide" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "medraw.cli", "generate", "--nodes", "5", "--m", "1", "--seed", "3"],
        capture_output=True,
    )
    assert proc.returncode == 0
    assert len(json.loads(proc.stdout)["edges"]) == 4

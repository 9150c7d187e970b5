"""Command-line surface: outputs, manifests, determinism, exit codes."""

import json
import math
import os

import pytest

from gaplab.cli import cli_dispatch
from gaplab.runio import read_config


def run(capsys, *argv):
    code = cli_dispatch(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_gap_scan_reference(capsys):
    code, out = run(capsys, "gap-scan", "--n", "4", "--theta", "1")
    assert code == 0
    report = json.loads(out)
    assert report["min_gap"] == pytest.approx(0.25, rel=1e-8)
    assert report["min_s"] == pytest.approx(0.5, abs=1e-4)


def test_thresholds_reference(capsys):
    code, out = run(capsys, "thresholds", "--n", "100", "--c", "1.5")
    assert code == 0
    report = json.loads(out)
    assert report["theta_l"] == pytest.approx(
        50 - math.sqrt(100 * math.log(100) ** 1.5), rel=1e-12
    )


def test_escape_rate_keys(capsys):
    code, out = run(capsys, "escape-rate", "--n", "12", "--theta", "3")
    assert code == 0
    report = json.loads(out)
    assert set(report) == {
        "n", "theta", "beta", "beta_sq_exact", "paper_bound", "theta_l", "theta_h"
    }


def test_landscape_csv(tmp_path, capsys):
    out_dir = tmp_path / "land"
    code, _ = run(capsys, "landscape", "--n", "6", "--theta", "3", "--out", str(out_dir))
    assert code == 0
    lines = (out_dir / "landscape.csv").read_text().splitlines()
    assert lines[0] == "k,energy,degeneracy"
    assert lines[1] == "0,0,1"
    assert lines[3] == "2,2,15"
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["ended_at"] is not None
    assert "landscape.csv" in manifest["outputs"]


def test_evolve_outputs(tmp_path, capsys):
    out_dir = tmp_path / "evo"
    code, out = run(
        capsys, "evolve", "--n", "6", "--theta", "6", "--tau", "48",
        "--out", str(out_dir),
    )
    assert code == 0
    report = json.loads(out)
    assert report["final_overlap_alpha1"] >= 0.99
    assert report["success_probability"] == pytest.approx(
        report["final_overlap_alpha1"] ** 2, rel=1e-12
    )
    header = (out_dir / "trace.csv").read_text().splitlines()[0]
    assert header == "t,s,overlap_instantaneous_ground,norm"


def test_phase_diagram_range_parsing(tmp_path, capsys):
    out_dir = tmp_path / "pd"
    code, out = run(
        capsys, "phase-diagram", "--n", "8", "--theta", "1..3",
        "--grid", "41", "--refine", "4", "--out", str(out_dir),
    )
    assert code == 0
    report = json.loads(out)
    assert [row["theta"] for row in report["rows"]] == [1, 2, 3]
    lines = (out_dir / "phase_diagram.csv").read_text().splitlines()
    assert lines[0] == "theta,min_gap,min_s"
    assert len(lines) == 4


def test_verify_suite_byte_identical(tmp_path, capsys):
    out1, out2 = tmp_path / "v1", tmp_path / "v2"
    code1, text1 = run(capsys, "verify", "--suite", "combinatorics", "--seed", "7",
                       "--out", str(out1))
    code2, text2 = run(capsys, "verify", "--suite", "combinatorics", "--seed", "7",
                       "--out", str(out2))
    assert code1 == code2 == 0
    assert text1 == text2
    assert (out1 / "report.json").read_bytes() == (out2 / "report.json").read_bytes()


def test_verify_stdout_lines(capsys):
    code, out = run(capsys, "verify", "--suite", "combinatorics", "--seed", "7")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert lines and all(l.startswith("PASS") for l in lines)


def test_gap_closing_cli(capsys):
    code, out = run(capsys, "gap-closing", "--n", "12", "--grid", "801", "--refine", "7")
    assert code == 0
    report = json.loads(out)
    assert report["min_gap"] < 1e-3
    assert report["final_overlap"] >= 0.9


def test_theorem2_cli(capsys):
    code, out = run(
        capsys, "theorem2", "--n", "8", "--theta", "8", "--tau", "5",
        "--d", "3", "--gmax", "0.5",
    )
    assert code == 0
    report = json.loads(out)
    assert report["holds"]
    assert report["lhs"] <= report["bounds"]["lemma4"] + 1e-3


def test_config_file_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# scan defaults\nn = 4\ntheta = 1\ngrid = 51\n")
    code, out = run(capsys, "gap-scan", "--config", str(cfg))
    assert code == 0
    report = json.loads(out)
    assert report["n"] == 4 and report["grid"] == 51
    # explicit flags override the config
    code, out = run(capsys, "gap-scan", "--config", str(cfg), "--n", "6", "--theta", "6")
    report = json.loads(out)
    assert report["n"] == 6
    assert report["min_gap"] == pytest.approx(1 / math.sqrt(2), abs=1e-9)


def test_read_config_rejects_garbage(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("this is not a key value line\n")
    with pytest.raises(ValueError):
        read_config(str(bad))


def test_usage_errors_exit_two(capsys):
    assert cli_dispatch(["no-such-command"]) == 2
    capsys.readouterr()
    assert cli_dispatch(["gap-scan", "--n", "4"]) == 2  # missing --theta
    capsys.readouterr()
    assert cli_dispatch(["gap-scan", "--n", "4", "--theta", "9"]) == 2  # theta > n
    capsys.readouterr()
    assert cli_dispatch(["gap-scan", "--n", "4", "--theta", "1", "--bogus"]) == 2
    capsys.readouterr()


def test_manifest_written_before_outputs(tmp_path):
    """A run that fails after manifest creation leaves ended_at null."""
    out_dir = tmp_path / "crash"
    from gaplab.runio import RunManifest

    manifest = RunManifest(
        command="demo", params={}, seed=0, version="x", out_dir=str(out_dir)
    ).start()
    data = json.loads((out_dir / "manifest.json").read_text())
    assert data["ended_at"] is None
    manifest.finish({"ok": True})
    data = json.loads((out_dir / "manifest.json").read_text())
    assert data["ended_at"] is not None and data["summary"] == {"ok": True}

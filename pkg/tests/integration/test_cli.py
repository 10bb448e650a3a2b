# tests/integration/test_cli.py
from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from orchestrator.cli import main
from services.pgm import PgmImage, load_pgm, save_pgm


@pytest.fixture
def texture(tmp_path):
    rng = np.random.default_rng(11)
    img = PgmImage(12, 12, 255, rng.integers(0, 3, size=(12, 12)) * 127)
    return save_pgm(img, tmp_path / "texture.pgm")


def _synth(texture, out, *extra):
    return main(
        [
            "synthesize",
            "--input",
            str(texture),
            "--output",
            str(out),
            "--w",
            "2",
            "--rng-seed",
            "5",
            "--out-width",
            "16",
            "--out-height",
            "14",
            *extra,
        ]
    )


def test_synthesize_is_reproducible(texture, tmp_path, capsys):
    assert _synth(texture, tmp_path / "a.pgm", "--report", str(tmp_path / "a.json")) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["ok"] is True
    assert summary["report"]["pixels"] == 16 * 14 - 9
    assert _synth(texture, tmp_path / "b.pgm", "--report", str(tmp_path / "b.json")) == 0
    assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    out = load_pgm(tmp_path / "a.pgm")
    assert (out.width, out.height, out.maxval) == (16, 14, 255)
    # every output level is one of the observed levels
    assert set(np.unique(out.levels)) <= {0, 127, 254}


def test_synthesize_uniform_ascii(texture, tmp_path):
    out = tmp_path / "u.pgm"
    assert _synth(texture, out, "--weights", "uniform", "--epsilon", "0", "--ascii") == 0
    assert out.read_bytes().startswith(b"P2\n16 14\n255\n")


def test_seed_changes_output(texture, tmp_path):
    assert _synth(texture, tmp_path / "a.pgm") == 0
    argv = ["synthesize", "--input", str(texture), "--output", str(tmp_path / "c.pgm")]
    argv += ["--w", "2", "--rng-seed", "6", "--out-width", "16", "--out-height", "14"]
    assert main(argv) == 0
    a = load_pgm(tmp_path / "a.pgm").levels
    c = load_pgm(tmp_path / "c.pgm").levels
    assert not np.array_equal(a, c)


def test_missing_input_is_a_runtime_error(tmp_path, capsys):
    code = main(["synthesize", "--input", str(tmp_path / "gone.pgm"), "--output", "o", "--w", "2"])
    assert code == 1
    assert "gone.pgm" in capsys.readouterr().err


def test_malformed_input_reports_offset(tmp_path, capsys):
    bad = tmp_path / "bad.pgm"
    bad.write_bytes(b"P5\n2 2\n255\n\x00\x01")
    code = main(["synthesize", "--input", str(bad), "--output", str(tmp_path / "o"), "--w", "2"])
    assert code == 1
    assert "pgm parse error at byte" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["synthesize", "--input", "x.pgm", "--output", "y.pgm", "--w", "1"],
        ["synthesize", "--input", "x.pgm", "--output", "y.pgm"],
        ["synthesize", "--input", "x.pgm", "--output", "y.pgm", "--w", "2", "--b", "0"],
        ["synthesize", "--input", "x.pgm", "--output", "y.pgm", "--w", "2", "--scheme", "hex"],
        ["consistency", "--sizes", "0"],
        ["teleport"],
    ],
)
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_bad_maxval_is_usage_error(texture, tmp_path):
    assert _synth(texture, tmp_path / "m.pgm", "--maxval", "70000") == 2


def test_seed_larger_than_output_is_usage_error(texture, tmp_path):
    assert _synth(texture, tmp_path / "s.pgm", "--seed-side", "20") == 2


def test_consistency_writes_reports(tmp_path):
    csv_path, json_path = tmp_path / "c.csv", tmp_path / "c.json"
    argv = ["consistency", "--spec", "copy-left", "--sizes", "8", "12", "--replicates", "2"]
    argv += ["--out-side", "8", "--csv", str(csv_path), "--json", str(json_path)]
    assert main(argv) == 0

    rows = list(csv.DictReader(csv_path.read_text().splitlines()))
    assert {r["statistic"] for r in rows} == {"sup_distance", "noise_floor"}
    assert len(rows) == 2 * 2 * 2
    assert {r["scheme"] for r in rows} == {"corner"}
    summary = json.loads(json_path.read_text())
    assert [s["T"] for s in summary["sizes"]] == [8, 12]
    assert all(0.0 <= s["median_sup_distance"] <= 1.0 for s in summary["sizes"])


def test_sweep_writes_json(texture, tmp_path):
    path = tmp_path / "sweep.json"
    argv = ["sweep", "--input", str(texture), "--w", "2", "--scheme", "corner"]
    assert main([*argv, "--bandwidths", "0.01", "10", "--json", str(path)]) == 0
    rows = json.loads(path.read_text())
    assert [r["b"] for r in rows] == [0.01, 10.0]
    # a huge bandwidth spreads weight over more candidates
    assert rows[1]["mean_effective_candidates"] >= rows[0]["mean_effective_candidates"]

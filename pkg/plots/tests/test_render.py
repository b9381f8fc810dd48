import json
import shutil
from pathlib import Path

import pytest

from frictionplots import FigureSpec, SchemaError, render
from frictionplots.cli import main

DATA = Path(__file__).parent / "data"

CASES = [
    ("mixing-hist", DATA / "mixing" / "report.json"),
    ("ks-trend", DATA / "converge" / "report.json"),
    ("scale-overlay", DATA / "scale.csv"),
]


@pytest.mark.parametrize("kind,report", CASES, ids=[c[0] for c in CASES])
def test_render_all_kinds(kind, report, tmp_path):
    out = tmp_path / f"{kind}.png"
    res = render(FigureSpec(report=str(report), kind=kind, out=str(out)))
    assert res == out and out.exists()
    assert out.stat().st_size > 5_000
    assert out.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


@pytest.mark.parametrize("kind,report", CASES, ids=[c[0] for c in CASES])
def test_render_is_pixel_stable(kind, report, tmp_path):
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(FigureSpec(report=str(report), kind=kind, out=str(a)))
    render(FigureSpec(report=str(report), kind=kind, out=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError):
        FigureSpec(report="x", kind="pie", out=str(tmp_path / "x.png"))


def test_missing_report(tmp_path):
    with pytest.raises(SchemaError, match="not found"):
        render(FigureSpec(report=str(tmp_path / "nope.json"), kind="ks-trend",
                          out=str(tmp_path / "x.png")))


def test_kind_mismatch_names_expected_kind(tmp_path):
    with pytest.raises(SchemaError, match="mixing_uniformity"):
        render(FigureSpec(report=str(DATA / "converge" / "report.json"),
                          kind="mixing-hist", out=str(tmp_path / "x.png")))


def test_missing_column_named(tmp_path):
    workdir = tmp_path / "mixing"
    shutil.copytree(DATA / "mixing", workdir)
    samples = workdir / "samples.csv"
    lines = samples.read_text().splitlines()
    lines[0] = lines[0].replace("theta_exit", "angle")
    samples.write_text("\n".join(lines) + "\n")
    with pytest.raises(SchemaError, match="theta_exit"):
        render(FigureSpec(report=str(workdir / "report.json"),
                          kind="mixing-hist", out=str(tmp_path / "x.png")))


def test_scale_overlay_requires_u0(tmp_path):
    trimmed = tmp_path / "scale.csv"
    rows = (DATA / "scale.csv").read_text().splitlines()
    out = [",".join(r.split(",")[:3]) for r in rows]
    trimmed.write_text("\n".join(out) + "\n")
    with pytest.raises(SchemaError, match="u_0"):
        render(FigureSpec(report=str(trimmed), kind="scale-overlay",
                          out=str(tmp_path / "x.png")))


def test_cli_render_and_exit_codes(tmp_path, capsys):
    out = tmp_path / "fig.png"
    rc = main(["render", "--report", str(DATA / "converge" / "report.json"),
               "--kind", "ks-trend", "--out", str(out)])
    assert rc == 0 and out.exists()
    rc = main(["render", "--report", str(DATA / "converge" / "report.json"),
               "--kind", "mixing-hist", "--out", str(tmp_path / "y.png")])
    assert rc == 1
    assert "schema error" in capsys.readouterr().err

"""Render figures from frictionlab report files.

The renderer consumes only the documented output files of the experiment
runner (``report.json`` + ``samples.csv``) and the scale-table CSV dump; it
never recomputes statistics.  Rendering is deterministic: fixed styling
constants, the Agg backend, and stripped image metadata make repeated runs
byte-identical for identical inputs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["STYLE_VERSION", "FIGURE_KINDS", "FigureSpec", "SchemaError", "render"]

STYLE_VERSION = "1"
FIGURE_KINDS = ("mixing-hist", "ks-trend", "scale-overlay")

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 10,
    "svg.hashsalt": "frictionplots",
}


class SchemaError(ValueError):
    """Input file does not match the documented report schema."""


@dataclass(frozen=True)
class FigureSpec:
    """Description of one figure to render.

    ``report`` points at a ``report.json`` (mixing-hist, ks-trend) or a
    scale CSV (scale-overlay); ``kind`` picks the figure; ``out`` is the
    image file to write (the extension selects the format).
    """

    report: str
    kind: str
    out: str
    title: str = ""
    bins: int = 16

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; choices: {FIGURE_KINDS}")


def _load_report(path: Path) -> dict:
    if not path.exists():
        raise SchemaError(f"report file not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"report is not valid JSON: {exc}") from exc


def _load_samples(report_path: Path) -> dict[str, np.ndarray]:
    csv_path = report_path.with_name("samples.csv")
    if not csv_path.exists():
        raise SchemaError(f"samples file not found next to the report: {csv_path}")
    with open(csv_path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise SchemaError("samples.csv is empty")
        cols: dict[str, list] = {name: [] for name in header}
        for row in reader:
            for name, tok in zip(header, row):
                if tok:
                    cols[name].append(float(tok))
    return {k: np.asarray(v) for k, v in cols.items()}


def _require(cols: dict, name: str, where: str):
    if name not in cols:
        raise SchemaError(f"missing column {name!r} in {where}")
    return cols[name]


def _mixing_hist(spec: FigureSpec, ax):
    path = Path(spec.report)
    report = _load_report(path)
    if report.get("kind") != "mixing_uniformity":
        raise SchemaError(
            f"mixing-hist needs a mixing_uniformity report, got kind={report.get('kind')!r}")
    theta = _require(_load_samples(path), "theta_exit", "samples.csv")
    n = len(theta)
    counts, edges = np.histogram(theta, bins=spec.bins, range=(0.0, 2 * math.pi))
    centers = 0.5 * (edges[:-1] + edges[1:])
    ax.bar(centers, counts / n, width=edges[1] - edges[0], align="center",
           color="#4878a8", edgecolor="white", label="exit angles")
    ax.axhline(1.0 / spec.bins, color="#c44e52", lw=1.5, label="uniform 1/bins")
    ax.set_xlabel("exit angle")
    ax.set_ylabel("frequency")
    ax.set_xlim(0.0, 2 * math.pi)
    pv = report.get("estimates", {}).get("chi_square_pvalue")
    ax.set_title(spec.title or
                 f"Exit-angle histogram (chi-square p = {pv:.3g})" if pv is not None
                 else "Exit-angle histogram")
    ax.legend(loc="lower center")


def _ks_trend(spec: FigureSpec, ax):
    report = _load_report(Path(spec.report))
    if report.get("kind") != "eps_convergence":
        raise SchemaError(
            f"ks-trend needs an eps_convergence report, got kind={report.get('kind')!r}")
    estimates = report.get("estimates", {})
    pairs = []
    for key, val in estimates.items():
        if key.startswith("ks[") and "->" in key:
            target = float(key[key.index("->") + 2:-1])
            pairs.append((target, float(val)))
    if not pairs:
        raise SchemaError("missing column 'ks[...]' entries in report estimates")
    pairs.sort(reverse=True)
    eps = [p[0] for p in pairs]
    ks = [p[1] for p in pairs]
    ax.plot(eps, ks, "o-", color="#4878a8")
    ax.set_xscale("log")
    ax.invert_xaxis()
    ax.set_xlabel("eps (consecutive-pair target)")
    ax.set_ylabel("two-sample KS statistic")
    ax.set_title(spec.title or "Weak-convergence trend: KS between consecutive eps")


def _scale_overlay(spec: FigureSpec, ax):
    path = Path(spec.report)
    if not path.exists():
        raise SchemaError(f"scale table not found: {path}")
    with open(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        rows = [list(map(float, r)) for r in reader if r]
    if not header:
        raise SchemaError("scale table is empty")
    cols = {name: np.asarray([r[i] for r in rows]) for i, name in enumerate(header)}
    q = _require(cols, "q", str(path))
    u_eps = _require(cols, "u_eps", str(path))
    u_0 = _require(cols, "u_0", str(path))
    ax.plot(q, u_0, color="#c44e52", lw=1.6, label="u (eps = 0)")
    ax.plot(q, u_eps, color="#4878a8", lw=1.6, label="u_eps")
    ax.axvspan(-1.0, 1.0, color="#cccccc", alpha=0.4, label="flat stretch")
    ax.set_xlabel("q")
    ax.set_ylabel("scale value")
    ax.set_title(spec.title or "Scale functions: constant stretch vs regularized slope")
    ax.legend(loc="upper left")


_BUILDERS = {
    "mixing-hist": _mixing_hist,
    "ks-trend": _ks_trend,
    "scale-overlay": _scale_overlay,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; returns the written path.

    Raises :class:`SchemaError` when the input does not match the
    documented schema (naming the missing column or kind).
    """
    out = Path(spec.out)
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        try:
            _BUILDERS[spec.kind](spec, ax)
            fig.tight_layout()
            # strip mutable metadata so identical inputs give identical bytes
            meta = {"Software": f"frictionplots/{STYLE_VERSION}"}
            if out.suffix.lower() == ".svg":
                fig.savefig(out, metadata={"Date": None})
            else:
                fig.savefig(out, metadata=meta)
        finally:
            plt.close(fig)
    return out

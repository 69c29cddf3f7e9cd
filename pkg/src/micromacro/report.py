"""Output writers: CSV tables, JSON summaries, minimal SVG plots, run manifests."""
import csv
from datetime import datetime, timezone
import html
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1

CSV_SCHEMAS = {
    "distribution": ["p", "q", "probability"],
    "scan": ["phi_A", "n_pp", "n_pm", "n_mp", "n_mm", "n_inconclusive", "n_total"],
    "sweep": ["threshold", "p", "p_err", "V2", "V2_err", "V3", "V3_err", "S", "S_err"],
}


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def write_csv(path: Path, schema: str, rows) -> Path:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        w.writerow(CSV_SCHEMAS[schema])
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Path, payload: dict) -> Path:
    body = {"schema_version": SCHEMA_VERSION, **payload}
    with open(path, "w") as fh:
        json.dump(_jsonable(body), fh, indent=2, sort_keys=False)
        fh.write("\n")
    return path


class Manifest:
    """Tracks what a command wrote so the run can be audited and repeated."""

    def __init__(self, command: str, config: dict, seed):
        from . import __version__

        self.data = {
            "command": command,
            "code_version": __version__,
            "seed": seed,
            "config": config,
            "csv_schema_version": SCHEMA_VERSION,
            "started": datetime.now(timezone.utc).isoformat(),
            "outputs": [],
        }

    def add(self, path: Path):
        self.data["outputs"].append(Path(path).name)
        return path

    def write(self, out_dir: Path) -> Path:
        self.data["finished"] = datetime.now(timezone.utc).isoformat()
        self.data["outputs"].append("manifest.json")
        return write_json(Path(out_dir) / "manifest.json", self.data)


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------

_W, _H, _M = 640, 420, 60
_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"]


def _scale(lo, hi, a, b):
    span = (hi - lo) or 1.0
    return lambda v: a + (v - lo) * (b - a) / span


def line_plot_svg(path: Path, x, series: dict, xlabel: str, ylabel: str, title: str = "") -> Path:
    """Markers joined by lines, one colour per named series."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    y_all = np.concatenate(list(ys.values()))
    ymin, ymax = 0.0, float(np.nanmax(y_all)) if y_all.size else 1.0
    sx = _scale(float(x.min()), float(x.max()), _M, _W - _M / 2)
    sy = _scale(ymin, ymax * 1.05 or 1.0, _H - _M, _M / 2)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<line x1="{_M}" y1="{_H - _M}" x2="{_W - _M / 2}" y2="{_H - _M}" stroke="black"/>',
           f'<line x1="{_M}" y1="{_H - _M}" x2="{_M}" y2="{_M / 2}" stroke="black"/>',
           f'<text x="{_W / 2}" y="{_H - 15}" text-anchor="middle">{html.escape(xlabel)}</text>',
           f'<text x="15" y="{_H / 2}" transform="rotate(-90 15 {_H / 2})" text-anchor="middle">{html.escape(ylabel)}</text>']
    if title:
        out.append(f'<text x="{_W / 2}" y="20" text-anchor="middle">{html.escape(title)}</text>')
    for t in np.linspace(ymin, ymax, 5):
        out.append(f'<text x="{_M - 5}" y="{sy(t) + 4:.1f}" text-anchor="end">{t:.3g}</text>')
    for t in np.linspace(x.min(), x.max(), 5):
        out.append(f'<text x="{sx(t):.1f}" y="{_H - _M + 16}" text-anchor="middle">{t:.3g}</text>')
    for n, (name, y) in enumerate(ys.items()):
        c = _COLORS[n % len(_COLORS)]
        pts = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(x, y))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{c}"/>')
        out += [f'<circle cx="{sx(a):.1f}" cy="{sy(b):.1f}" r="3" fill="{c}"/>' for a, b in zip(x, y)]
        out.append(f'<text x="{_W - _M}" y="{_M / 2 + 15 * (n + 1)}" fill="{c}" text-anchor="end">{html.escape(name)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out))
    return Path(path)


def heatmap_svg(path: Path, grid: np.ndarray, xlabel: str = "q", ylabel: str = "p",
                title: str = "") -> Path:
    """log10-shaded grid; grid[p, q] drawn with p upward, zero cells left white."""
    grid = np.asarray(grid, dtype=float)
    n_p, n_q = grid.shape
    cell = max(1.0, min((_W - 1.5 * _M) / n_q, (_H - 1.5 * _M) / n_p))
    pos = grid[grid > 0]
    lo = np.log10(pos.min()) if pos.size else 0.0
    hi = np.log10(pos.max()) if pos.size else 1.0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" font-family="sans-serif" font-size="12">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if title:
        out.append(f'<text x="{_W / 2}" y="20" text-anchor="middle">{html.escape(title)}</text>')
    base_y = _M / 2 + n_p * cell
    for p in range(n_p):
        for q in range(n_q):
            v = grid[p, q]
            if v <= 0:
                continue
            s = (np.log10(v) - lo) / ((hi - lo) or 1.0)
            shade = int(255 * (1.0 - s))
            out.append(f'<rect x="{_M + q * cell:.2f}" y="{base_y - (p + 1) * cell:.2f}" '
                       f'width="{cell:.2f}" height="{cell:.2f}" fill="rgb({shade},{shade},255)"/>')
    out.append(f'<text x="{_M + n_q * cell / 2:.1f}" y="{base_y + 20:.1f}" text-anchor="middle">{html.escape(xlabel)}</text>')
    out.append(f'<text x="{_M - 20}" y="{_M / 2 + n_p * cell / 2:.1f}" text-anchor="middle">{html.escape(ylabel)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out))
    return Path(path)

"""File outputs: snapshot CSVs, diagnostics/comparison JSON, and minimal
hand-rolled SVG line plots (no plotting dependency).

CSV: comma-separated, header row, 17 significant digits; identical configs
produce bit-identical files.  JSON: UTF-8, stable key order.  Wall-clock
timings go only to run_meta.json so data files stay reproducible.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import WaveField

__all__ = ["write_field_csv", "write_diagnostics_json",
           "write_comparison_json", "write_run_meta", "svg_line_plot",
           "snapshot_filename"]

_FMT = "%.17g"


def snapshot_filename(run_id: str, t: float) -> str:
    return f"{run_id}_t{t:g}.csv"


def write_field_csv(field: WaveField, path):
    rows = np.column_stack([field.grid.z, field.samples.real,
                            field.samples.imag, field.abs2()])
    np.savetxt(path, rows, delimiter=",", header="z,re,im,abs2",
               comments="", fmt=_FMT)


def _json_dump(obj, path):
    Path(path).write_text(json.dumps(obj, indent=1, allow_nan=True) + "\n",
                          encoding="utf-8")


def write_diagnostics_json(times, reports, path):
    _json_dump({"snapshots": [dict(t=t, **r.to_json_dict())
                              for t, r in zip(times, reports)]}, path)


def write_comparison_json(entries, path):
    _json_dump({"comparisons": entries}, path)


def write_run_meta(meta: dict, path):
    _json_dump(meta, path)


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
_W, _H = 880, 520
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = np.ceil(lo / step) * step
    return np.arange(first, hi + 0.5 * step, step)


def _decimate(x, y, limit=1600):
    if len(x) <= limit:
        return x, y
    stride = int(np.ceil(len(x) / limit))
    return x[::stride], y[::stride]


def svg_line_plot(path, title: str, xlabel: str, ylabel: str, series):
    """series: iterable of (label, x, y) triples; y is clipped to the range
    of the first (reference) series so a wild overlay cannot flatten it."""
    series = [(lab, np.asarray(x, float), np.asarray(y, float))
              for lab, x, y in series]
    x_lo = min(s[1].min() for s in series)
    x_hi = max(s[1].max() for s in series)
    ref_y = series[0][2]
    y_lo = 0.0 if ref_y.min() >= 0.0 else float(ref_y.min()) * 1.05
    y_hi = float(ref_y.max()) * 1.15
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
           f'height="{_H}" viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>',
           f'<text x="{_W / 2:.0f}" y="24" text-anchor="middle" '
           f'font-size="15" font-family="sans-serif">{title}</text>']
    # axes box
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
               f'height="{_H - _MT - _MB}" fill="none" stroke="#333"/>')
    for tx in _ticks(x_lo, x_hi):
        out.append(f'<line x1="{sx(tx):.1f}" y1="{_H - _MB}" '
                   f'x2="{sx(tx):.1f}" y2="{_H - _MB + 5}" stroke="#333"/>')
        out.append(f'<text x="{sx(tx):.1f}" y="{_H - _MB + 18}" '
                   f'text-anchor="middle" font-size="11" '
                   f'font-family="sans-serif">{tx:g}</text>')
    for ty in _ticks(y_lo, y_hi):
        out.append(f'<line x1="{_ML - 5}" y1="{sy(ty):.1f}" x2="{_ML}" '
                   f'y2="{sy(ty):.1f}" stroke="#333"/>')
        out.append(f'<text x="{_ML - 8}" y="{sy(ty) + 4:.1f}" '
                   f'text-anchor="end" font-size="11" '
                   f'font-family="sans-serif">{ty:g}</text>')
    out.append(f'<text x="{_W / 2:.0f}" y="{_H - 12}" text-anchor="middle" '
               f'font-size="13" font-family="sans-serif">{xlabel}</text>')
    out.append(f'<text x="18" y="{_H / 2:.0f}" text-anchor="middle" '
               f'font-size="13" font-family="sans-serif" '
               f'transform="rotate(-90 18 {_H / 2:.0f})">{ylabel}</text>')
    for i, (label, x, y) in enumerate(series):
        xs, ys = _decimate(x, np.clip(y, y_lo, y_hi))
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(xs, ys))
        color = _PALETTE[i % len(_PALETTE)]
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.3"/>')
        ly = _MT + 16 + 16 * i
        out.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" '
                   f'x2="{_W - _MR - 120}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="2"/>')
        out.append(f'<text x="{_W - _MR - 114}" y="{ly + 4}" font-size="11" '
                   f'font-family="sans-serif">{label}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out), encoding="utf-8")

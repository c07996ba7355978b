"""Standalone SVG rendering of benchmark results.

Three panels side by side: mean distance to the optimum against sample size
(one line per method), the distance distribution and the Hamming distance
distribution at the largest sample size.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .bench import BenchResultRow, read_rows

PANEL_W, PANEL_H = 360, 260
MARGIN = 44
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _text(x, y, s, size=11, anchor="middle", **extra) -> str:
    attrs = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in extra.items())
    return f'<text x="{x:.1f}" y="{y:.1f}" font-size="{size}" text-anchor="{anchor}"{attrs}>{escape(str(s))}</text>'


class _Panel:
    def __init__(self, index: int, title: str, xlabel: str, ylabel: str):
        self.x0 = index * (PANEL_W + 20) + MARGIN
        self.y0 = 30
        self.w = PANEL_W - MARGIN - 10
        self.h = PANEL_H - 70
        self.parts = [
            _text(self.x0 + self.w / 2, 18, title, 13, font_weight="bold"),
            f'<line x1="{self.x0}" y1="{self.y0 + self.h}" x2="{self.x0 + self.w}" y2="{self.y0 + self.h}" stroke="black"/>',
            f'<line x1="{self.x0}" y1="{self.y0}" x2="{self.x0}" y2="{self.y0 + self.h}" stroke="black"/>',
            _text(self.x0 + self.w / 2, self.y0 + self.h + 34, xlabel),
            _text(self.x0 - 32, self.y0 + self.h / 2, ylabel,
                  transform=f"rotate(-90 {self.x0 - 32} {self.y0 + self.h / 2})"),
        ]

    def sx(self, v, lo, hi):
        return self.x0 + (0.5 if hi == lo else (v - lo) / (hi - lo)) * self.w

    def sy(self, v, lo, hi):
        return self.y0 + self.h - (0.5 if hi == lo else (v - lo) / (hi - lo)) * self.h

    def ticks(self, xs: Sequence[float], xlo, xhi, ylo, yhi):
        for v in xs:
            self.parts.append(_text(self.sx(v, xlo, xhi), self.y0 + self.h + 14, f"{v:g}", 9))
        for v in np.linspace(ylo, yhi, 5):
            self.parts.append(_text(self.x0 - 4, self.sy(v, ylo, yhi) + 3, f"{v:.3g}", 9, anchor="end"))

    def no_data(self):
        self.parts.append(_text(self.x0 + self.w / 2, self.y0 + self.h / 2, "no data", 14, fill="#888"))


def _line_panel(rows: list[BenchResultRow], methods: list[str]) -> _Panel:
    panel = _Panel(0, "Mean distance to optimum", "samples n", "f_opt - f_hat")
    if not rows:
        panel.no_data()
        return panel
    ns = sorted({r.n_samples for r in rows})
    series = {}
    for m in methods:
        pts = []
        for n in ns:
            d = [r.distance for r in rows if r.method == m and r.n_samples == n]
            if d:
                pts.append((n, float(np.mean(d))))
        series[m] = pts
    ymax = max((y for pts in series.values() for _, y in pts), default=1.0) or 1.0
    xlo, xhi = ns[0], ns[-1]
    panel.ticks(ns, xlo, xhi, 0.0, ymax)
    for i, m in enumerate(methods):
        colour = PALETTE[i % len(PALETTE)]
        coords = [(panel.sx(x, xlo, xhi), panel.sy(y, 0.0, ymax)) for x, y in series[m]]
        if len(coords) > 1:
            path = " ".join(f"{x:.1f},{y:.1f}" for x, y in coords)
            panel.parts.append(f'<polyline points="{path}" fill="none" stroke="{colour}" stroke-width="2"/>')
        for x, y in coords:
            panel.parts.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="3" fill="{colour}"/>')
        panel.parts.append(f'<rect x="{panel.x0 + panel.w - 70}" y="{panel.y0 + 4 + 14 * i}" width="10" height="10" fill="{colour}"/>')
        panel.parts.append(_text(panel.x0 + panel.w - 56, panel.y0 + 13 + 14 * i, m, 10, anchor="start"))
    return panel


def _hist_panel(index: int, title: str, xlabel: str, rows: list[BenchResultRow],
                methods: list[str], edges: np.ndarray, value) -> _Panel:
    panel = _Panel(index, title, xlabel, "fraction of trials")
    if not rows:
        panel.no_data()
        return panel
    bins = len(edges) - 1
    fracs = {}
    for m in methods:
        vals = [value(r) for r in rows if r.method == m]
        hist, _ = np.histogram(np.clip(vals, edges[0], edges[-1]), bins=edges)
        fracs[m] = hist / max(len(vals), 1)
    ymax = max(float(f.max()) for f in fracs.values()) or 1.0
    panel.ticks([edges[0], edges[-1]], edges[0], edges[-1], 0.0, ymax)
    slot = panel.w / bins
    bar = slot / (len(methods) + 1)
    for i, m in enumerate(methods):
        colour = PALETTE[i % len(PALETTE)]
        for b, f in enumerate(fracs[m]):
            x = panel.x0 + b * slot + i * bar + bar / 2
            y = panel.sy(f, 0.0, ymax)
            panel.parts.append(
                f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar:.1f}" height="{panel.y0 + panel.h - y:.1f}" fill="{colour}"/>')
    return panel


def render_svg(rows: Sequence[BenchResultRow]) -> str:
    rows = list(rows)
    methods = sorted({r.method for r in rows})
    top = [r for r in rows if r.n_samples == max(x.n_samples for x in rows)] if rows else []
    f_opt = max((r.f_opt for r in rows), default=1.0) or 1.0
    n_bits = max((r.hamming_dist for r in rows), default=0)
    panels = [
        _line_panel(rows, methods),
        _hist_panel(1, "Distance distribution", "f_opt - f_hat", top, methods,
                    np.linspace(0.0, f_opt, 11), lambda r: r.distance),
        _hist_panel(2, "Hamming distance", "bits from optimum", top, methods,
                    np.arange(-0.5, n_bits + 1.5), lambda r: r.hamming_dist),
    ]
    width = 3 * (PANEL_W + 20) + MARGIN
    body = "\n".join(p for panel in panels for p in panel.parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL_H}" '
        f'viewBox="0 0 {width} {PANEL_H}" font-family="sans-serif">\n'
        f'<rect width="100%" height="100%" fill="white"/>\n{body}\n</svg>\n'
    )


def plot(csv_path: str | Path, out_svg: str | Path) -> None:
    Path(out_svg).write_text(render_svg(read_rows(csv_path)))

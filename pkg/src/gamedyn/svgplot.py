"""Dependency-free SVG line plots over sweep aggregates.

One polyline per algorithm against the correlation grid, with a shaded
uncertainty band: exact binomial bounds for proportion metrics, mean plus
and minus two standard errors for continuous ones.  Output is plain SVG
1.1 text, byte-deterministic for fixed input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .experiment import AggregateRow

PROPORTION_METRICS = ("p_ne", "p_two_cycle")
CONTINUOUS_METRICS = ("mean_steps", "mean_wall", "terminal_payoff",
                      "traj_payoff")
METRICS = PROPORTION_METRICS + CONTINUOUS_METRICS

_COLORS = {"SBRD": "#1f77b4", "INDD": "#2ca02c", "SPGD": "#d62728"}
_FALLBACK_COLOR = "#7f7f7f"

WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 78, 24, 42, 58
LOG_DECADE_THRESHOLD = 3.0


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: a metric over the grid, one series per algorithm."""

    csv_path: str
    metric: str
    out_path: str
    series: Optional[tuple[str, ...]] = None
    x_label: str = "correlation"
    y_label: Optional[str] = None
    title: Optional[str] = None

    def __post_init__(self):
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}; have "
                             f"{METRICS}")


def _metric_triple(row: AggregateRow, metric: str):
    """(value, band_lo, band_hi) for one aggregate row, None if absent."""
    if metric == "p_ne":
        iv = row.p_ne
        return iv.point, iv.lo, iv.hi
    if metric == "p_two_cycle":
        iv = row.p_two_cycle
        return iv.point, iv.lo, iv.hi
    if metric == "mean_steps":
        st = row.mean_steps
    elif metric == "mean_wall":
        st = row.mean_wall
    elif metric == "terminal_payoff":
        st = row.mean_terminal_payoff
    else:
        st = row.mean_traj_payoff
    if st is None:
        return None
    return st.mean, st.mean - 2.0 * st.se, st.mean + 2.0 * st.se


def _collect_series(spec: PlotSpec, aggregates: Sequence[AggregateRow]):
    present = []
    for row in aggregates:
        if row.algorithm not in present:
            present.append(row.algorithm)
    wanted = list(spec.series) if spec.series else sorted(present)
    series = {}
    for algo in wanted:
        pts = []
        for row in aggregates:
            if row.algorithm != algo:
                continue
            triple = _metric_triple(row, spec.metric)
            if triple is not None:
                pts.append((row.lam, *triple))
        if not pts:
            raise ValueError(
                f"metric {spec.metric!r} has no data for series {algo!r}")
        pts.sort(key=lambda p: p[0])
        series[algo] = pts
    return series


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 else t)
        t += step
    return ticks


def _fmt_tick(v: float) -> str:
    if v != 0 and (abs(v) >= 1e5 or abs(v) < 1e-3):
        return format(v, ".0e").replace("e+0", "e").replace("e-0", "e-")
    return format(round(v, 10), "g")


def _fc(v: float) -> str:
    # fixed two-decimal coordinates keep the output byte-stable
    return format(v, ".2f")


def render_line_plot(spec: PlotSpec,
                     aggregates: Sequence[AggregateRow]) -> str:
    """Standalone SVG document for the metric across the grid."""
    series = _collect_series(spec, aggregates)

    values = [v for pts in series.values() for (_, v, _, _) in pts]
    band_lo = [lo for pts in series.values() for (_, _, lo, _) in pts]
    band_hi = [hi for pts in series.values() for (_, _, _, hi) in pts]
    xs = [x for pts in series.values() for (x, _, _, _) in pts]

    positive = [v for v in values if v > 0]
    log_y = (len(positive) == len(values) and len(positive) > 0
             and max(positive) / min(positive)
             > 10.0 ** LOG_DECADE_THRESHOLD)

    if log_y:
        ylo = math.floor(math.log10(min(positive)))
        yhi = math.ceil(math.log10(max(max(band_hi), max(positive))))
        if yhi == ylo:
            yhi += 1
        yticks = list(range(int(ylo), int(yhi) + 1))

        def ty(v: float) -> float:
            v = max(v, 10.0 ** ylo)
            return (math.log10(v) - ylo) / (yhi - ylo)
    else:
        lo = min(min(band_lo), min(values))
        hi = max(max(band_hi), max(values))
        if spec.metric in PROPORTION_METRICS:
            lo, hi = max(0.0, min(lo, 0.0)), min(1.0, max(hi, 1.0))
        if hi <= lo:
            hi = lo + 1.0
        pad = 0.0 if spec.metric in PROPORTION_METRICS else 0.05 * (hi - lo)
        ylo, yhi = lo - pad, hi + pad
        yticks = _nice_ticks(ylo, yhi)

        def ty(v: float) -> float:
            return (v - ylo) / (yhi - ylo)

    xlo, xhi = min(xs), max(xs)
    if xhi <= xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    xticks = _nice_ticks(xlo, xhi)

    iw = WIDTH - MARGIN_L - MARGIN_R
    ih = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - xlo) / (xhi - xlo) * iw

    def py(v: float) -> float:
        return MARGIN_T + (1.0 - ty(v)) * ih

    parts = ['<?xml version="1.0" encoding="UTF-8"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'width="{WIDTH}" height="{HEIGHT}" '
             f'viewBox="0 0 {WIDTH} {HEIGHT}">',
             f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>']

    # gridlines and tick labels
    for t in xticks:
        if t < xlo - 1e-12 or t > xhi + 1e-12:
            continue
        x = px(t)
        parts.append(f'<line x1="{_fc(x)}" y1="{MARGIN_T}" x2="{_fc(x)}" '
                     f'y2="{HEIGHT - MARGIN_B}" stroke="#dddddd" '
                     f'stroke-width="1"/>')
        parts.append(f'<text x="{_fc(x)}" y="{HEIGHT - MARGIN_B + 18}" '
                     f'font-family="sans-serif" font-size="12" '
                     f'text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in yticks:
        v = 10.0 ** t if log_y else t
        y = py(v)
        if y < MARGIN_T - 1e-9 or y > HEIGHT - MARGIN_B + 1e-9:
            continue
        label = f"1e{t}" if log_y else _fmt_tick(t)
        parts.append(f'<line x1="{MARGIN_L}" y1="{_fc(y)}" '
                     f'x2="{WIDTH - MARGIN_R}" y2="{_fc(y)}" '
                     f'stroke="#dddddd" stroke-width="1"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{_fc(y + 4)}" '
                     f'font-family="sans-serif" font-size="12" '
                     f'text-anchor="end">{label}</text>')

    # axes frame
    parts.append(f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{iw}" '
                 f'height="{ih}" fill="none" stroke="#333333" '
                 f'stroke-width="1"/>')

    for algo, pts in series.items():
        color = _COLORS.get(algo, _FALLBACK_COLOR)
        if len(pts) > 1:
            upper = " ".join(f"{_fc(px(x))},{_fc(py(hi))}"
                             for (x, _, _, hi) in pts)
            lower = " ".join(f"{_fc(px(x))},{_fc(py(lo))}"
                             for (x, _, lo, _) in reversed(pts))
            parts.append(f'<polygon points="{upper} {lower}" fill="{color}" '
                         f'fill-opacity="0.18" stroke="none"/>')
        line = " ".join(f"{_fc(px(x))},{_fc(py(v))}" for (x, v, _, _) in pts)
        if len(pts) > 1:
            parts.append(f'<polyline points="{line}" fill="none" '
                         f'stroke="{color}" stroke-width="2"/>')
        for (x, v, lo, hi) in pts:
            parts.append(f'<circle cx="{_fc(px(x))}" cy="{_fc(py(v))}" '
                         f'r="3" fill="{color}"/>')
            if len(pts) == 1 and (hi > v or v > lo):
                parts.append(f'<line x1="{_fc(px(x))}" y1="{_fc(py(lo))}" '
                             f'x2="{_fc(px(x))}" y2="{_fc(py(hi))}" '
                             f'stroke="{color}" stroke-width="2"/>')

    # legend, top-right corner of the frame
    lx = WIDTH - MARGIN_R - 150
    ly = MARGIN_T + 16
    for k, algo in enumerate(series):
        color = _COLORS.get(algo, _FALLBACK_COLOR)
        y = ly + 18 * k
        parts.append(f'<line x1="{lx}" y1="{y - 4}" x2="{lx + 26}" '
                     f'y2="{y - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 32}" y="{y}" '
                     f'font-family="sans-serif" font-size="12">{algo}</text>')

    parts.append(f'<text x="{MARGIN_L + iw / 2:.0f}" y="{HEIGHT - 14}" '
                 f'font-family="sans-serif" font-size="13" '
                 f'text-anchor="middle">{spec.x_label}</text>')
    ylab = spec.y_label or spec.metric
    parts.append(f'<text x="20" y="{MARGIN_T + ih / 2:.0f}" '
                 f'font-family="sans-serif" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 20 '
                 f'{MARGIN_T + ih / 2:.0f})">{ylab}</text>')
    if spec.title:
        parts.append(f'<text x="{WIDTH / 2:.0f}" y="24" '
                     f'font-family="sans-serif" font-size="15" '
                     f'text-anchor="middle">{spec.title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

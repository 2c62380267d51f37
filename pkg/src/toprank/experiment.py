"""Experiment orchestration: replicated runs, averaging, CSV/SVG emission."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .adversaries import AdversaryConfig, generate_stream
from .ftpl import RefusedMeasure, full_info_run
from .measures import MeasureSpec
from .rtop1f import run_episode
from .traces import RegretTrace, average_traces, write_trace_csv

LEARNERS = ("rtop1f", "ftpl")


@dataclass(frozen=True)
class ExperimentConfig:
    measure: MeasureSpec
    learner: str
    adversary: AdversaryConfig
    runs: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.learner not in LEARNERS:
            raise ValueError(f"unknown learner {self.learner!r}; choose from {LEARNERS}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def run_experiment(
    config: ExperimentConfig, out_path=None, svg_path=None
) -> RegretTrace:
    """Generate the stream once, run the replicates, average pointwise.

    The stream is fixed by the adversary config before any learner runs;
    replicate r uses seed ``config.seed + r`` for its own randomization.
    Writes the averaged trace as CSV (and optionally a normalized-regret
    chart as SVG) when paths are given.
    """
    measure = config.measure
    if measure.normalized:
        raise RefusedMeasure(
            f"{measure.label}: no online algorithm has sublinear regret for "
            "normalized ranking measures under top-1 feedback"
        )
    stream = generate_stream(config.adversary)
    T = config.adversary.T
    traces = []
    for replicate in range(config.runs):
        seed = config.seed + replicate
        if config.learner == "rtop1f":
            traces.append(run_episode(measure, stream, T, seed))
        else:
            traces.append(full_info_run(measure, stream, np.random.default_rng(seed)))
    averaged = average_traces(traces)
    if out_path is not None:
        write_trace_csv(out_path, averaged)
    if svg_path is not None:
        rounds = averaged.rounds
        mask = averaged.norm_regret > 0
        # Log axes need positive values; fall back to linear when regret
        # never rises above zero.
        log = bool(mask.any())
        xs = rounds[mask] if log else rounds
        ys = averaged.norm_regret[mask] if log else averaged.norm_regret
        render_line_svg(
            svg_path,
            {f"{config.learner} {measure.label}": (xs, ys)},
            log_x=log,
            log_y=log,
            title=f"time-normalized regret, {measure.label}, m={config.adversary.m}",
            x_label="round",
            y_label="regret / t",
        )
    return averaged


# --- minimal SVG line charts (keeps the harness free of plotting deps) ---

_PALETTE = ("#1f6fb2", "#d0603d", "#3d9970", "#8463b0", "#b08900")


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        lo_d, hi_d = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0**d for d in range(lo_d, hi_d + 1)]
    step = 10 ** math.floor(math.log10(hi - lo or 1.0))
    while (hi - lo) / step > 8:
        step *= 2
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi:
        out.append(v)
        v += step
    return out


def render_line_svg(
    path,
    series: dict[str, tuple[np.ndarray, np.ndarray]],
    log_x: bool = False,
    log_y: bool = False,
    title: str = "",
    x_label: str = "",
    y_label: str = "",
    width: int = 720,
    height: int = 460,
) -> None:
    """Write a self-contained SVG line chart for one or more (x, y) series."""
    margin_l, margin_r, margin_t, margin_b = 70, 20, 36, 48
    plot_w, plot_h = width - margin_l - margin_r, height - margin_t - margin_b

    xs_all = np.concatenate([np.asarray(x, dtype=np.float64) for x, _ in series.values()])
    ys_all = np.concatenate([np.asarray(y, dtype=np.float64) for _, y in series.values()])
    if log_x:
        xs_all = xs_all[xs_all > 0]
    if log_y:
        ys_all = ys_all[ys_all > 0]
    if xs_all.size == 0 or ys_all.size == 0:
        raise ValueError("nothing plottable")
    x_lo, x_hi = float(xs_all.min()), float(xs_all.max())
    y_lo, y_hi = float(ys_all.min()), float(ys_all.max())
    if x_lo == x_hi:
        x_hi = x_lo + 1
    if y_lo == y_hi:
        y_hi = y_lo + 1

    def sx(v):
        if log_x:
            frac = (math.log10(v) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo))
        else:
            frac = (v - x_lo) / (x_hi - x_lo)
        return margin_l + frac * plot_w

    def sy(v):
        if log_y:
            frac = (math.log10(v) - math.log10(y_lo)) / (math.log10(y_hi) - math.log10(y_lo))
        else:
            frac = (v - y_lo) / (y_hi - y_lo)
        return margin_t + (1.0 - frac) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<rect x="{margin_l}" y="{margin_t}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333"/>',
    ]
    for tick in _ticks(x_lo, x_hi, log_x):
        if not x_lo <= tick <= x_hi:
            continue
        px = sx(tick)
        parts.append(f'<line x1="{px:.1f}" y1="{margin_t + plot_h}" x2="{px:.1f}" '
                     f'y2="{margin_t + plot_h + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px:.1f}" y="{margin_t + plot_h + 18}" '
                     f'text-anchor="middle">{tick:g}</text>')
    for tick in _ticks(y_lo, y_hi, log_y):
        if not y_lo <= tick <= y_hi:
            continue
        py = sy(tick)
        parts.append(f'<line x1="{margin_l - 5}" y1="{py:.1f}" x2="{margin_l}" '
                     f'y2="{py:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{margin_l - 8}" y="{py + 4:.1f}" text-anchor="end">{tick:g}</text>')
    if x_label:
        parts.append(f'<text x="{margin_l + plot_w / 2:.1f}" y="{height - 10}" '
                     f'text-anchor="middle">{x_label}</text>')
    if y_label:
        parts.append(f'<text x="16" y="{margin_t + plot_h / 2:.1f}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {margin_t + plot_h / 2:.1f})">{y_label}</text>')

    for idx, (label, (xs, ys)) in enumerate(series.items()):
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        keep = np.isfinite(xs) & np.isfinite(ys)
        if log_x:
            keep &= xs > 0
        if log_y:
            keep &= ys > 0
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs[keep], ys[keep]))
        color = _PALETTE[idx % len(_PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{margin_l + 8}" y="{margin_t + 16 + 16 * idx}" '
                     f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))

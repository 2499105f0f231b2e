"""CSV records and hand-written SVG line charts for benchmark sweeps."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import InvalidParameterError
from .harness import Summary, TrialRecord

CSV_FIELDS = ("T", "trial", "algorithm", "seed", "E0", "Ef", "runtime_s", "inefficiency")
MISSING = "NA"

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf")

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 160, 40, 50


def emit_csv(records, path) -> None:
    records = list(records)
    if not records:
        raise InvalidParameterError("no records to write")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_FIELDS)
        for r in records:
            ineff = MISSING if r.inefficiency is None else repr(float(r.inefficiency))
            row = [r.T, r.trial, r.algorithm, r.seed] + [repr(float(v)) for v in (r.E0, r.Ef, r.runtime_s)]
            writer.writerow(row + [ineff])


def read_csv(path) -> list[TrialRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [
        TrialRecord(
            T=int(row["T"]),
            trial=int(row["trial"]),
            algorithm=row["algorithm"],
            seed=int(row["seed"]),
            E0=float(row["E0"]),
            Ef=float(row["Ef"]),
            runtime_s=float(row["runtime_s"]),
            inefficiency=None if row["inefficiency"] == MISSING else float(row["inefficiency"]),
        )
        for row in rows
    ]


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.1e}"
    return f"{v:.3g}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def line_chart_svg(series: dict[str, list[tuple[float, float]]], title: str, xlabel: str, ylabel: str) -> str:
    """One ``<polyline>`` per named series, linear axes."""
    if not series:
        raise InvalidParameterError("chart has no series")
    # an all-empty chart (e.g. every inefficiency undefined) still gets axes
    pts = [p for s in series.values() for p in s] or [(0.0, 0.0), (1.0, 1.0)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return MARGIN_T + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
    ]
    for tx in sorted(set(xs)):
        px = sx(tx)
        out.append(f'<line x1="{px:.1f}" y1="{MARGIN_T + ph}" x2="{px:.1f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.1f}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{_fmt(tx)}</text>')
    for ty in _ticks(y0, y1):
        py = sy(ty)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{py:.1f}" x2="{MARGIN_L + pw}" y2="{py:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{py + 4:.1f}" text-anchor="end">{_fmt(ty)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for k, (name, s) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in sorted(s))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = MARGIN_T + 10 + 18 * k
        lx = MARGIN_L + pw + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


CHARTS = (
    ("runtime.svg", "mean_runtime", "Mean run time", "run time (s)"),
    ("error.svg", "mean_Ef", "Mean final error", "E_f"),
    ("inefficiency.svg", "mean_inefficiency", "Mean alignment inefficiency", "E_f * T_R / E_0 (s)"),
)


def emit_plots(summary: Summary, out_dir) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for filename, attr, title, ylabel in CHARTS:
        series = {}
        for algo in summary.algorithms:
            Ts, vals = summary.series(algo, attr)
            pts = [(float(T), v) for T, v in zip(Ts, vals) if v is not None and math.isfinite(v)]
            series[algo] = pts
        path = out_dir / filename
        path.write_text(line_chart_svg(series, title, "T (frames)", ylabel), encoding="utf-8")
        written.append(path)
    return written

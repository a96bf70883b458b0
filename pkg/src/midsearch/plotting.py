"""Deterministic SVG rendering of success curves with confidence bands.

Hand-rolled rather than pulling in a plotting stack: the output must be
byte-identical across runs for reproducibility checks, and the plots are
simple (one curve per algorithm, shaded interval, axes, legend).
"""

from __future__ import annotations

import csv

from .errors import InvalidParams

PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
]

WIDTH, HEIGHT = 880, 540
ML, MR, MT, MB = 72, 24, 40, 56  # margins


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".") if x else "0"


def _fmt_samples(x: float) -> str:
    if x >= 1e6:
        return f"{x / 1e6:g}M"
    if x >= 1e3:
        return f"{x / 1e3:g}k"
    return f"{x:g}"


class CurveSeries:
    def __init__(self, name, samples, rate, lo, hi):
        self.name = name
        self.samples = list(map(float, samples))
        self.rate = list(map(float, rate))
        self.lo = list(map(float, lo))
        self.hi = list(map(float, hi))


def read_results_csv(path) -> list[CurveSeries]:
    """Parse the harness CSV back into per-algorithm series."""
    by_alg: dict[str, list] = {}
    order: list[str] = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        required = {
            "algorithm",
            "checkpoint_samples",
            "successes",
            "trials",
            "rate",
            "wilson_lo",
            "wilson_hi",
            "mean_samples_used",
        }
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise InvalidParams(f"CSV schema mismatch: {reader.fieldnames}")
        for row in reader:
            try:
                rec = (
                    float(row["checkpoint_samples"]),
                    float(row["rate"]),
                    float(row["wilson_lo"]),
                    float(row["wilson_hi"]),
                )
            except (TypeError, ValueError) as exc:
                raise InvalidParams(f"bad CSV row {row!r}") from exc
            name = row["algorithm"]
            if name not in by_alg:
                by_alg[name] = []
                order.append(name)
            by_alg[name].append(rec)
    series = []
    for name in order:
        rows = sorted(by_alg[name])
        series.append(
            CurveSeries(
                name,
                [r[0] for r in rows],
                [r[1] for r in rows],
                [r[2] for r in rows],
                [r[3] for r in rows],
            )
        )
    return series


def render_svg(series: list[CurveSeries], out_path, title: str = "success rate vs samples"):
    """Write the plot; an empty series list yields empty axes."""
    x_max = max((max(s.samples) for s in series if s.samples), default=1.0)
    x_max = max(x_max, 1.0)
    px_w = WIDTH - ML - MR
    px_h = HEIGHT - MT - MB

    def sx(x):
        return ML + px_w * (x / x_max)

    def sy(y):
        return MT + px_h * (1.0 - y)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{ML}" y="24" font-family="sans-serif" font-size="15">{title}</text>',
    ]
    # grid and axes
    for k in range(6):
        y = k / 5.0
        parts.append(
            f'<line x1="{ML}" y1="{sy(y):.1f}" x2="{WIDTH - MR}" y2="{sy(y):.1f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{ML - 8}" y="{sy(y) + 4:.1f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{_fmt(y)}</text>'
        )
    for k in range(6):
        x = x_max * k / 5.0
        parts.append(
            f'<text x="{sx(x):.1f}" y="{HEIGHT - MB + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{_fmt_samples(x)}</text>'
        )
    parts.append(
        f'<rect x="{ML}" y="{MT}" width="{px_w}" height="{px_h}" fill="none" '
        f'stroke="#333333" stroke-width="1"/>'
    )
    parts.append(
        f'<text x="{ML + px_w / 2:.0f}" y="{HEIGHT - 14}" font-family="sans-serif" '
        f'font-size="12" text-anchor="middle">samples</text>'
    )
    parts.append(
        f'<text x="20" y="{MT + px_h / 2:.0f}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 20 {MT + px_h / 2:.0f})">'
        f"success rate</text>"
    )

    for si, s in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        if not s.samples:
            continue
        band = (
            [f"{sx(x):.1f},{sy(h):.1f}" for x, h in zip(s.samples, s.hi)]
            + [f"{sx(x):.1f},{sy(l):.1f}" for x, l in zip(reversed(s.samples), reversed(s.lo))]
        )
        parts.append(
            f'<polygon points="{" ".join(band)}" fill="{color}" fill-opacity="0.15" '
            f'stroke="none"/>'
        )
        pts = " ".join(f"{sx(x):.1f},{sy(r):.1f}" for x, r in zip(s.samples, s.rate))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        ly = MT + 16 + 18 * si
        parts.append(
            f'<line x1="{WIDTH - MR - 150}" y1="{ly - 4}" x2="{WIDTH - MR - 122}" '
            f'y2="{ly - 4}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MR - 116}" y="{ly}" font-family="sans-serif" '
            f'font-size="12">{s.name}</text>'
        )
    parts.append("</svg>")
    with open(out_path, "w") as f:
        f.write("\n".join(parts))
        f.write("\n")


def render_result_svg(result, out_path):
    series = [
        CurveSeries(c.algorithm, c.checkpoints, c.rate, c.wilson_lo, c.wilson_hi)
        for c in result.curves
    ]
    render_svg(series, out_path)

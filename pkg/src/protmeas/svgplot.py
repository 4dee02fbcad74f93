"""Self-contained SVG line plots with byte-deterministic output.

No fonts, timestamps, or external assets are embedded; the same table and
selection always produce the same bytes, which is what lets runs be compared
with a plain file diff.
"""

import math

from .tables import ResultTable, write_atomic

WIDTH, HEIGHT = 640.0, 480.0
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64.0, 16.0, 28.0, 44.0
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v: float) -> str:
    return f"{v:.10g}"


def emit_plot(table: ResultTable, x: str, ys: list, path, title: str = "",
              labels: list | None = None) -> bytes:
    """Render selected columns as polylines and write the SVG atomically."""
    xs = [float(v) for v in table.column(x)]
    series = [[float(v) for v in table.column(y)] for y in ys]
    labels = labels if labels is not None else list(ys)
    if not xs:
        raise ValueError("cannot plot an empty table")

    xlo, xhi = min(xs), max(xs)
    ylo = min(min(s) for s in series)
    yhi = max(max(s) for s in series)
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + (v - xlo) / (xhi - xlo) * plot_w

    def py(v):
        return MARGIN_T + (yhi - v) / (yhi - ylo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:g}" '
        f'height="{HEIGHT:g}" viewBox="0 0 {WIDTH:g} {HEIGHT:g}">',
        f'<rect x="0" y="0" width="{WIDTH:g}" height="{HEIGHT:g}" fill="#ffffff"/>',
        f'<rect x="{MARGIN_L:g}" y="{MARGIN_T:g}" width="{plot_w:g}" '
        f'height="{plot_h:g}" fill="none" stroke="#000000"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH / 2:g}" y="18" font-family="sans-serif" '
            f'font-size="13" text-anchor="middle">{title}</text>')

    for v in _nice_ticks(xlo, xhi):
        X = px(v)
        parts.append(f'<line x1="{X:.2f}" y1="{MARGIN_T + plot_h:.2f}" '
                     f'x2="{X:.2f}" y2="{MARGIN_T + plot_h + 5:.2f}" stroke="#000000"/>')
        parts.append(f'<text x="{X:.2f}" y="{MARGIN_T + plot_h + 18:.2f}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="middle">{_fmt(v)}</text>')
    for v in _nice_ticks(ylo, yhi):
        Y = py(v)
        parts.append(f'<line x1="{MARGIN_L - 5:.2f}" y1="{Y:.2f}" '
                     f'x2="{MARGIN_L:.2f}" y2="{Y:.2f}" stroke="#000000"/>')
        parts.append(f'<text x="{MARGIN_L - 8:.2f}" y="{Y + 4:.2f}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'text-anchor="end">{_fmt(v)}</text>')

    xlab = table.header()[table.columns.index(x)]
    parts.append(f'<text x="{MARGIN_L + plot_w / 2:.2f}" y="{HEIGHT - 8:.2f}" '
                 f'font-family="sans-serif" font-size="12" '
                 f'text-anchor="middle">{xlab}</text>')

    for i, (vals, label) in enumerate(zip(series, labels)):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(xs, vals))
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_T + 14 + 16 * i
        parts.append(f'<line x1="{MARGIN_L + plot_w - 130:.2f}" y1="{ly:.2f}" '
                     f'x2="{MARGIN_L + plot_w - 106:.2f}" y2="{ly:.2f}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{MARGIN_L + plot_w - 100:.2f}" y="{ly + 4:.2f}" '
                     f'font-family="sans-serif" font-size="11">{label}</text>')

    parts.append("</svg>")
    data = "\n".join(parts).encode("ascii")
    write_atomic(path, data)
    return data

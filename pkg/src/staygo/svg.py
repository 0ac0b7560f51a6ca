"""Bare-bones standalone SVG line and grouped-bar charts."""

from __future__ import annotations

from html import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
W, H = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 170, 40, 50


def _frame(title, xlabel, ylabel):
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{(LEFT + W - RIGHT) / 2}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{(TOP + H - BOTTOM) / 2}" text-anchor="middle" '
        f'transform="rotate(-90 15 {(TOP + H - BOTTOM) / 2})">{escape(ylabel)}</text>',
    ]


def _nice_range(lo, hi):
    if hi <= lo:
        hi = lo + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad if lo < 0 else 0.0, hi + pad


def _axes(parts, y0, y1, ticks=5):
    plot_h = H - TOP - BOTTOM
    parts.append(f'<line x1="{LEFT}" y1="{H - BOTTOM}" x2="{W - RIGHT}" y2="{H - BOTTOM}" stroke="black"/>')
    parts.append(f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{H - BOTTOM}" stroke="black"/>')
    for i in range(ticks + 1):
        v = y0 + (y1 - y0) * i / ticks
        y = H - BOTTOM - plot_h * i / ticks
        parts.append(f'<line x1="{LEFT - 4}" y1="{y:.1f}" x2="{LEFT}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{LEFT - 6}" y="{y + 4:.1f}" text-anchor="end">{v:.3g}</text>')


def _legend(parts, labels):
    for i, label in enumerate(labels):
        y = TOP + 16 * i
        colour = PALETTE[i % len(PALETTE)]
        parts.append(f'<rect x="{W - RIGHT + 10}" y="{y}" width="12" height="10" fill="{colour}"/>')
        parts.append(f'<text x="{W - RIGHT + 28}" y="{y + 9}">{escape(label)}</text>')


def line_chart(series: dict[str, list[tuple[float, float]]], title="", xlabel="", ylabel="") -> str:
    parts = _frame(title, xlabel, ylabel)
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts]
    if not xs:
        return "\n".join(parts + ["</svg>"]) + "\n"
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1
    y0, y1 = _nice_range(min(ys), max(ys))
    _axes(parts, y0, y1)
    plot_w, plot_h = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + plot_w * (x - x0) / (x1 - x0)

    def py(y):
        return H - BOTTOM - plot_h * (y - y0) / (y1 - y0)

    step = max(1, round((x1 - x0) / 10))
    x = x0
    while x <= x1:
        parts.append(f'<text x="{px(x):.1f}" y="{H - BOTTOM + 15}" text-anchor="middle">{x:g}</text>')
        x += step
    for i, (label, pts) in enumerate(series.items()):
        coords = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in pts)
        colour = PALETTE[i % len(PALETTE)]
        parts.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{coords}"/>')
    _legend(parts, list(series))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(groups: dict[str, dict[str, float]], title="", ylabel="") -> str:
    """Grouped bars: one group per outer key, one bar per inner key."""
    parts = _frame(title, "", ylabel)
    labels = list(dict.fromkeys(k for g in groups.values() for k in g))
    values = [v for g in groups.values() for v in g.values()]
    y0, y1 = _nice_range(min(values + [0.0]), max(values + [0.0]))
    _axes(parts, y0, y1)
    plot_w, plot_h = W - LEFT - RIGHT, H - TOP - BOTTOM
    gw = plot_w / max(len(groups), 1)
    bw = 0.8 * gw / max(len(labels), 1)
    for gi, (gname, bars) in enumerate(groups.items()):
        gx = LEFT + gi * gw + 0.1 * gw
        parts.append(f'<text x="{LEFT + (gi + 0.5) * gw:.1f}" y="{H - BOTTOM + 15}" '
                     f'text-anchor="middle">{escape(gname)}</text>')
        for li, label in enumerate(labels):
            if label not in bars:
                continue
            v = bars[label]
            top = H - BOTTOM - plot_h * (v - y0) / (y1 - y0)
            base = H - BOTTOM - plot_h * (0.0 - y0) / (y1 - y0)
            parts.append(
                f'<rect x="{gx + li * bw:.1f}" y="{min(top, base):.1f}" width="{bw:.1f}" '
                f'height="{abs(base - top):.1f}" fill="{PALETTE[li % len(PALETTE)]}"/>'
            )
    _legend(parts, labels)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

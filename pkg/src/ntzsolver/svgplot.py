"""Minimal self-contained SVG charts.

No plotting dependency: the two commands that emit figures need only a
log-log scatter with a fitted line and a band-plus-line timeline. All
coordinates are formatted with a fixed precision so output bytes are
deterministic for identical inputs.
"""

from __future__ import annotations

import math

_W, _H = 720, 440
_ML, _MR, _MT, _MB = 70, 20, 40, 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _scale(lo, hi):
    if hi <= lo:
        hi = lo + 1.0

    def to_x(v):
        return _ML + (v - lo) / (hi - lo) * (_W - _ML - _MR)

    return to_x


def _scale_y(lo, hi):
    if hi <= lo:
        hi = lo + 1.0

    def to_y(v):
        return _H - _MB - (v - lo) / (hi - lo) * (_H - _MT - _MB)

    return to_y


def _header(title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">\n'
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>\n'
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>\n'
    )


def _axes(xlabel, ylabel, xlo, xhi, ylo, yhi, tickfmt="{:.4g}"):
    parts = [
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>\n',
        f'<text x="{(_ML + _W - _MR) // 2}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{xlabel}</text>\n',
        f'<text x="16" y="{(_MT + _H - _MB) // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) // 2})">{ylabel}</text>\n',
    ]
    for v, x in ((xlo, _ML), (xhi, _W - _MR)):
        parts.append(
            f'<text x="{x}" y="{_H - _MB + 16}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tickfmt.format(v)}</text>\n'
        )
    for v, y in ((ylo, _H - _MB), (yhi, _MT)):
        parts.append(
            f'<text x="{_ML - 6}" y="{y + 4}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tickfmt.format(v)}</text>\n'
        )
    return "".join(parts)


def _polyline(xs, ys, color, width=1.5, dash=None):
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    extra = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="{width}"{extra} '
        f'points="{pts}"/>\n'
    )


def render_sweep_svg(costs, widths, oracle_widths=None, slope=None) -> str:
    """Log-log scatter of zone width against cost with the fitted slope."""
    lx = [math.log10(c) for c in costs]
    ly = [math.log10(w) for w in widths]
    all_y = list(ly)
    if oracle_widths is not None:
        all_y += [math.log10(w) for w in oracle_widths]
    xlo, xhi = min(lx), max(lx)
    ylo, yhi = min(all_y), max(all_y)
    pad = 0.05 * max(yhi - ylo, 1e-9)
    ylo, yhi = ylo - pad, yhi + pad
    to_x = _scale(xlo, xhi)
    to_y = _scale_y(ylo, yhi)

    out = [_header("No-trade zone width vs cost (log-log)")]
    out.append(
        _axes("log10 cost", "log10 width", xlo, xhi, ylo, yhi, tickfmt="{:.2f}")
    )
    out.append(_polyline([to_x(v) for v in lx], [to_y(v) for v in ly], "#1f77b4"))
    for x, y in zip(lx, ly):
        out.append(
            f'<circle cx="{_fmt(to_x(x))}" cy="{_fmt(to_y(y))}" r="3" '
            f'fill="#1f77b4"/>\n'
        )
    if oracle_widths is not None:
        loy = [math.log10(w) for w in oracle_widths]
        out.append(
            _polyline(
                [to_x(v) for v in lx], [to_y(v) for v in loy], "#d62728", dash="4 3"
            )
        )
        for x, y in zip(lx, loy):
            out.append(
                f'<circle cx="{_fmt(to_x(x))}" cy="{_fmt(to_y(y))}" r="3" '
                f'fill="none" stroke="#d62728"/>\n'
            )
    if slope is not None:
        out.append(
            f'<text x="{_W - _MR - 8}" y="{_MT + 18}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">fitted slope '
            f"{slope:.4f}</text>\n"
        )
    out.append("</svg>\n")
    return "".join(out)


def render_simulation_svg(times, ntz_low, ntz_high, position) -> str:
    """Timeline: the no-trade band with the position path on top."""
    times = list(times)
    low = list(ntz_low)
    high = list(ntz_high)
    pos = list(position)
    xlo, xhi = min(times), max(times)
    ylo = min(min(low), min(pos))
    yhi = max(max(high), max(pos))
    pad = 0.05 * max(yhi - ylo, 1e-9)
    ylo, yhi = ylo - pad, yhi + pad
    to_x = _scale(xlo, xhi)
    to_y = _scale_y(ylo, yhi)

    out = [_header("Position against the evolving no-trade zone")]
    out.append(_axes("time", "position", xlo, xhi, ylo, yhi))
    band = [(to_x(t), to_y(v)) for t, v in zip(times, high)]
    band += [(to_x(t), to_y(v)) for t, v in zip(reversed(times), reversed(low))]
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in band)
    out.append(f'<polygon fill="#c6dbef" stroke="none" points="{pts}"/>\n')
    out.append(
        _polyline([to_x(t) for t in times], [to_y(v) for v in pos], "#d62728", 1.8)
    )
    out.append("</svg>\n")
    return "".join(out)

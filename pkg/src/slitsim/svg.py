"""Minimal SVG rendering of trajectory bundles; no plotting dependency."""

from __future__ import annotations

from .scattering import Detected, Geometry, TrajectoryRecord

_WIDTH = 900
_MAX_POINTS = 1500


def render_trajectories(records: list[TrajectoryRecord], g: Geometry) -> str:
    """Draw screens, slit, emitter and one polyline per trajectory.

    Detected paths are drawn in red, everything else in blue.  Long paths
    are thinned to at most _MAX_POINTS vertices; endpoints are kept.
    """
    xmin = g.x_escape - 0.5
    xmax = g.screen_gap + 0.5
    ymax = 1.2 * g.slit_half_height
    for rec in records:
        for s in rec.path or ():
            ay = abs(s.pos[1])
            if ay > ymax:
                ymax = ay
    ymax = min(ymax * 1.05, g.y_bound * 1.05)

    scale = _WIDTH / (xmax - xmin)
    height = 2 * ymax * scale

    def px(x: float) -> float:
        return (x - xmin) * scale

    def py(y: float) -> float:
        return (ymax - y) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{height:.0f}" viewBox="0 0 {_WIDTH} {height:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for rec in records:
        path = rec.path or []
        if len(path) < 2:
            continue
        stride = max(1, (len(path) - 1) // _MAX_POINTS)
        pts = path[::stride]
        if pts[-1] is not path[-1]:
            pts.append(path[-1])
        coords = " ".join(f"{px(s.pos[0]):.2f},{py(s.pos[1]):.2f}" for s in pts)
        color = "#c0392b" if isinstance(rec.outcome, Detected) else "#3a6ea5"
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="0.7" '
                     f'stroke-opacity="0.45" points="{coords}"/>')
    R = g.slit_half_height
    for y0, y1 in ((R, ymax), (-ymax, -R)):
        parts.append(f'<line x1="{px(0):.2f}" y1="{py(y0):.2f}" x2="{px(0):.2f}" '
                     f'y2="{py(y1):.2f}" stroke="black" stroke-width="3"/>')
    parts.append(f'<line x1="{px(g.screen_gap):.2f}" y1="{py(-ymax):.2f}" '
                 f'x2="{px(g.screen_gap):.2f}" y2="{py(ymax):.2f}" '
                 f'stroke="black" stroke-width="2"/>')
    parts.append(f'<circle cx="{px(-g.emitter_distance):.2f}" cy="{py(0):.2f}" '
                 f'r="3" fill="black"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

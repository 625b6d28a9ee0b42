"""Minimal standalone SVG output: scatter plots and heatmaps.

No plotting dependency; every file is self-contained (plain shapes, no
external assets).  Colors follow a small viridis-like ramp.
"""

from __future__ import annotations

import numpy as np

_RAMP = [
    (0.267, 0.005, 0.329),
    (0.254, 0.265, 0.530),
    (0.164, 0.471, 0.558),
    (0.135, 0.659, 0.518),
    (0.478, 0.821, 0.318),
    (0.993, 0.906, 0.144),
]


def _color(value: float) -> str:
    v = min(max(float(value), 0.0), 1.0) * (len(_RAMP) - 1)
    k = min(int(v), len(_RAMP) - 2)
    t = v - k
    rgb = [(1 - t) * a + t * b for a, b in zip(_RAMP[k], _RAMP[k + 1])]
    return "#" + "".join(f"{int(round(255 * c)):02x}" for c in rgb)


def _header(size: int) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]


def svg_scatter(path: str, points, values, unit_circle: bool = True,
                size: int = 640, margin: float = 40.0) -> None:
    """Scatter of complex points colored by ``values`` normalized to [0, 1]."""
    points = np.asarray(points, dtype=complex).ravel()
    values = np.asarray(values, dtype=float).ravel()
    span = max(1.05, float(np.abs(points).max()) * 1.05) if points.size else 1.05

    def mapx(x):
        return margin + (x + span) / (2 * span) * (size - 2 * margin)

    def mapy(y):
        return size - margin - (y + span) / (2 * span) * (size - 2 * margin)

    lines = _header(size)
    lines.append(
        f'<line x1="{mapx(-span):.1f}" y1="{mapy(0):.1f}" x2="{mapx(span):.1f}" '
        f'y2="{mapy(0):.1f}" stroke="#bbbbbb" stroke-width="1"/>'
    )
    lines.append(
        f'<line x1="{mapx(0):.1f}" y1="{mapy(-span):.1f}" x2="{mapx(0):.1f}" '
        f'y2="{mapy(span):.1f}" stroke="#bbbbbb" stroke-width="1"/>'
    )
    if unit_circle:
        r = (size - 2 * margin) / (2 * span)
        lines.append(
            f'<circle cx="{mapx(0):.1f}" cy="{mapy(0):.1f}" r="{r:.1f}" '
            'fill="none" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>'
        )
    lo = float(values.min()) if values.size else 0.0
    hi = float(values.max()) if values.size else 1.0
    scale = hi - lo if hi > lo else 1.0
    for z, v in zip(points, values):
        lines.append(
            f'<circle cx="{mapx(z.real):.2f}" cy="{mapy(z.imag):.2f}" r="2.2" '
            f'fill="{_color((v - lo) / scale)}"/>'
        )
    lines.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def svg_heatmap(path: str, grid, x_values, y_values, overlays=(),
                size: int = 640, margin: float = 40.0) -> None:
    """Heatmap of ``grid[i, j]`` at (x_values[j], y_values[i]) plus overlay polylines.

    Overlays are sequences of (x, y) pairs in data coordinates, drawn as
    white curves (phase boundaries).
    """
    grid = np.asarray(grid, dtype=float)
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    x0, x1 = float(x_values.min()), float(x_values.max())
    y0, y1 = float(y_values.min()), float(y_values.max())
    dx = (x1 - x0) / max(1, len(x_values) - 1) or 1.0
    dy = (y1 - y0) / max(1, len(y_values) - 1) or 1.0

    def mapx(x):
        return margin + (x - (x0 - dx / 2)) / ((x1 - x0) + dx) * (size - 2 * margin)

    def mapy(y):
        return size - margin - (y - (y0 - dy / 2)) / ((y1 - y0) + dy) * (size - 2 * margin)

    lo, hi = float(grid.min()), float(grid.max())
    scale = hi - lo if hi > lo else 1.0
    lines = _header(size)
    cell_w = abs(mapx(x0 + dx) - mapx(x0))
    cell_h = abs(mapy(y0) - mapy(y0 + dy))
    for i, y in enumerate(y_values):
        for j, x in enumerate(x_values):
            lines.append(
                f'<rect x="{mapx(x) - cell_w / 2:.2f}" y="{mapy(y) - cell_h / 2:.2f}" '
                f'width="{cell_w:.2f}" height="{cell_h:.2f}" '
                f'fill="{_color((grid[i, j] - lo) / scale)}"/>'
            )
    for curve in overlays:
        pts = " ".join(f"{mapx(x):.1f},{mapy(y):.1f}" for x, y in curve)
        lines.append(
            f'<polyline points="{pts}" fill="none" stroke="white" stroke-width="1.5"/>'
        )
    lines.append(
        f'<rect x="{margin:.1f}" y="{margin:.1f}" width="{size - 2 * margin:.1f}" '
        f'height="{size - 2 * margin:.1f}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    lines.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")

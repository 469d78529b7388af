"""SVG figures rendered from the packaged Jinja2 templates.

Heatmaps show a field over its grid; line plots overlay 1-D cuts such as
the propagated, reference and Monte Carlo values along ``y = const``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .template import get_figure_env

if TYPE_CHECKING:
    from collections.abc import Sequence
    from pathlib import Path

    from numpy.typing import ArrayLike

    from .models import Field

# viridis anchors
_ANCHORS = np.array(
    [
        [68, 1, 84],
        [59, 82, 139],
        [33, 145, 140],
        [94, 201, 98],
        [253, 231, 37],
    ],
    dtype=float,
)
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _color(level: float) -> str:
    pos = min(max(level, 0.0), 1.0) * (len(_ANCHORS) - 1)
    k = min(int(pos), len(_ANCHORS) - 2)
    rgb = _ANCHORS[k] + (pos - k) * (_ANCHORS[k + 1] - _ANCHORS[k])
    return "#{:02x}{:02x}{:02x}".format(*(int(round(c)) for c in rgb))


def heatmap_svg(
    field: Field, title: str, *, max_cells: tuple[int, int] = (140, 60)
) -> str:
    """Render *field* as an SVG heatmap, block-averaged down to *max_cells*."""
    grid = field.grid
    sx = max(1, -(-grid.nx // max_cells[0]))
    sy = max(1, -(-grid.ny // max_cells[1]))
    nx, ny = grid.nx // sx, grid.ny // sy
    values = field.values[: nx * sx, : ny * sy]
    blocks = values.reshape(nx, sx, ny, sy).mean(axis=(1, 3))
    lo, hi = float(blocks.min()), float(blocks.max())
    span = hi - lo or 1.0
    width, height, cell_w, cell_h = 700, 300, 700 / nx, 300 / ny
    cells = [
        {
            "x": i * cell_w,
            # y grows upwards
            "y": height - (j + 1) * cell_h,
            "w": cell_w,
            "h": cell_h,
            "fill": _color((blocks[i, j] - lo) / span),
        }
        for i in range(nx)
        for j in range(ny)
    ]
    return get_figure_env().get_template("heatmap.svg").render(
        title=title,
        width=width,
        height=height,
        cells=cells,
        x_range=(grid.x_min, grid.x_max),
        y_range=(grid.y_min, grid.y_max),
        value_range=(lo, hi),
        legend=[_color(k / 9) for k in range(10)],
    )


@dataclass(frozen=True)
class Series:
    label: str
    x: ArrayLike
    y: ArrayLike


def lines_svg(series: Sequence[Series], title: str, *, x_label: str = "x") -> str:
    """Render overlaid line series with a shared axis box."""
    xs = [np.asarray(s.x, dtype=float) for s in series]
    ys = [np.asarray(s.y, dtype=float) for s in series]
    x_lo = min(float(x.min()) for x in xs)
    x_hi = max(float(x.max()) for x in xs)
    y_lo = min(float(y.min()) for y in ys)
    y_hi = max(float(y.max()) for y in ys)
    x_span, y_span = (x_hi - x_lo) or 1.0, (y_hi - y_lo) or 1.0
    width, height = 700, 300

    def points(x, y) -> str:
        px = (x - x_lo) / x_span * width
        py = height - (y - y_lo) / y_span * height
        return " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))

    lines = [
        {"label": s.label, "points": points(x, y), "color": _PALETTE[k % len(_PALETTE)]}
        for k, (s, x, y) in enumerate(zip(series, xs, ys))
    ]
    return get_figure_env().get_template("lines.svg").render(
        title=title,
        width=width,
        height=height,
        lines=lines,
        x_label=x_label,
        x_range=(x_lo, x_hi),
        y_range=(y_lo, y_hi),
    )


def write_svg(svg: str, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg, encoding="utf-8")
    return path

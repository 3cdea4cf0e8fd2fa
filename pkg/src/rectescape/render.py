"""Deterministic SVG drawings of instances, escape paths and peeling levels."""

from __future__ import annotations

from typing import Optional, Sequence

from .geometry import EscapeAssignment, Rect, SepInstance, escape_path, sep_path_end

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")
DIR_COLORS = {"left": "#1f77b4", "right": "#d62728", "down": "#2ca02c", "up": "#9467bd"}


def _rect(r: Rect, H: int, scale: int, **attrs) -> str:
    extra = " ".join(f'{k.rstrip("_").replace("_", "-")}="{v}"' for k, v in attrs.items())
    return (f'<rect x="{r.x1 * scale}" y="{(H - r.y2) * scale}" '
            f'width="{(r.x2 - r.x1) * scale}" height="{(r.y2 - r.y1) * scale}" {extra}/>')


def render_svg(inst, assignment: Optional[EscapeAssignment] = None,
               levels: Optional[Sequence[int]] = None, scale: int = 20) -> str:
    """SVG text; y grows upward in instance coordinates.

    ``levels[i]`` (1-based) colors element ``i`` and its path by peeling
    level; otherwise paths are colored by direction.
    """
    b = inst.boundary
    W, H = b.width, b.height
    pad = scale
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W * scale + 2 * pad}" '
        f'height="{H * scale + 2 * pad}" viewBox="{-pad} {-pad} {W * scale + 2 * pad} '
        f'{H * scale + 2 * pad}">',
        f'<rect class="boundary" x="0" y="0" width="{W * scale}" height="{H * scale}" '
        f'fill="none" stroke="black" stroke-width="2"/>',
    ]

    def color(i: int) -> str:
        if levels is not None:
            return PALETTE[(levels[i] - 1) % len(PALETTE)]
        if assignment is not None:
            return DIR_COLORS[assignment[i].value]
        return "#444444"

    if isinstance(inst, SepInstance):
        for i, p in enumerate(inst.points):
            if assignment is not None:
                q = sep_path_end(p, assignment[i], b)
                out.append(f'<line class="path" x1="{p[0] * scale}" y1="{(H - p[1]) * scale}" '
                           f'x2="{q[0] * scale}" y2="{(H - q[1]) * scale}" stroke="{color(i)}" '
                           f'stroke-opacity="0.45" stroke-width="{max(2, scale // 4)}"/>')
        for i, p in enumerate(inst.points):
            out.append(f'<circle class="element" cx="{p[0] * scale}" cy="{(H - p[1]) * scale}" '
                       f'r="{max(2, scale // 5)}" fill="{color(i)}"/>')
    else:
        for i, r in enumerate(inst.rects):
            if assignment is not None:
                out.append(_rect(escape_path(r, assignment[i], b), H, scale, class_="path",
                                 fill=color(i), fill_opacity="0.3", stroke="none"))
        for i, r in enumerate(inst.rects):
            out.append(_rect(r, H, scale, class_="element", fill=color(i), stroke="black",
                             stroke_width="1"))
    out.append("</svg>")
    return "\n".join(out) + "\n"

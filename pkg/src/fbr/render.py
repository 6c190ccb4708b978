"""SVG drawings of instances and solutions in data coordinates."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Optional

import numpy as np

from .graph import GEO_TOL, RobotConfig, comm_graph
from .instances import Instance
from .relocate import MoveSolution

SVG_NS = "http://www.w3.org/2000/svg"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _line(parent: ET.Element, p, q, **attrs) -> ET.Element:
    return ET.SubElement(
        parent, "line",
        x1=_fmt(p[0]), y1=_fmt(p[1]), x2=_fmt(q[0]), y2=_fmt(q[1]), **attrs,
    )


def render_svg(inst: Instance, solution: Optional[MoveSolution] = None, width_px: int = 600) -> str:
    """Robots as circles, links as solid lines, added links dashed, moves as arrows."""
    h = inst.h
    old = inst.positions
    new = old if solution is None else np.asarray(solution.new_positions, dtype=float)
    pts = np.vstack([old, new])
    lo = pts.min(axis=0) - 0.25 * h
    hi = pts.max(axis=0) + 0.25 * h
    span = hi - lo
    r = 0.04 * h
    stroke = 0.01 * h

    svg = ET.Element(
        "svg",
        xmlns=SVG_NS,
        width=str(width_px),
        height=str(int(round(width_px * span[1] / span[0]))),
        viewBox=f"{_fmt(lo[0])} {_fmt(-hi[1])} {_fmt(span[0])} {_fmt(span[1])}",
    )
    defs = ET.SubElement(svg, "defs")
    marker = ET.SubElement(
        defs, "marker", id="arrow", viewBox="0 0 10 10", refX="9", refY="5",
        markerWidth="6", markerHeight="6", orient="auto-start-reverse",
    )
    ET.SubElement(marker, "path", d="M 0 0 L 10 5 L 0 10 z", fill="#c0392b")
    # flip y so that the drawing uses the usual mathematical orientation
    world = ET.SubElement(svg, "g", transform="scale(1,-1)")

    edges = ET.SubElement(world, "g", id="links", stroke="#555555")
    g = comm_graph(RobotConfig(new, h))
    for i, j in sorted(g.edges):
        _line(edges, new[i], new[j], **{"stroke-width": _fmt(stroke)})

    if solution is not None and solution.augmentation is not None:
        added = ET.SubElement(
            world, "g", id="augmentation", stroke="#2471a3",
            **{"stroke-dasharray": f"{_fmt(4 * stroke)} {_fmt(3 * stroke)}"},
        )
        for i, j in solution.augmentation.pairs():
            _line(added, new[i], new[j], **{"stroke-width": _fmt(1.5 * stroke)})

    if solution is not None:
        moves = ET.SubElement(world, "g", id="moves", stroke="#c0392b")
        for k in range(inst.n):
            if np.hypot(*(new[k] - old[k])) > GEO_TOL:
                ET.SubElement(
                    moves, "circle", cx=_fmt(old[k][0]), cy=_fmt(old[k][1]), r=_fmt(r),
                    fill="none", **{"stroke-width": _fmt(stroke / 2)},
                )
                _line(
                    moves, old[k], new[k], **{"stroke-width": _fmt(stroke), "marker-end": "url(#arrow)"}
                )

    robots = ET.SubElement(world, "g", id="robots", fill="#1b2631")
    for k in range(inst.n):
        ET.SubElement(robots, "circle", cx=_fmt(new[k][0]), cy=_fmt(new[k][1]), r=_fmt(r))
    return ET.tostring(svg, encoding="unicode")

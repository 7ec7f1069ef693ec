"""SVG pictures of the Farey and Bary partitions."""

from __future__ import annotations

import colorsys
from dataclasses import dataclass
from fractions import Fraction

from . import continuous, weighted
from .projective import M0, mat_mul

MAX_DEPTH = 8

# hue per move kind for the depth-shaded fill
_HUES = {"I": 0.0, "II": 0.12, "III": 0.33, "IV": 0.5, "V": 0.62, "VI": 0.8}


@dataclass(frozen=True)
class RenderSpec:
    map: str = "continuous"
    side: str = "farey"
    depth: int = 3
    weights: weighted.Weights | None = None
    width: int = 800
    height: int = 800
    stroke: float = 0.5
    fill: str = "none"  # or "depth-shaded"

    def __post_init__(self):
        if self.map not in ("weighted", "continuous"):
            raise ValueError(f"unknown map {self.map!r}")
        if self.map == "weighted":
            w = self.weights if self.weights is not None else weighted.UNIT
            if not isinstance(w, weighted.Weights):
                w = weighted.Weights(*w)
            object.__setattr__(self, "weights", w)
        if self.side not in ("farey", "bary"):
            raise ValueError(f"unknown side {self.side!r}")
        if not 0 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be between 0 and {MAX_DEPTH}")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport must be positive")
        if self.stroke < 0:
            raise ValueError("stroke width must be nonnegative")
        if self.fill not in ("none", "depth-shaded"):
            raise ValueError(f"unknown fill mode {self.fill!r}")


def _tables(spec):
    if spec.map == "weighted":
        fm, bm, kinds = weighted.farey_matrices(spec.weights), weighted.bary_matrices(spec.weights), weighted.KINDS
    else:
        fm, bm, kinds = continuous.FAREY, continuous.BARY, continuous.KINDS
    return (fm if spec.side == "farey" else bm), kinds


def iter_cells(spec: RenderSpec):
    """(path, matrix) for every cell at the given depth, in lexicographic path order."""
    table, kinds = _tables(spec)
    start = M0.rows if spec.side == "farey" else tuple(tuple(Fraction(x) for x in r) for r in M0.rows)
    stack = [((), start)]
    while stack:
        path, m = stack.pop()
        if len(path) == spec.depth:
            yield path, m
            continue
        for k in reversed(kinds):
            stack.append((path + (k,), mat_mul(m, table[k])))


def _fmt(v):
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _fill(path, depth):
    if not path:
        return "#dddddd"
    hue = _HUES[path[-1]]
    light = 0.35 + 0.5 * (len(path) / max(depth, 1))
    r, g, b = colorsys.hls_to_rgb(hue, min(light, 0.9), 0.55)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def render_partition(spec: RenderSpec) -> str:
    """A deterministic SVG 1.1 document with one polygon per cell."""
    w, h = spec.width, spec.height
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<g stroke="black" stroke-width="{_fmt(spec.stroke)}" stroke-linejoin="round">',
    ]
    for path, m in iter_cells(spec):
        pts = []
        for c in zip(*m):
            x, y = Fraction(c[0]) / c[2], Fraction(c[1]) / c[2]
            pts.append(f"{_fmt(float(w * x))},{_fmt(float(h * (1 - y)))}")
        fill = "none" if spec.fill == "none" else _fill(path, spec.depth)
        label = "".join(f"{k}." for k in path).rstrip(".") or "root"
        lines.append(f'<polygon id="c-{label}" points="{" ".join(pts)}" fill="{fill}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

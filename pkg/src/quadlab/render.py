"""SVG and matplotlib rendering of quadrilaterals with optional overlay layers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MARK_COLORS = ("#d62728", "#2ca02c", "#1f77b4", "#9467bd")
SIDE_COLORS = {"A1": "#d62728", "B1": "#2ca02c", "A2": "#ff7f0e", "B2": "#1f77b4"}


@dataclass
class Scene:
    polygon: np.ndarray
    marks: np.ndarray | None = None
    sides: dict | None = None  # name -> polyline
    cells: list = field(default_factory=list)  # (x0, y0, s)
    geodesics: list = field(default_factory=list)  # polylines
    disks: list = field(default_factory=list)  # (cx, cy, r, label)
    components: list = field(default_factory=list)  # polygons
    outline: np.ndarray | None = None  # secondary polygon, e.g. Q_tau
    title: str = ""

    @classmethod
    def from_quad(cls, Q, **layers) -> "Scene":
        from .geom_core import SideId

        sides = {s.name: Q.side_arc(s) for s in SideId}
        return cls(Q.polygon.xy, Q.mark_points, sides, **layers)

    @property
    def bbox(self):
        pts = [self.polygon]
        if self.outline is not None:
            pts.append(self.outline)
        for x, y, r, *_ in self.disks:
            pts.append(np.array([[x - r, y - r], [x + r, y + r]]))
        allp = np.vstack(pts)
        return (*allp.min(axis=0), *allp.max(axis=0))


def _f(v: float) -> str:
    s = f"{float(v):.10g}"
    return "0" if s == "-0" else s


def _pts(poly) -> str:
    return " ".join(f"{_f(x)},{_f(y)}" for x, y in poly)


def render_svg(scene: Scene, width: int = 800) -> str:
    """Standalone SVG; element order is fixed so equal scenes give equal bytes."""
    x0, y0, x1, y1 = scene.bbox
    pad = 0.05 * max(x1 - x0, y1 - y0, 1e-12)
    vx, vy, vw, vh = x0 - pad, y0 - pad, (x1 - x0) + 2 * pad, (y1 - y0) + 2 * pad
    height = max(1, int(round(width * vh / vw)))
    sw = _f(vw / 400)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_f(vx)} {_f(vy)} {_f(vw)} {_f(vh)}">',
        # flip y so the picture reads with y up
        f'<g transform="matrix(1 0 0 -1 0 {_f(vy + vy + vh)})">',
    ]
    if scene.cells:
        out.append(f'<g id="cells" fill="#cccccc" stroke="#999999" stroke-width="{sw}">')
        for x, y, s in scene.cells:
            out.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(s)}" height="{_f(s)}"/>')
        out.append("</g>")
    out.append(f'<g id="polygon" stroke-width="{_f(vw / 250)}">')
    out.append(f'<polygon points="{_pts(scene.polygon)}" fill="#f4f1e8" stroke="#333333"/>')
    if scene.sides:
        for name in ("A1", "B1", "A2", "B2"):
            if name in scene.sides:
                out.append(f'<polyline points="{_pts(scene.sides[name])}" fill="none" stroke="{SIDE_COLORS[name]}"/>')
    if scene.marks is not None:
        for k, (x, y) in enumerate(scene.marks):
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(vw / 120)}" fill="{MARK_COLORS[k % 4]}"/>')
    out.append("</g>")
    if scene.outline is not None:
        out.append(f'<g id="outline" fill="none" stroke="#8c564b" stroke-width="{sw}">')
        out.append(f'<polygon points="{_pts(scene.outline)}"/>')
        out.append("</g>")
    if scene.components:
        out.append('<g id="components" stroke="none">')
        for k, comp in enumerate(scene.components):
            col = "#17becf" if k % 2 == 0 else "#e377c2"
            out.append(f'<polygon points="{_pts(comp)}" fill="{col}" fill-opacity="0.4"/>')
        out.append("</g>")
    if scene.geodesics:
        out.append(f'<g id="geodesics" fill="none" stroke="#000000" stroke-width="{sw}">')
        for g in scene.geodesics:
            out.append(f'<polyline points="{_pts(g)}"/>')
        out.append("</g>")
    if scene.disks:
        out.append(f'<g id="disks" fill="none" stroke="#e41a1c" stroke-width="{sw}">')
        for x, y, r, *rest in scene.disks:
            label = f' data-label="{rest[0]}"' if rest else ""
            out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}"{label}/>')
        out.append("</g>")
    out.append("</g>")
    if scene.title:
        out.append(f"<title>{scene.title}</title>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_scene(scene: Scene, path=None, ax=None):
    """Matplotlib rendering of the same layers; saves to ``path`` when given."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from matplotlib.patches import Circle, Polygon, Rectangle

    own = ax is None
    if own:
        fig, ax = plt.subplots(figsize=(5, 5))
    for x, y, s in scene.cells:
        ax.add_patch(Rectangle((x, y), s, s, facecolor="#cccccc", edgecolor="#999999", lw=0.3))
    ax.add_patch(Polygon(scene.polygon, closed=True, facecolor="#f4f1e8", edgecolor="#333333", lw=1))
    if scene.sides:
        for name, poly in scene.sides.items():
            ax.plot(poly[:, 0], poly[:, 1], color=SIDE_COLORS[name], lw=1.5, label=name)
    if scene.outline is not None:
        ax.add_patch(Polygon(scene.outline, closed=True, fill=False, edgecolor="#8c564b", lw=0.8))
    for k, comp in enumerate(scene.components):
        ax.add_patch(Polygon(comp, closed=True, facecolor="#17becf" if k % 2 == 0 else "#e377c2", alpha=0.4))
    for g in scene.geodesics:
        g = np.asarray(g)
        ax.plot(g[:, 0], g[:, 1], color="black", lw=1)
    for x, y, r, *rest in scene.disks:
        ax.add_patch(Circle((x, y), r, fill=False, edgecolor="#e41a1c", lw=1))
        if rest:
            ax.annotate(str(rest[0]), (x, y), fontsize=6)
    if scene.marks is not None:
        ax.scatter(scene.marks[:, 0], scene.marks[:, 1], c=MARK_COLORS[: len(scene.marks)], s=12, zorder=5)
    x0, y0, x1, y1 = scene.bbox
    pad = 0.05 * max(x1 - x0, y1 - y0)
    ax.set_xlim(x0 - pad, x1 + pad)
    ax.set_ylim(y0 - pad, y1 + pad)
    ax.set_aspect("equal")
    if scene.title:
        ax.set_title(scene.title, fontsize=8)
    if own:
        if path is not None:
            fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
    return ax

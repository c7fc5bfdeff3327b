"""
OBJ and SVG exports for reconstructed shapes and psi curves
"""
import logging
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from polyrecon.exceptions import StorageError, ValidationError
from polyrecon.geometry import Polytope
from polyrecon.scan import Pattern

logger = logging.getLogger(__name__)

SVG_SIZE = 400
SVG_MARGIN = 20


def polytope_to_obj(P: Polytope, name: str = 'polytope') -> str:
    """Wavefront OBJ text; facets keep their outward vertex order"""
    if P.dim != 3:
        raise ValidationError(f"OBJ export needs a 3D polytope; got dim {P.dim}")
    lines = [f"o {name}"]
    for x, y, z in P.vertices:
        lines.append(f"v {x:.9f} {y:.9f} {z:.9f}")
    for facet in P.facets:
        lines.append("f " + " ".join(str(i + 1) for i in facet))
    return "\n".join(lines) + "\n"


def _frame(points: np.ndarray):
    """Map model coordinates into the SVG canvas, y pointing up"""
    lo = points.min(axis=0)
    span = float((points.max(axis=0) - lo).max()) or 1.0
    scale = (SVG_SIZE - 2 * SVG_MARGIN) / span

    def project(p):
        return SVG_MARGIN + (p[0] - lo[0]) * scale, SVG_SIZE - SVG_MARGIN - (p[1] - lo[1]) * scale
    return project


def _svg(body: Sequence[str]) -> str:
    header = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_SIZE}" height="{SVG_SIZE}" '
              f'viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">')
    return "\n".join([header, *body, "</svg>"]) + "\n"


def polygon_to_svg(P: Polytope) -> str:
    """Closed polyline through the polygon's vertices in boundary order"""
    if P.dim != 2:
        raise ValidationError(f"SVG polygon export needs a 2D polytope; got dim {P.dim}")
    vertices = np.asarray(P.vertices)
    following = dict(P.facets)
    order = [0]
    while len(order) < len(vertices):
        order.append(following[order[-1]])

    project = _frame(vertices)
    coords = " ".join("{:.3f},{:.3f}".format(*project(vertices[k])) for k in order)
    return _svg([f'  <polygon points="{coords}" fill="none" stroke="black" stroke-width="1.5"/>'])


def psi_curve_to_svg(pattern: Pattern, theta: Optional[float] = None) -> str:
    """psi(t) over a semicircle scan as a polyline, with an optional threshold line"""
    if len(pattern.grid.counts) != 1:
        raise ValidationError("psi curve export needs a one-parameter scan")
    t = pattern.grid.axes()[0]
    psi = pattern.psi.ravel()
    top = max(float(psi.max()), theta or 0.0) or 1.0

    width = SVG_SIZE - 2 * SVG_MARGIN
    x = SVG_MARGIN + (t - t[0]) / (t[-1] - t[0]) * width
    y = SVG_SIZE - SVG_MARGIN - psi / top * width
    coords = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(x, y))

    body = [f'  <polyline points="{coords}" fill="none" stroke="black" stroke-width="1"/>']
    if theta is not None:
        level = SVG_SIZE - SVG_MARGIN - theta / top * width
        body.append(f'  <line x1="{SVG_MARGIN}" y1="{level:.3f}" x2="{SVG_SIZE - SVG_MARGIN}" '
                    f'y2="{level:.3f}" stroke="red" stroke-dasharray="4 2"/>')
    return _svg(body)


def write_text(text: str, path: Union[str, Path]):
    try:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(text)
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e
    logger.debug("Wrote %s", path)


def export_shape(P: Polytope, path: Union[str, Path]):
    """OBJ for 3D, SVG for 2D, chosen by the polytope's dimension"""
    if P.dim == 3:
        write_text(polytope_to_obj(P, name=Path(path).stem), path)
    elif P.dim == 2:
        write_text(polygon_to_svg(P), path)
    else:
        raise ValidationError(f"No shape export for dim {P.dim}")

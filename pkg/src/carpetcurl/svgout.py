"""Deterministic SVG output for carpets, grids and corrector geometry.

Coordinates are scaled by 1000 and rendered from exact rationals with twelve
decimal digits via integer arithmetic, so identical inputs give byte-identical
files.  The y axis is flipped so that the origin sits at the bottom left.
"""

from __future__ import annotations

from fractions import Fraction

SCALE = 1000
DIGITS = 12


def _fmt(value: Fraction) -> str:
    v = Fraction(value) * SCALE
    sign = "-" if v < 0 else ""
    v = abs(v)
    scaled = v.numerator * 10 ** DIGITS
    whole, rem = divmod(scaled, v.denominator)
    if 2 * rem >= v.denominator:
        whole += 1
    int_part, frac_part = divmod(whole, 10 ** DIGITS)
    return f"{sign}{int_part}.{frac_part:0{DIGITS}d}"


def _fy(value: Fraction) -> str:
    return _fmt(1 - Fraction(value))


class SvgCanvas:
    def __init__(self, title: str):
        self.elements = []
        self.title = title

    def rect(self, x0, y0, x1, y1, fill="black", stroke="none", dash=None, opacity=None):
        style = f'fill="{fill}" stroke="{stroke}"'
        if dash:
            style += f' stroke-dasharray="{dash}" stroke-width="1"'
        if opacity:
            style += f' fill-opacity="{opacity}"'
        self.elements.append(
            f'<rect x="{_fmt(x0)}" y="{_fy(y1)}" width="{_fmt(Fraction(x1) - Fraction(x0))}"'
            f' height="{_fmt(Fraction(y1) - Fraction(y0))}" {style}/>')

    def polygon(self, points, fill="none", stroke="black", opacity=None):
        pts = " ".join(f"{_fmt(x)},{_fy(y)}" for (x, y) in points)
        style = f'fill="{fill}" stroke="{stroke}" stroke-width="1"'
        if opacity:
            style += f' fill-opacity="{opacity}"'
        self.elements.append(f'<polygon points="{pts}" {style}/>')

    def line(self, x0, y0, x1, y1, stroke="black", dash=None):
        style = f'stroke="{stroke}" stroke-width="1"'
        if dash:
            style += f' stroke-dasharray="{dash}"'
        self.elements.append(
            f'<line x1="{_fmt(x0)}" y1="{_fy(y0)}" x2="{_fmt(x1)}" y2="{_fy(y1)}" {style}/>')

    def polyline(self, points, stroke="blue"):
        pts = " ".join(f"{_fmt(x)},{_fy(y)}" for (x, y) in points)
        self.elements.append(
            f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="2"/>')

    def render(self) -> str:
        body = "\n".join(self.elements)
        return (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{SCALE}" height="{SCALE}" '
            f'viewBox="0 0 {SCALE} {SCALE}">\n'
            f'<title>{self.title}</title>\n'
            f'{body}\n</svg>\n'
        )


def carpet_svg(spec, m: int) -> str:
    """Filled surviving squares of the level-m prefractal."""
    from .carpet import enumerate_squares, side_length

    canvas = SvgCanvas(f"prefractal level {m}")
    canvas.rect(0, 0, 1, 1, fill="white", stroke="black")
    d = side_length(spec, m)
    for (x0, y0) in enumerate_squares(spec, m):
        canvas.rect(x0, y0, x0 + d, y0 + d, fill="black")
    return canvas.render()


def cells_svg(spec, n: int) -> str:
    """Cell grid with dashed cut lines and stage-n holes."""
    from .carpet import cell_grid, enumerate_holes

    canvas = SvgCanvas(f"stage {n} cell grid")
    canvas.rect(0, 0, 1, 1, fill="white", stroke="black")
    grid = cell_grid(spec, n)
    for (x0, y0, x1, y1) in grid.cells:
        canvas.rect(x0, y0, x1, y1, fill="none", stroke="#bbbbbb")
    for h in enumerate_holes(spec, n):
        (hx0, hx1), (hy0, hy1) = h.x_range, h.y_range
        canvas.rect(hx0, hy0, hx1, hy1, fill="none", stroke="black")
    for c in grid.x_cuts:
        canvas.line(c, 0, c, 1, stroke="green", dash="6,4")
    for c in grid.y_cuts:
        canvas.line(0, c, 1, c, stroke="red", dash="6,4")
    return canvas.render()


def staircase_svg(spec, n: int) -> str:
    """Strip set plus the staircase profile drawn against y."""
    from .witness import build_staircase, build_strips

    canvas = SvgCanvas(f"stage {n} staircase")
    canvas.rect(0, 0, 1, 1, fill="white", stroke="black")
    strips = build_strips(spec, n)
    for region in strips.regions():
        canvas.polygon(region, fill="yellow", stroke="blue", opacity="0.6")
    field = build_staircase(spec, n)
    profile = []
    for patch in field.patches:
        ys = sorted({v[1] for v in patch.vertices})
        for y in ys:
            profile.append((patch.value_at((Fraction(0), y)), y))
    profile = sorted(set(profile), key=lambda p: (p[1], p[0]))
    canvas.polyline(profile, stroke="blue")
    return canvas.render()


def tents_svg(spec, n: int) -> str:
    """Tent rectangles with their trapezoids at stage n."""
    from .witness import build_tents

    canvas = SvgCanvas(f"stage {n} tents")
    canvas.rect(0, 0, 1, 1, fill="white", stroke="black")
    for t in build_tents(spec, n):
        x0, y0, x1, y1 = t.rectangle
        canvas.rect(x0, y0, x1, y1, fill="yellow", stroke="none", opacity="0.5")
        canvas.polygon(t.trapezoid, stroke="blue")
        canvas.line(t.column_x, t.y_lo, t.column_x, t.y_hi, stroke="red", dash="4,3")
    return canvas.render()


def neighborhoods_svg(spec, n: int) -> str:
    """Boundary neighborhoods (strip rectangles and tent trapezoids) per cell."""
    from .carpet import cell_grid
    from .witness import build_neighborhoods

    canvas = SvgCanvas(f"stage {n} boundary neighborhoods")
    canvas.rect(0, 0, 1, 1, fill="white", stroke="black")
    grid = cell_grid(spec, n)
    for (x0, y0, x1, y1) in grid.cells:
        canvas.rect(x0, y0, x1, y1, fill="none", stroke="#bbbbbb")
    for nb in build_neighborhoods(spec, n):
        for region in nb.rectangles:
            canvas.polygon(region, fill="yellow", stroke="none", opacity="0.45")
        for region in nb.trapezoids:
            canvas.polygon(region, fill="orange", stroke="none", opacity="0.45")
    return canvas.render()

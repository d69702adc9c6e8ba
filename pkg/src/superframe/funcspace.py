"""Exact piecewise-constant model of square-integrable functions (d = 1, 2).

A function is a finite list of disjoint cells: half-open rational
intervals for d = 1, convex rational polygons for d = 2, each carrying a
complex value.  The class is closed under the dilation, translation and
rescaling unitaries used throughout the package, with the region geometry
transformed exactly; only the cell values are doubles.  Inner products
reduce to exact interval-overlap lengths (d = 1) or exact polygon-clip
areas (d = 2), so the only numerical error anywhere is final double
rounding.

Function literal mini-language (shared with the CLI):
  haar                          the step wavelet on [0,1)
  zero                          the zero function
  chi:a,b                       indicator of [a, b), rational endpoints
  steps:b0,v0,b1,v1,...,bn      breakpoints and values, d = 1
  poly:x0,y0;x1,y1;...=v        convex polygon indicator scaled by v, d = 2
  random:n,seed                 seeded random step function on [0,1)
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidGeometry, ShapeMismatch, UnsupportedDimension
from .intlin import IntMatrix, RatMatrix, RatVec, as_fraction, as_ratvec

Point = tuple[Fraction, Fraction]


def _require_dim(dim: int) -> None:
    if dim not in (1, 2):
        raise UnsupportedDimension(f"exact function model supports d in {{1, 2}}, got {dim}")


# ---------------------------------------------------------------------------
# cells

@dataclass(frozen=True)
class IntervalCell:
    lo: Fraction
    hi: Fraction
    value: complex


@dataclass(frozen=True)
class PolygonCell:
    vertices: tuple[Point, ...]
    value: complex


def _poly_area2(vertices: Sequence[Point]) -> Fraction:
    """Twice the signed shoelace area; positive for counter-clockwise."""
    total = Fraction(0)
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        total += x0 * y1 - x1 * y0
    return total


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _normalize_polygon(vertices: Sequence[Point]) -> tuple[Point, ...] | None:
    """Canonical convex polygon: CCW, no duplicate or collinear vertices,
    starting at the lexicographically smallest vertex.  None if degenerate.
    """
    pts = [(as_fraction(x), as_fraction(y)) for x, y in vertices]
    if len(pts) < 3:
        return None
    if _poly_area2(pts) < 0:
        pts.reverse()
    # Drop consecutive duplicates and collinear vertices until stable.
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        out = []
        n = len(pts)
        for i in range(n):
            prev, cur, nxt = pts[i - 1], pts[i], pts[(i + 1) % n]
            if cur == nxt:
                changed = True
                continue
            if _cross(prev, cur, nxt) == 0:
                changed = True
                continue
            out.append(cur)
        pts = out
    if len(pts) < 3 or _poly_area2(pts) <= 0:
        return None
    start = min(range(len(pts)), key=lambda i: pts[i])
    return tuple(pts[start:] + pts[:start])


def _clip_halfplane(vertices: Sequence[Point], a: Point, b: Point) -> list[Point]:
    """Sutherland-Hodgman step: keep the closed left side of the line a -> b."""
    out: list[Point] = []
    n = len(vertices)
    if n == 0:
        return out
    dx, dy = b[0] - a[0], b[1] - a[1]

    def side(pt: Point) -> Fraction:
        return dx * (pt[1] - a[1]) - dy * (pt[0] - a[0])

    for i in range(n):
        cur, nxt = vertices[i], vertices[(i + 1) % n]
        s_cur, s_nxt = side(cur), side(nxt)
        if s_cur >= 0:
            out.append(cur)
        if (s_cur > 0 > s_nxt) or (s_cur < 0 < s_nxt):
            t = s_cur / (s_cur - s_nxt)
            out.append((cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])))
    return out


def _poly_intersection(p1: Sequence[Point], p2: Sequence[Point]) -> tuple[Point, ...] | None:
    """Exact intersection of two convex polygons (None if measure zero)."""
    result = list(p1)
    n = len(p2)
    for i in range(n):
        result = _clip_halfplane(result, p2[i], p2[(i + 1) % n])
        if not result:
            return None
    return _normalize_polygon(result)


def _poly_difference(p1: Sequence[Point], p2: Sequence[Point]) -> list[tuple[Point, ...]]:
    """p1 minus p2 as disjoint convex pieces (up to measure zero).

    Splits p1 by the supporting lines of p2: the piece outside edge i and
    inside edges 0..i-1 is convex, and the pieces tile the difference.
    """
    pieces: list[tuple[Point, ...]] = []
    remaining = list(p1)
    n = len(p2)
    for i in range(n):
        a, b = p2[i], p2[(i + 1) % n]
        outside = _normalize_polygon(_clip_halfplane(remaining, b, a))
        if outside is not None:
            pieces.append(outside)
        remaining = _clip_halfplane(remaining, a, b)
        if not remaining:
            break
    return pieces


def _interval_overlap(a: IntervalCell, b: IntervalCell) -> Fraction:
    lo = max(a.lo, b.lo)
    hi = min(a.hi, b.hi)
    return hi - lo if hi > lo else Fraction(0)


# ---------------------------------------------------------------------------
# functions

class PiecewiseFunction:
    """Finitely-supported piecewise-constant function, exact geometry."""

    __slots__ = ("dim", "cells")

    def __init__(self, dim: int, cells: Iterable):
        _require_dim(dim)
        kept = []
        for cell in cells:
            if dim == 1:
                if not isinstance(cell, IntervalCell):
                    lo, hi, value = cell
                    cell = IntervalCell(as_fraction(lo), as_fraction(hi), complex(value))
                if cell.hi <= cell.lo or cell.value == 0:
                    continue
            else:
                if not isinstance(cell, PolygonCell):
                    vertices, value = cell
                    cell = PolygonCell(tuple(vertices), complex(value))
                normalized = _normalize_polygon(cell.vertices)
                if normalized is None or cell.value == 0:
                    continue
                cell = PolygonCell(normalized, cell.value)
            kept.append(cell)
        self.dim = dim
        self.cells = tuple(kept)

    def is_zero(self) -> bool:
        return not self.cells

    def measure(self, cell) -> Fraction:
        if self.dim == 1:
            return cell.hi - cell.lo
        return _poly_area2(cell.vertices) / 2

    def norm_sq(self) -> float:
        parts = [
            (c.value.real ** 2 + c.value.imag ** 2) * float(self.measure(c))
            for c in self.cells
        ]
        return math.fsum(parts)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def support_box(self) -> tuple[tuple[Fraction, Fraction], ...] | None:
        """Per-axis bounding box of the support, or None for the zero function."""
        if not self.cells:
            return None
        if self.dim == 1:
            return ((min(c.lo for c in self.cells), max(c.hi for c in self.cells)),)
        xs = [x for c in self.cells for x, _ in c.vertices]
        ys = [y for c in self.cells for _, y in c.vertices]
        return ((min(xs), max(xs)), (min(ys), max(ys)))

    def value_at(self, point) -> complex:
        """Pointwise value (d = 1 only; boundary convention: lo in, hi out)."""
        if self.dim != 1:
            raise UnsupportedDimension("pointwise evaluation is implemented for d = 1")
        x = as_fraction(point)
        for cell in self.cells:
            if cell.lo <= x < cell.hi:
                return cell.value
        return 0j

    def __repr__(self) -> str:
        return f"PiecewiseFunction(dim={self.dim}, cells={len(self.cells)})"


def zero(dim: int = 1) -> PiecewiseFunction:
    return PiecewiseFunction(dim, [])


def indicator_interval(a, b) -> PiecewiseFunction:
    a, b = as_fraction(a), as_fraction(b)
    if not a < b:
        raise InvalidGeometry(f"need a < b for an interval, got [{a}, {b})")
    return PiecewiseFunction(1, [IntervalCell(a, b, 1.0 + 0j)])


def indicator_polygon(vertices: Sequence, value: complex = 1.0 + 0j) -> PiecewiseFunction:
    pts = [(as_fraction(x), as_fraction(y)) for x, y in vertices]
    if len(pts) < 3:
        raise InvalidGeometry("polygon needs at least three vertices")
    if _poly_area2(pts) <= 0:
        raise InvalidGeometry("polygon vertices must be counter-clockwise with positive area")
    n = len(pts)
    for i in range(n):
        if _cross(pts[i], pts[(i + 1) % n], pts[(i + 2) % n]) < 0:
            raise InvalidGeometry("polygon must be convex")
    normalized = _normalize_polygon(pts)
    if normalized is None:
        raise InvalidGeometry("degenerate polygon")
    return PiecewiseFunction(2, [PolygonCell(normalized, complex(value))])


def haar() -> PiecewiseFunction:
    """The mean-zero step wavelet: +1 on [0, 1/2), -1 on [1/2, 1)."""
    half = Fraction(1, 2)
    return PiecewiseFunction(
        1,
        [IntervalCell(Fraction(0), half, 1.0 + 0j), IntervalCell(half, Fraction(1), -1.0 + 0j)],
    )


def random_step(seed: int, cell_count: int = 5, support=None, dim: int = 1) -> PiecewiseFunction:
    """Deterministic pseudo-random step function with rational breakpoints.

    d = 1: `cell_count` adjacent intervals inside `support` (default [0,1)).
    d = 2: a grid of axis-aligned rectangles covering roughly `cell_count`
    cells inside the support box.
    """
    _require_dim(dim)
    rng = random.Random(seed)

    def breakpoints(lo: Fraction, hi: Fraction, n: int) -> list[Fraction]:
        grid = 16 * n
        inner = sorted(rng.sample(range(1, grid), n - 1)) if n > 1 else []
        return [lo] + [lo + (hi - lo) * Fraction(t, grid) for t in inner] + [hi]

    if dim == 1:
        lo, hi = support if support is not None else (0, 1)
        pts = breakpoints(as_fraction(lo), as_fraction(hi), cell_count)
        cells = [
            IntervalCell(pts[i], pts[i + 1], complex(rng.gauss(0, 1), rng.gauss(0, 1)))
            for i in range(cell_count)
        ]
        return PiecewiseFunction(1, cells)

    (xlo, xhi), (ylo, yhi) = support if support is not None else ((0, 1), (0, 1))
    nx = max(1, int(math.isqrt(cell_count)))
    ny = max(1, -(-cell_count // nx))
    xs = breakpoints(as_fraction(xlo), as_fraction(xhi), nx)
    ys = breakpoints(as_fraction(ylo), as_fraction(yhi), ny)
    cells = []
    produced = 0
    for iy in range(ny):
        for ix in range(nx):
            if produced == cell_count:
                break
            rect = (
                (xs[ix], ys[iy]),
                (xs[ix + 1], ys[iy]),
                (xs[ix + 1], ys[iy + 1]),
                (xs[ix], ys[iy + 1]),
            )
            cells.append(PolygonCell(rect, complex(rng.gauss(0, 1), rng.gauss(0, 1))))
            produced += 1
    return PiecewiseFunction(2, cells)


# ---------------------------------------------------------------------------
# the unitaries

def _transform(
    f: PiecewiseFunction, matrix: RatMatrix | None, shift: RatVec | None, factor: complex
) -> PiecewiseFunction:
    """Map every region by x -> A x + t exactly and scale values by `factor`."""
    if f.dim == 1:
        a = matrix.rows[0][0] if matrix is not None else Fraction(1)
        t = shift[0] if shift is not None else Fraction(0)
        cells = []
        for cell in f.cells:
            lo, hi = a * cell.lo + t, a * cell.hi + t
            if lo > hi:
                lo, hi = hi, lo
            cells.append(IntervalCell(lo, hi, factor * cell.value))
        return PiecewiseFunction(1, cells)
    t = shift if shift is not None else (Fraction(0), Fraction(0))
    cells = []
    for cell in f.cells:
        if matrix is None:
            vertices = tuple((x + t[0], y + t[1]) for x, y in cell.vertices)
        else:
            vertices = tuple(
                (img[0] + t[0], img[1] + t[1])
                for img in (matrix.apply(v) for v in cell.vertices)
            )
        cells.append(PolygonCell(vertices, factor * cell.value))
    return PiecewiseFunction(2, cells)


def _det_power_sqrt(det: int, j: int) -> float:
    """|det|^{j/2}, computed from the exact rational |det|^j."""
    return math.sqrt(float(Fraction(abs(det)) ** j))


def dilate(f: PiecewiseFunction, m: IntMatrix, j: int = 1) -> PiecewiseFunction:
    """j-th power of the dilation unitary: x -> |det M|^{j/2} f(M^j x)."""
    if f.dim != m.dim:
        raise ShapeMismatch("dilation matrix dimension does not match the function")
    if j == 0:
        return f
    return _transform(f, m.power_rational(-j), None, _det_power_sqrt(m.det(), j))


def translate(f: PiecewiseFunction, u) -> PiecewiseFunction:
    """Translation unitary: f(x - u), exact rational shift."""
    return _transform(f, None, as_ratvec(u, f.dim), 1.0 + 0j)


def scale_p(f: PiecewiseFunction, p_matrix: IntMatrix) -> PiecewiseFunction:
    """Rescaling unitary: sqrt(|det P|) f(P x)."""
    if f.dim != p_matrix.dim:
        raise ShapeMismatch("scaling matrix dimension does not match the function")
    det = p_matrix.det()
    if det == 0:
        raise InvalidGeometry("scaling matrix must be invertible")
    return _transform(f, p_matrix.inverse(), None, math.sqrt(abs(det)))


def scale_values(f: PiecewiseFunction, c: complex) -> PiecewiseFunction:
    """Multiply all values by the scalar c (amplitude operator)."""
    if c == 1:
        return f
    if f.dim == 1:
        return PiecewiseFunction(1, [IntervalCell(x.lo, x.hi, c * x.value) for x in f.cells])
    return PiecewiseFunction(2, [PolygonCell(x.vertices, c * x.value) for x in f.cells])


@dataclass(frozen=True)
class AffineUnitary:
    """Descriptor for one of the unitaries preserving the model.

    kind is one of 'dilation', 'translation', 'scale', 'amplitude'.
    Apply a pipeline with `apply_sequence` (first descriptor acts first).
    """

    kind: str
    matrix: IntMatrix | None = None
    power: int = 1
    shift: RatVec | None = None
    factor: complex = 1.0 + 0j

    @classmethod
    def dilation(cls, m: IntMatrix, j: int = 1) -> "AffineUnitary":
        return cls(kind="dilation", matrix=m, power=j)

    @classmethod
    def translation(cls, u, dim: int) -> "AffineUnitary":
        return cls(kind="translation", shift=as_ratvec(u, dim))

    @classmethod
    def scaling(cls, p_matrix: IntMatrix) -> "AffineUnitary":
        return cls(kind="scale", matrix=p_matrix)

    @classmethod
    def amplitude(cls, c: complex) -> "AffineUnitary":
        return cls(kind="amplitude", factor=complex(c))

    def apply(self, f: PiecewiseFunction) -> PiecewiseFunction:
        if self.kind == "dilation":
            return dilate(f, self.matrix, self.power)
        if self.kind == "translation":
            return translate(f, self.shift)
        if self.kind == "scale":
            return scale_p(f, self.matrix)
        if self.kind == "amplitude":
            return scale_values(f, self.factor)
        raise ValueError(f"unknown unitary kind {self.kind!r}")


def apply_sequence(ops: Sequence[AffineUnitary], f: PiecewiseFunction) -> PiecewiseFunction:
    for op in ops:
        f = op.apply(f)
    return f


# ---------------------------------------------------------------------------
# inner products, sums, comparisons

def inner_product(f: PiecewiseFunction, g: PiecewiseFunction) -> complex:
    """Exact-geometry inner product: sum of v_f conj(v_g) |R_f ^ R_g|.

    Intersection measures are exact rationals; only the final per-pair
    products are doubles, accumulated with compensated summation.
    """
    if f.dim != g.dim:
        raise ShapeMismatch("inner product requires matching dimensions")
    re_parts: list[float] = []
    im_parts: list[float] = []
    if f.dim == 1:
        for cf in f.cells:
            for cg in g.cells:
                w = _interval_overlap(cf, cg)
                if w:
                    z = cf.value * cg.value.conjugate() * float(w)
                    re_parts.append(z.real)
                    im_parts.append(z.imag)
    else:
        for cf in f.cells:
            for cg in g.cells:
                inter = _poly_intersection(cf.vertices, cg.vertices)
                if inter is not None:
                    w = _poly_area2(inter) / 2
                    if w:
                        z = cf.value * cg.value.conjugate() * float(w)
                        re_parts.append(z.real)
                        im_parts.append(z.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def norm(f: PiecewiseFunction) -> float:
    return f.norm()


def add(f: PiecewiseFunction, g: PiecewiseFunction) -> PiecewiseFunction:
    """Pointwise sum, refining the two exact partitions."""
    if f.dim != g.dim:
        raise ShapeMismatch("sum requires matching dimensions")
    if f.is_zero():
        return g
    if g.is_zero():
        return f
    if f.dim == 1:
        pts = sorted({c.lo for c in f.cells} | {c.hi for c in f.cells}
                     | {c.lo for c in g.cells} | {c.hi for c in g.cells})
        cells = []
        for lo, hi in zip(pts, pts[1:]):
            mid = (lo + hi) / 2
            v = f.value_at(mid) + g.value_at(mid)
            if v != 0:
                cells.append(IntervalCell(lo, hi, v))
        return PiecewiseFunction(1, cells)
    # d = 2: insert g's cells one at a time, keeping the partition disjoint.
    current: list[PolygonCell] = list(f.cells)
    for new in g.cells:
        updated: list[PolygonCell] = []
        for old in current:
            inter = _poly_intersection(old.vertices, new.vertices)
            if inter is None:
                updated.append(old)
                continue
            updated.append(PolygonCell(inter, old.value + new.value))
            for piece in _poly_difference(old.vertices, new.vertices):
                updated.append(PolygonCell(piece, old.value))
        remainder = [new.vertices]
        for old in current:
            remainder = [
                q for piece in remainder for q in _poly_difference(piece, old.vertices)
            ]
            if not remainder:
                break
        for piece in remainder:
            updated.append(PolygonCell(piece, new.value))
        current = updated
    return PiecewiseFunction(2, current)


def linear_combination(
    coeffs: Sequence[complex], funcs: Sequence[PiecewiseFunction]
) -> PiecewiseFunction:
    if len(coeffs) != len(funcs):
        raise ShapeMismatch("one coefficient per function required")
    if not funcs:
        raise ValueError("empty combination")
    acc = zero(funcs[0].dim)
    for c, f in zip(coeffs, funcs):
        if c != 0:
            acc = add(acc, scale_values(f, c))
    return acc


def sup_distance(f: PiecewiseFunction, g: PiecewiseFunction) -> float:
    """Essential sup of |f - g|, via exact pairwise overlap bookkeeping.

    Wherever cells overlap (positive measure) the values are compared;
    whatever part of a cell is not covered by the other function must have
    value close to zero.  No tolerance enters the geometry.
    """
    if f.dim != g.dim:
        raise ShapeMismatch("distance requires matching dimensions")

    def pair_measure(cf, cg) -> Fraction:
        if f.dim == 1:
            return _interval_overlap(cf, cg)
        inter = _poly_intersection(cf.vertices, cg.vertices)
        return _poly_area2(inter) / 2 if inter is not None else Fraction(0)

    worst = 0.0
    for cf in f.cells:
        covered = Fraction(0)
        for cg in g.cells:
            w = pair_measure(cf, cg)
            if w:
                worst = max(worst, abs(cf.value - cg.value))
                covered += w
        if f.measure(cf) > covered:
            worst = max(worst, abs(cf.value))
    for cg in g.cells:
        covered = Fraction(0)
        for cf in f.cells:
            covered += pair_measure(cf, cg)
        if g.measure(cg) > covered:
            worst = max(worst, abs(cg.value))
    return worst


def canonicalize(f: PiecewiseFunction, value_tol: float = 1e-12) -> PiecewiseFunction:
    """Canonical form for a.e.-equality checks: sorted cells, zero cells
    pruned, adjacent equal-valued intervals merged (d = 1).

    d = 2 cells are individually normalized and sorted but not merged
    across cells; use `sup_distance` for robust equality there.
    """
    if f.dim == 1:
        cells = sorted(f.cells, key=lambda c: (c.lo, c.hi))
        merged: list[IntervalCell] = []
        for cell in cells:
            if merged and merged[-1].hi == cell.lo and abs(merged[-1].value - cell.value) <= value_tol:
                merged[-1] = IntervalCell(merged[-1].lo, cell.hi, merged[-1].value)
            else:
                merged.append(cell)
        return PiecewiseFunction(1, merged)
    cells = sorted(f.cells, key=lambda c: c.vertices)
    return PiecewiseFunction(2, cells)


def breakpoints(f: PiecewiseFunction) -> list[Fraction]:
    """Sorted distinct interval endpoints (d = 1 only)."""
    if f.dim != 1:
        raise UnsupportedDimension("breakpoints are defined for d = 1")
    return sorted({c.lo for c in f.cells} | {c.hi for c in f.cells})


# ---------------------------------------------------------------------------
# literals and JSON

def _parse_complex(token: str) -> complex:
    return complex(token.replace(" ", ""))


def parse_function(text: str) -> PiecewiseFunction:
    """Parse a function literal (see module docstring for the grammar)."""
    text = text.strip()
    if text == "haar":
        return haar()
    if text == "zero":
        return zero(1)
    if text.startswith("chi:"):
        a, b = text[4:].split(",")
        return indicator_interval(Fraction(a), Fraction(b))
    if text.startswith("steps:"):
        toks = text[6:].split(",")
        if len(toks) < 3 or len(toks) % 2 == 0:
            raise InvalidGeometry("steps literal needs b0,v0,...,b[n] with n >= 1")
        pts = [Fraction(toks[i]) for i in range(0, len(toks), 2)]
        vals = [_parse_complex(toks[i]) for i in range(1, len(toks), 2)]
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise InvalidGeometry("steps breakpoints must be strictly increasing")
        return PiecewiseFunction(
            1, [IntervalCell(a, b, v) for a, b, v in zip(pts, pts[1:], vals)]
        )
    if text.startswith("poly:"):
        body = text[5:]
        value = 1.0 + 0j
        if "=" in body:
            body, value_text = body.rsplit("=", 1)
            value = _parse_complex(value_text)
        vertices = []
        for pair in body.split(";"):
            x, y = pair.split(",")
            vertices.append((Fraction(x), Fraction(y)))
        return indicator_polygon(vertices, value)
    if text.startswith("random:"):
        n, seed = text[7:].split(",")
        return random_step(int(seed), int(n))
    raise InvalidGeometry(f"unrecognized function literal: {text!r}")


def function_to_json(f: PiecewiseFunction) -> dict:
    """Exact JSON form: rationals as strings, values as [re, im]."""
    if f.dim == 1:
        cells = [
            {"lo": str(c.lo), "hi": str(c.hi), "value": [c.value.real, c.value.imag]}
            for c in f.cells
        ]
    else:
        cells = [
            {
                "vertices": [[str(x), str(y)] for x, y in c.vertices],
                "value": [c.value.real, c.value.imag],
            }
            for c in f.cells
        ]
    return {"dim": f.dim, "cells": cells}


def function_from_json(obj: dict) -> PiecewiseFunction:
    dim = obj["dim"]
    _require_dim(dim)
    if dim == 1:
        cells = [
            IntervalCell(
                Fraction(c["lo"]), Fraction(c["hi"]), complex(c["value"][0], c["value"][1])
            )
            for c in obj["cells"]
        ]
    else:
        cells = [
            PolygonCell(
                tuple((Fraction(x), Fraction(y)) for x, y in c["vertices"]),
                complex(c["value"][0], c["value"][1]),
            )
            for c in obj["cells"]
        ]
    return PiecewiseFunction(dim, cells)

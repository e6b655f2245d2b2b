"""Finite unions of half-open (possibly sheared) boxes and lattice folding.

A :class:`Cell` with integer shear ``s`` is the point set
``{(x, y + s*x) : (x, y) in base}``.  Every computation maps the cells to their
"box frame" by the inverse shear, where they become axis-parallel boxes, and
maps lattices along with them.

Coordinates are :class:`~fractions.Fraction` (exact mode) or ``float``
(epsilon mode, used whenever an irrational parameter is involved).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (BadInput, ConvergenceFailure, HypothesisViolation, MixedShear,
                     ToleranceExceeded, Unreducible)
from .numerics import Irrational, Mat2, crt_translate_index, xgcd

__all__ = [
    "Box", "Cell", "Region", "FoldLattice", "EPS_COORD", "num", "shear_of",
    "translate", "tiles_by", "packs_by", "fold_region", "overlap_measure",
    "subtract", "intersect_regions", "sym_diff_measure", "equivalent_rebuild",
    "RebuildResult", "unit_square", "region_to_svg",
]

EPS_COORD = 1e-9
_TINY = 1e-12


def num(x):
    """Normalize a coordinate: ints and Fractions stay exact, everything else is float."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    if isinstance(x, Irrational):
        return float(x)
    return float(x)


def _exact(*xs) -> bool:
    return all(isinstance(x, Fraction) for x in xs)


@dataclass(frozen=True)
class Box:
    """Half-open box ``[x0, x1) x [y0, y1)``."""

    x0: object
    x1: object
    y0: object
    y1: object

    @classmethod
    def of(cls, x0, x1, y0, y1) -> "Box":
        b = cls(num(x0), num(x1), num(y0), num(y1))
        if not (b.x0 < b.x1 and b.y0 < b.y1):
            raise BadInput(f"empty box {b}")
        return b

    @property
    def w(self):
        return self.x1 - self.x0

    @property
    def h(self):
        return self.y1 - self.y0

    @property
    def area(self):
        return self.w * self.h

    @property
    def exact(self) -> bool:
        return _exact(self.x0, self.x1, self.y0, self.y1)

    def shift(self, dx, dy) -> "Box":
        return Box(self.x0 + dx, self.x1 + dx, self.y0 + dy, self.y1 + dy)

    def intersect(self, o: "Box", tol=0) -> "Box | None":
        x0, x1 = max(self.x0, o.x0), min(self.x1, o.x1)
        y0, y1 = max(self.y0, o.y0), min(self.y1, o.y1)
        if x1 - x0 <= tol or y1 - y0 <= tol:
            return None
        return Box(x0, x1, y0, y1)

    def minus(self, o: "Box", tol=0) -> list["Box"]:
        """``self \\ o`` as at most four boxes."""
        c = self.intersect(o, tol)
        if c is None:
            return [self]
        out = []
        if c.y0 - self.y0 > tol:
            out.append(Box(self.x0, self.x1, self.y0, c.y0))
        if self.y1 - c.y1 > tol:
            out.append(Box(self.x0, self.x1, c.y1, self.y1))
        if c.x0 - self.x0 > tol:
            out.append(Box(self.x0, c.x0, c.y0, c.y1))
        if self.x1 - c.x1 > tol:
            out.append(Box(c.x1, self.x1, c.y0, c.y1))
        return out

    def contains(self, x, y) -> bool:
        return self.x0 <= x < self.x1 and self.y0 <= y < self.y1

    def as_list(self):
        return [self.x0, self.x1, self.y0, self.y1]


@dataclass(frozen=True)
class Cell:
    """Sheared box: the image of ``base`` under ``[[1, 0], [shear, 1]]``."""

    base: Box
    shear: int = 0

    @property
    def measure(self):
        return self.base.area

    @property
    def shear_matrix(self) -> Mat2:
        return Mat2.of([[1, 0], [self.shear, 1]])

    def contains(self, pt) -> bool:
        x, y = pt
        return self.base.contains(x, y - self.shear * x)

    def translate(self, v) -> "Cell":
        vx, vy = num(v[0]), num(v[1])
        return Cell(self.base.shift(vx, vy - self.shear * vx), self.shear)


@dataclass(frozen=True)
class Region:
    """A finite union of pairwise disjoint cells."""

    cells: tuple = ()

    @classmethod
    def of(cls, cells: Iterable[Cell]) -> "Region":
        return cls(tuple(cells))

    @classmethod
    def boxes(cls, boxes: Iterable[Box], shear: int = 0) -> "Region":
        return cls(tuple(Cell(b, shear) for b in boxes))

    @property
    def measure(self):
        total = Fraction(0)
        for c in self.cells:
            total = total + c.measure
        return total

    @property
    def exact(self) -> bool:
        return all(c.base.exact for c in self.cells)

    @property
    def empty(self) -> bool:
        return not self.cells

    def translate(self, v) -> "Region":
        return Region(tuple(c.translate(v) for c in self.cells))

    def __or__(self, other: "Region") -> "Region":
        return Region(self.cells + other.cells)

    def contains(self, pt) -> bool:
        return any(c.contains(pt) for c in self.cells)

    def frame_boxes(self, shear: int | None = None) -> list[Box]:
        s = shear_of(self) if shear is None else shear
        for c in self.cells:
            if c.shear != s:
                raise MixedShear(f"cells with shears {c.shear} and {s}")
        return [c.base for c in self.cells]

    def bbox(self):
        """Bounding box of the point set (original coordinates, as floats)."""
        xs, ys = [], []
        for c in self.cells:
            b = c.base
            for x in (b.x0, b.x1):
                for y in (b.y0, b.y1):
                    xs.append(float(x))
                    ys.append(float(y + c.shear * x))
        return min(xs), max(xs), min(ys), max(ys)


def unit_square(shear: int = 0) -> Region:
    return Region((Cell(Box.of(0, 1, 0, 1), shear),))


def shear_of(*regions) -> int:
    """The common shear of all cells, 0 for empty input; MixedShear otherwise."""
    shears = {c.shear for r in regions for c in r.cells}
    if len(shears) > 1:
        raise MixedShear(f"mixed shears {sorted(shears)}")
    return shears.pop() if shears else 0


def translate(reg: Region, v) -> Region:
    return reg.translate(v)


# ---------------------------------------------------------------------------
# lattices in the box frame
# ---------------------------------------------------------------------------

def frame_matrix(shear: int) -> Mat2:
    """Inverse shear, mapping original coordinates to the box frame."""
    return Mat2.of([[1, 0], [-shear, 1]])


class FoldLattice:
    """A planar lattice with a triangular basis ``(u, 0), (w, v)``.

    ``basis`` holds the lattice generators as columns, already expressed in
    the box frame.  The fundamental domain used for folding is
    ``[0, u) x [0, v)``.
    """

    def __init__(self, basis: Mat2):
        self.basis = basis
        self.exact = basis.is_rational()
        self.tol = 0 if self.exact else _TINY
        if self.exact:
            self.u, self.w, self.v = _hermite(basis)
        else:
            self.u, self.w, self.v = _float_triangular(basis)

    @property
    def det(self):
        return self.u * self.v

    def fold_box(self, b: Box) -> list[Box]:
        u, w, v, tol = self.u, self.w, self.v, self.tol
        out = []
        for j in range(math.floor(b.y0 / v), math.ceil(b.y1 / v)):
            ya, yb = max(b.y0, j * v), min(b.y1, (j + 1) * v)
            if yb - ya <= tol:
                continue
            xa, xb = b.x0 - j * w, b.x1 - j * w
            ya, yb = ya - j * v, yb - j * v
            for i in range(math.floor(xa / u), math.ceil(xb / u)):
                xa2, xb2 = max(xa, i * u), min(xb, (i + 1) * u)
                if xb2 - xa2 <= tol:
                    continue
                out.append(Box(xa2 - i * u, xb2 - i * u, ya, yb))
        return out

    def fold(self, boxes: Iterable[Box]) -> list[Box]:
        out = []
        for b in boxes:
            out.extend(self.fold_box(b))
        return out

    def points_in(self, xlo, xhi, ylo, yhi) -> list[tuple]:
        """Lattice points strictly inside the open box ``(xlo, xhi) x (ylo, yhi)``."""
        u, w, v = self.u, self.w, self.v
        pts = []
        for j in range(math.floor(ylo / v), math.ceil(yhi / v) + 1):
            y = j * v
            if not (ylo < y < yhi):
                continue
            off = j * w
            for i in range(math.floor((xlo - off) / u), math.ceil((xhi - off) / u) + 1):
                x = i * u + off
                if xlo < x < xhi:
                    pts.append((x, y))
        return pts

    def contains_vector(self, vec) -> bool:
        x, y = vec
        j = y / self.v
        if self.exact:
            if Fraction(j).denominator != 1:
                return False
            i = (x - int(j) * self.w) / self.u
            return Fraction(i).denominator == 1
        jr = round(float(j))
        if abs(float(j) - jr) > 1e-9:
            return False
        i = (x - jr * self.w) / self.u
        return abs(float(i) - round(float(i))) <= 1e-9


def _hermite(M: Mat2):
    den = math.lcm(*(Fraction(x).denominator for x in (M.a, M.b, M.c, M.d)))
    a, b, c, d = (int(Fraction(x) * den) for x in (M.a, M.b, M.c, M.d))
    g, s, t = xgcd(c, d)
    # column operation U = [[d/g, s], [-c/g, t]] clears the lower-left entry
    u = abs(a * (d // g) - b * (c // g))
    w = a * s + b * t
    v = g
    w %= u
    return Fraction(u, den), Fraction(w, den), Fraction(v, den)


def _float_triangular(M: Mat2):
    (a, b), (c, d) = M.to_floats()
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= 1e-15 * scale:
        u, w, v = abs(a), b, d
    elif abs(d) <= 1e-15 * scale:
        u, w, v = abs(b), a, c
    else:
        raise Unreducible("irrational lattice without a horizontal generator")
    if v < 0:
        w, v = -w, -v
    return u, w % u, v


def lattice_in_frame(lat: Mat2, shear: int) -> FoldLattice:
    return FoldLattice(frame_matrix(shear) @ lat)


# ---------------------------------------------------------------------------
# box-list set algebra
# ---------------------------------------------------------------------------

def _tol(boxes) -> float:
    return 0 if all(b.exact for b in boxes) else _TINY


def overlap_measure(boxes: Sequence[Box]):
    """Sum of pairwise intersection areas."""
    bs = sorted(boxes, key=lambda b: b.x0)
    tol = _tol(bs)
    total = Fraction(0) if tol == 0 else 0.0
    for i, a in enumerate(bs):
        for b in bs[i + 1:]:
            if b.x0 >= a.x1:
                break
            c = a.intersect(b, tol)
            if c is not None:
                total += c.area
    return total


def subtract(A: Sequence[Box], B: Sequence[Box], tol=None) -> list[Box]:
    """``union(A) \\ union(B)`` as a list of disjoint boxes (A assumed disjoint)."""
    if tol is None:
        tol = _tol(list(A) + list(B))
    out = list(A)
    for b in B:
        nxt = []
        for a in out:
            nxt.extend(a.minus(b, tol))
        out = nxt
    return out


def intersect_regions(A: Sequence[Box], B: Sequence[Box]) -> list[Box]:
    tol = _tol(list(A) + list(B))
    out = []
    for a in A:
        for b in B:
            c = a.intersect(b, tol)
            if c is not None:
                out.append(c)
    return out


def total_area(boxes: Iterable[Box]):
    total = Fraction(0)
    for b in boxes:
        total = total + b.area
    return total


def sym_diff_measure(A: Sequence[Box], B: Sequence[Box]):
    return total_area(subtract(A, B)) + total_area(subtract(B, A))


def fold_region(reg: Region, lat: Mat2, shear: int | None = None) -> tuple[list[Box], FoldLattice]:
    s = shear_of(reg) if shear is None else shear
    fl = lattice_in_frame(lat, s)
    return fl.fold(reg.frame_boxes(s)), fl


def _judge(defect, eps) -> bool:
    if eps is None:
        return defect == 0
    d = float(defect)
    if d <= eps:
        return True
    if d < 10 * eps:
        raise ToleranceExceeded(f"defect {d:.3e} is in the ambiguous band ({eps:g}, {10 * eps:g})")
    return False


def _mode_eps(reg: Region, lat: Mat2, eps):
    if eps is None and not (reg.exact and lat.is_rational()):
        return EPS_COORD
    return eps


def tiles_by(reg: Region, lat: Mat2, eps: float | None = None) -> bool:
    """True iff the lattice translates of ``reg`` partition the plane."""
    eps = _mode_eps(reg, lat, eps)
    pieces, fl = fold_region(reg, lat)
    defect = overlap_measure(pieces) + abs(total_area(pieces) - fl.det)
    return _judge(defect, eps)


def packs_by(reg: Region, lat: Mat2, eps: float | None = None) -> bool:
    """True iff the lattice translates of ``reg`` are pairwise disjoint."""
    eps = _mode_eps(reg, lat, eps)
    pieces, _ = fold_region(reg, lat)
    return _judge(overlap_measure(pieces), eps)


def disjoint(*regions: Region, eps: float | None = None) -> bool:
    boxes = [b for r in regions for b in r.frame_boxes(shear_of(*regions))]
    if eps is None and not all(b.exact for b in boxes):
        eps = EPS_COORD
    return _judge(overlap_measure(boxes), eps)


# ---------------------------------------------------------------------------
# equivalence rebuild
# ---------------------------------------------------------------------------

@dataclass
class RebuildResult:
    """Output of :func:`equivalent_rebuild`.

    ``region`` is C''; ``moves`` lists ``(piece, l)`` with ``piece + l`` in C'';
    ``defect`` is the K-fold measure defect (0 in CRT mode); ``leftover`` the
    measure of pieces that could not be placed.
    """

    region: Region
    moves: list
    defect: object
    leftover: object
    iterations: int = 0


def equivalent_rebuild(C: Region, Cp: Region, L: Mat2, K: Mat2, mode: str = "exact-CRT",
                       eps: float = 1e-3, eta: float = 1e-5, max_iter: int = 10_000,
                       max_coef: int = 2_000_000) -> RebuildResult:
    """Build C'' that is L-equivalent to C and K-equivalent to (a subset of) C'.

    ``mode="exact-CRT"`` needs a diagonal rational ``K = diag(m1/n1, m2/n2)``
    in the box frame and grid cells of size ``1/n1 x 1/n2``; cells are paired in
    sorted order.  ``mode="dense-approx"`` runs a greedy cut-and-translate
    search over ``M = L + K`` and leaves at most ``eps/2`` of measure unplaced.
    """
    s = shear_of(C, Cp)
    A, B = C.frame_boxes(s), Cp.frame_boxes(s)
    Lf = lattice_in_frame(L, s)
    Kf = frame_matrix(s) @ K
    if Lf.u != 1 or Lf.v != 1:
        raise HypothesisViolation("rebuild expects L = Z^2 in the box frame")
    if not A:
        return RebuildResult(Region(), [], Fraction(0), Fraction(0))
    if subtract(A, B) == [] and subtract(B, A) == []:
        return RebuildResult(C, [(b, (0, 0)) for b in A], Fraction(0), Fraction(0))
    if mode == "exact-CRT":
        return _rebuild_crt(A, B, Kf, s)
    if mode == "dense-approx":
        return _rebuild_dense(A, B, Kf, s, eps, eta, max_iter, max_coef)
    raise BadInput(f"unknown rebuild mode {mode!r}")


def _diag_params(Kf: Mat2):
    if not Kf.is_diagonal():
        kl = FoldLattice(Kf)
        if kl.w != 0:
            raise HypothesisViolation("rebuild needs a rectangular K lattice in the box frame")
        return kl.u, kl.v
    return abs(num(Kf.a)), abs(num(Kf.d))


def _grid_index(b: Box, n1: int, n2: int):
    a, c = b.x0 * n1, b.y0 * n2
    if (b.w * n1 != 1 or b.h * n2 != 1 or Fraction(a).denominator != 1
            or Fraction(c).denominator != 1):
        return None
    return int(a), int(c)


def _to_grid(boxes, n1, n2):
    cells = []
    for b in boxes:
        if not b.exact:
            raise HypothesisViolation("CRT rebuild needs rational cells")
        # split into unit grid cells
        xs0, xs1 = b.x0 * n1, b.x1 * n1
        ys0, ys1 = b.y0 * n2, b.y1 * n2
        if any(Fraction(t).denominator != 1 for t in (xs0, xs1, ys0, ys1)):
            raise HypothesisViolation(f"{b} is not aligned to the 1/{n1} x 1/{n2} grid")
        for i in range(int(xs0), int(xs1)):
            for j in range(int(ys0), int(ys1)):
                cells.append((i, j))
    return sorted(cells)


def _rebuild_crt(A, B, Kf, s) -> RebuildResult:
    r1, r2 = _diag_params(Kf)
    if not (isinstance(r1, Fraction) and isinstance(r2, Fraction)):
        raise HypothesisViolation("CRT rebuild needs rational K")
    m1, n1 = r1.numerator, r1.denominator
    m2, n2 = r2.numerator, r2.denominator
    ca = _to_grid(A, n1, n2)
    cb = _to_grid(B, n1, n2)
    if len(cb) < len(ca):
        raise HypothesisViolation(f"{len(ca)} cells to place but only {len(cb)} free K-cells")
    moves, out = [], []
    for (a, b), (a2, b2) in zip(ca, cb):
        # a" = a (mod n1), a" = a2 (mod m1), likewise in y
        ax = crt_translate_index(a % n1, n1, a2 % m1, m1)
        by = crt_translate_index(b % n2, n2, b2 % m2, m2)
        box = Box(Fraction(ax, n1), Fraction(ax + 1, n1), Fraction(by, n2), Fraction(by + 1, n2))
        src = Box(Fraction(a, n1), Fraction(a + 1, n1), Fraction(b, n2), Fraction(b + 1, n2))
        l = (box.x0 - src.x0, box.y0 - src.y0)
        moves.append((src, l))
        out.append(Cell(box, 0))
    region = _frame_to_region(out, s)
    return RebuildResult(region, moves, Fraction(0), Fraction(0), len(moves))


def _frame_to_region(frame_cells, s) -> Region:
    return Region(tuple(Cell(c.base, s) for c in frame_cells))


def _search_1d(lo: float, hi: float, r, max_coef: int):
    """Integers (i, j) with ``lo <= i + j*r <= hi`` and smallest |j|, or None."""
    if isinstance(r, Fraction):
        limit = min(max_coef, r.denominator + 1)
    else:
        limit = max_coef
    rf = float(r)
    J = 64
    while True:
        J = min(J, limit)
        js = np.arange(-J, J + 1, dtype=np.float64)
        i = np.ceil(lo - js * rf - 1e-12)
        val = i + js * rf
        ok = np.nonzero(val <= hi + 1e-12)[0]
        if ok.size:
            best = ok[np.argmin(np.abs(js[ok]))]
            return int(i[best]), int(js[best])
        if J >= limit:
            return None
        J *= 8


def _rebuild_dense(A, B, Kf, s, eps, eta, max_iter, max_coef) -> RebuildResult:
    r1, r2 = _diag_params(Kf)
    rational = (isinstance(r1, Fraction), isinstance(r2, Fraction))
    A = [_fbox(b) for b in A]
    B = [_fbox(b) for b in B]
    pending = sorted(A, key=lambda b: -b.area)
    free = list(B)
    placed, moves, leftover = [], [], []
    it = 0
    tol = 1e-12
    while pending:
        if sum(b.area for b in pending) <= eps / 2:
            break
        it += 1
        if it > max_iter:
            raise ConvergenceFailure(f"unplaced measure {sum(b.area for b in pending):.3e} after {max_iter} steps")
        a = pending.pop(0)
        if not free:
            leftover.append(a)
            continue
        b = max(free, key=lambda f: min(a.w, f.w) * min(a.h, f.h))
        w, h = min(a.w, b.w), min(a.h, b.h)
        # dense directions need slack to find a lattice offset
        if not rational[0] and b.w - w < eta:
            w = b.w - eta
        if not rational[1] and b.h - h < eta:
            h = b.h - eta
        if w <= eta or h <= eta:
            leftover.append(a)
            continue
        part = Box(a.x0, a.x0 + w, a.y0, a.y0 + h)
        rest = a.minus(part, tol)
        mx = _search_1d(b.x0 - a.x0, b.x0 - a.x0 + (b.w - w), r1, max_coef)
        my = _search_1d(b.y0 - a.y0, b.y0 - a.y0 + (b.h - h), r2, max_coef)
        if mx is None or my is None:
            leftover.append(a)
            continue
        l = (float(mx[0]), float(my[0]))
        m = (mx[0] + mx[1] * float(r1), my[0] + my[1] * float(r2))
        target = part.shift(*m)
        free.remove(b)
        free.extend(b.minus(target, tol))
        pending.extend(rest)
        pending.sort(key=lambda q: -q.area)
        moves.append((part, l))
        placed.append(Cell(part.shift(*l), 0))
    leftover.extend(pending)
    cells = placed + [Cell(b, 0) for b in leftover]
    left = sum(b.area for b in leftover)
    # audit the K-fold: overlap among folded pieces plus anything outside B
    kl = FoldLattice(Kf)
    folded = kl.fold(c.base for c in cells)
    defect = overlap_measure(folded) + total_area(subtract(folded, B, _TINY))
    return RebuildResult(_frame_to_region(cells, s), moves, float(defect), float(left), it)


def _fbox(b: Box) -> Box:
    return Box(float(b.x0), float(b.x1), float(b.y0), float(b.y1))


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_PALETTE = ["#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377", "#bbbbbb", "#000000"]


def region_to_svg(named: dict, size: int = 480, pad: float = 0.25) -> str:
    """Render named regions as an SVG document (sheared cells drawn as polygons)."""
    polys = []
    xs, ys = [], []
    for idx, (name, reg) in enumerate(named.items()):
        color = _PALETTE[idx % len(_PALETTE)]
        for c in reg.cells:
            b = c.base
            pts = [(float(x), float(y) + c.shear * float(x))
                   for x, y in ((b.x0, b.y0), (b.x1, b.y0), (b.x1, b.y1), (b.x0, b.y1))]
            xs += [p[0] for p in pts]
            ys += [p[1] for p in pts]
            polys.append((name, color, pts))
    if not polys:
        return f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}"/>\n'
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    scale = size / max(x1 - x0, y1 - y0)

    def tx(p):
        return f"{(p[0] - x0) * scale:.3f},{(y1 - p[1]) * scale:.3f}"

    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{(x1 - x0) * scale:.0f}" '
             f'height="{(y1 - y0) * scale:.0f}">']
    for name, color, pts in polys:
        lines.append(f'  <polygon points="{" ".join(tx(p) for p in pts)}" fill="{color}" '
                     f'fill-opacity="0.45" stroke="{color}"><title>{name}</title></polygon>')
    legend_y = 14
    for idx, name in enumerate(named):
        lines.append(f'  <text x="4" y="{legend_y + 14 * idx}" font-size="12" '
                     f'fill="{_PALETTE[idx % len(_PALETTE)]}">{name}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"

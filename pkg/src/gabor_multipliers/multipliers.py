"""Candidate functional multipliers and the cocycle identity.

A multiplier ``h`` is stored as phases (fractions of a full turn, so that
conjugates and products stay exact) on cells, optionally times a character
``x -> exp(2 pi i <c, x>)``.  The identity checked throughout is

    h(x) conj h(x - k) = h(x - l) conj h(x - l - k)

for ``l`` in L and ``k`` in K.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import BadInput, BaseRelationFails, WindowTooSmall
from .numerics import LatticePair, Mat2, as_scalar, is_rational, to_float
from .regions import (Box, Cell, Region, frame_matrix, num, overlap_measure, shear_of, subtract,
                      total_area)

__all__ = ["PhaseFunction", "make_multiplier", "unimodular_check", "cocycle_check",
           "propagate_base_relations", "CheckResult", "witness_matches"]


@dataclass(frozen=True)
class PhaseFunction:
    """Step multiplier on a window (or L-periodic), optionally times a character.

    ``cells`` holds ``(cell, phase, mag2)`` triples: the value on the cell is
    ``sqrt(mag2) * exp(2 pi i phase)``.  With ``periodic=True`` the cells
    partition ``[0,1)^2`` in their box frame and repeat with period ``Z^2``;
    otherwise they partition ``window``.
    """

    cells: tuple = ()
    window: Region | None = None
    periodic: bool = False
    character: tuple | None = None
    witness: dict | None = field(default=None, compare=False)

    @property
    def is_character(self) -> bool:
        return self.character is not None and not self.cells

    @property
    def shear(self) -> int:
        return shear_of(Region(tuple(c for c, _, _ in self.cells)))

    def _grid(self):
        return _StepGrid.build(self)

    def value(self, pt):
        """Exact ``(phase, mag2)`` of the step part at ``pt`` or None outside the window."""
        s = self.shear
        x, y = num(pt[0]), num(pt[1])
        fx, fy = x, y - s * x
        if self.periodic:
            fx, fy = fx - math.floor(fx), fy - math.floor(fy)
        for c, ph, m2 in self.cells:
            if c.base.contains(fx, fy):
                return ph, m2
        return None


class _StepGrid:
    """Rectilinear-grid view of a step multiplier for vectorized lookups."""

    def __init__(self, xs, ys, phase, mag2, defined, Q, periodic):
        self.xs, self.ys = xs, ys
        self.phase, self.mag2, self.defined = phase, mag2, defined
        self.Q, self.periodic = Q, periodic

    @classmethod
    def build(cls, h: PhaseFunction):
        boxes = [c.base for c, _, _ in h.cells]
        xs = sorted({v for b in boxes for v in (b.x0, b.x1)})
        ys = sorted({v for b in boxes for v in (b.y0, b.y1)})
        exact_phase = all(isinstance(p, Fraction) for _, p, _ in h.cells)
        Q = math.lcm(*(p.denominator for _, p, _ in h.cells)) if exact_phase else None
        nx, ny = len(xs) - 1, len(ys) - 1
        phase = np.zeros((nx, ny), dtype=np.int64 if exact_phase else np.float64)
        mag2 = np.empty((nx, ny), dtype=object)
        defined = np.zeros((nx, ny), dtype=bool)
        for ix in range(nx):
            mx = (xs[ix] + xs[ix + 1]) / 2
            for iy in range(ny):
                my = (ys[iy] + ys[iy + 1]) / 2
                for (c, p, m2) in h.cells:
                    if c.base.contains(mx, my):
                        phase[ix, iy] = int(p * Q) % Q if exact_phase else float(p) % 1.0
                        mag2[ix, iy] = m2
                        defined[ix, iy] = True
                        break
        fx = np.array([float(v) for v in xs])
        fy = np.array([float(v) for v in ys])
        return cls(fx, fy, phase, mag2, defined, Q, h.periodic)

    def lookup(self, px, py):
        if self.periodic:
            px, py = np.mod(px, 1.0), np.mod(py, 1.0)
        ix = np.searchsorted(self.xs, px, side="right") - 1
        iy = np.searchsorted(self.ys, py, side="right") - 1
        ok = (ix >= 0) & (ix < len(self.xs) - 1) & (iy >= 0) & (iy < len(self.ys) - 1)
        ixc, iyc = np.clip(ix, 0, len(self.xs) - 2), np.clip(iy, 0, len(self.ys) - 2)
        ok &= self.defined[ixc, iyc]
        return ixc, iyc, ok


@dataclass
class CheckResult:
    passed: bool
    witness: dict | None = None
    checked: int = 0
    note: str = ""

    def to_dict(self) -> dict:
        out = {"pass": self.passed, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def _partition_check(boxes, outer: list[Box]):
    if float(overlap_measure(boxes)) > 0 or subtract(boxes, outer) or subtract(outer, boxes):
        raise BadInput("multiplier cells must partition their domain")


def make_multiplier(kind: str, **kw) -> PhaseFunction:
    """Build a multiplier.

    Kinds
    -----
    ``character``: ``c`` (2-vector of scalars).
    ``periodic_step``: ``phases`` as ``[(box, phase)]`` or ``[(box, phase, mag2)]``
    partitioning ``[0,1)^2``; optional ``shear`` and ``character``.
    ``counterexample``: ``pair`` (LatticePair); optional ``box`` (the sign-flip
    region, default ``[0,1/4) x [0,1)``), ``target`` pair index (default
    ``(2,2)``), ``shear``, ``half_width`` of the square window.
    """
    if kind == "character":
        c = tuple(as_scalar(v) if not isinstance(v, Fraction) else v for v in kw["c"])
        return PhaseFunction(character=c)
    if kind == "periodic_step":
        s = kw.get("shear", 0)
        cells = []
        for entry in kw["phases"]:
            box, ph = entry[0], entry[1]
            m2 = Fraction(entry[2]) if len(entry) > 2 else Fraction(1)
            b = box if isinstance(box, Box) else Box.of(*box)
            cells.append((Cell(b, s), _phase(ph), m2))
        unit = [Box.of(0, 1, 0, 1)]
        _partition_check([c.base for c, _, _ in cells], unit)
        ch = kw.get("character")
        if ch is not None:
            ch = tuple(as_scalar(v) if not isinstance(v, Fraction) else v for v in ch)
        return PhaseFunction(tuple(cells), None, True, ch)
    if kind == "counterexample":
        pair: LatticePair = kw["pair"]
        s = kw.get("shear", 0)
        flip = kw.get("box") or Box.of(0, Fraction(1, 4), 0, 1)
        flip = flip if isinstance(flip, Box) else Box.of(*flip)
        target = tuple(kw.get("target", (2, 2)))
        W = Fraction(kw.get("half_width", 12))
        window = Box.of(-W, W, -W, W)
        cells = [(Cell(flip, s), Fraction(1, 2), Fraction(1))]
        cells += [(Cell(b, s), Fraction(0), Fraction(1)) for b in window.minus(flip)]
        h = PhaseFunction(tuple(cells), Region.boxes([window], s))
        res = cocycle_check(h, pair, 1, pairs=[target])
        if res.passed:
            raise BadInput("the sign-flip pattern does not break the cocycle for the target pair")
        return PhaseFunction(h.cells, h.window, False, None, res.witness)
    raise BadInput(f"unknown multiplier kind {kind!r}")


def _phase(p):
    if isinstance(p, (Fraction, int)) and not isinstance(p, bool):
        return Fraction(p) % 1
    if isinstance(p, str):
        return Fraction(p) % 1
    v = as_scalar(p)
    return v % 1 if isinstance(v, Fraction) else v


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

def unimodular_check(h: PhaseFunction) -> CheckResult:
    """Pass iff ``|h| = 1`` on every cell (characters always pass)."""
    for c, _, m2 in h.cells:
        ok = m2 == 1 if is_rational(m2) else abs(to_float(m2) - 1) <= 1e-12
        if not ok:
            return CheckResult(False, {"cell": c, "mag2": m2}, len(h.cells))
    return CheckResult(True, None, len(h.cells))


def _vec(M: Mat2, coef):
    return (M.a * coef[0] + M.b * coef[1], M.c * coef[0] + M.d * coef[1])


def _combos(R: int, pairs=None):
    """Coefficient tuples ``(m1, m2, n1, n2)``: base pairs first, then the rest by size."""
    base = [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]
    index = {(1, 1): base[0], (1, 2): base[1], (2, 1): base[2], (2, 2): base[3]}
    if pairs is not None:
        return [index[tuple(p)] for p in pairs]
    rng = range(-R, R + 1)
    rest = [c for c in itertools.product(rng, rng, rng, rng)
            if (c[0], c[1]) != (0, 0) and (c[2], c[3]) != (0, 0) and c not in base]
    rest.sort(key=lambda c: (max(map(abs, c)), c))
    return base + rest


def _breaks(xs, offsets, lo, hi, periodic):
    vals = [lo, hi]
    for o in offsets:
        v = xs + o
        if periodic:
            v = np.mod(v, 1.0)
        vals.append(v[(v > lo) & (v < hi)])
    allv = np.unique(np.concatenate([np.atleast_1d(np.asarray(a, dtype=float)) for a in vals]))
    keep = np.concatenate(([True], np.diff(allv) > 1e-12))
    return allv[keep]


def _check_one(h: PhaseFunction, grid: _StepGrid, l, k):
    """First failing point of the identity for one (l, k), None on pass."""
    T = frame_matrix(h.shear)
    lf, kf = T @ l, T @ k
    offs = [(0.0, 0.0), (to_float(kf[0]), to_float(kf[1])), (to_float(lf[0]), to_float(lf[1])),
            (to_float(lf[0] + kf[0]), to_float(lf[1] + kf[1]))]
    if h.periodic:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    else:
        x_lo = max(grid.xs[0] + o[0] for o in offs)
        x_hi = min(grid.xs[-1] + o[0] for o in offs)
        y_lo = max(grid.ys[0] + o[1] for o in offs)
        y_hi = min(grid.ys[-1] + o[1] for o in offs)
        if x_hi - x_lo <= 1e-9 or y_hi - y_lo <= 1e-9:
            raise WindowTooSmall(f"window leaves no room for l={l}, k={k}")
    bx = _breaks(grid.xs, [o[0] for o in offs], x_lo, x_hi, h.periodic)
    by = _breaks(grid.ys, [o[1] for o in offs], y_lo, y_hi, h.periodic)
    mx = (bx[:-1] + bx[1:]) / 2
    my = (by[:-1] + by[1:]) / 2
    PX, PY = np.meshgrid(mx, my, indexing="ij")
    PX, PY = PX.ravel(), PY.ravel()
    vals, ok = [], np.ones(PX.shape, dtype=bool)
    for o in offs:
        ix, iy, good = grid.lookup(PX - o[0], PY - o[1])
        vals.append((ix, iy))
        ok &= good
    if not ok.any():
        raise WindowTooSmall(f"window leaves no room for l={l}, k={k}")
    ph = [grid.phase[ix, iy] for ix, iy in vals]
    d = ph[0] - ph[1] - ph[2] + ph[3]
    if grid.Q is not None:
        bad_phase = (d % grid.Q) != 0
    else:
        r = np.mod(d, 1.0)
        bad_phase = np.minimum(r, 1 - r) > 1e-12
    m = [grid.mag2[ix, iy] for ix, iy in vals]
    bad_mag = m[0] * m[3] != m[1] * m[2]
    bad = ok & (bad_phase | bad_mag.astype(bool))
    if not bad.any():
        return None
    idx = np.nonzero(bad)[0]
    order = np.lexsort((PY[idx], PX[idx]))
    i0 = idx[order[0]]
    s = h.shear
    fx = Fraction(float(PX[i0])).limit_denominator(10**6)
    fy = Fraction(float(PY[i0])).limit_denominator(10**6)
    return (fx, fy + s * fx)


def cocycle_check(h: PhaseFunction, pair: LatticePair, window_radius: int,
                  pairs=None) -> CheckResult:
    """Check the identity for every ``l = m1 l1 + m2 l2``, ``k = n1 k1 + n2 k2``, ``|m|,|n| <= R``.

    Base pairs are tried first; the witness is the first failure in that
    order, at the lexicographically smallest refined-cell midpoint.
    ``pairs`` restricts the check to the listed base pairs.
    """
    if not h.cells:
        return CheckResult(True, None, 0, "character: both sides equal exp(2 pi i <c, k>)")
    note = "character factor cancels exactly" if h.character is not None else ""
    grid = h._grid()
    count = 0
    for c in _combos(window_radius, pairs):
        l = _vec(pair.L_basis, c[:2])
        k = _vec(pair.K_basis, c[2:])
        count += 1
        x = _check_one(h, grid, l, k)
        if x is not None:
            return CheckResult(False, {"x": x, "l": l, "k": k, "coef": list(c)}, count, note)
    return CheckResult(True, None, count, note)


def propagate_base_relations(h: PhaseFunction, pair: LatticePair, N: int) -> CheckResult:
    """Check the identity on the whole coefficient box ``|m|,|n| <= N``.

    Raises BaseRelationFails when one of the four base identities fails.
    """
    base = cocycle_check(h, pair, 1, pairs=[(1, 1), (1, 2), (2, 1), (2, 2)])
    if not base.passed:
        raise BaseRelationFails(f"base identity fails at {base.witness}")
    res = cocycle_check(h, pair, N)
    if res.witness is not None:
        res.witness = {"m1": res.witness["coef"][0], "m2": res.witness["coef"][1],
                       "n1": res.witness["coef"][2], "n2": res.witness["coef"][3],
                       "x": res.witness["x"]}
    return res


def witness_matches(hw: dict, vw: dict, h: PhaseFunction, pair: LatticePair, reach: int = 3) -> bool:
    """Whether a verifier witness ``(x, k)`` matches a cocycle witness modulo the lattices.

    Match means ``k`` agrees up to sign and some shift ``x + l + n k`` with
    small coefficients lands in the same h-cell as the stored point.
    """
    k1, k2 = hw["k"], vw["k"]
    kf = (to_float(k1[0]), to_float(k1[1]))
    kv = (to_float(k2[0]), to_float(k2[1]))
    if not (np.allclose(kf, kv) or np.allclose(kf, (-kv[0], -kv[1]))):
        return False
    target = h.value(hw["x"])
    x = (to_float(vw["x"][0]), to_float(vw["x"][1]))
    L = pair.L_basis.to_floats()
    rng = range(-reach, reach + 1)
    for m1, m2, n in itertools.product(rng, rng, rng):
        px = x[0] + m1 * L[0][0] + m2 * L[0][1] + n * kf[0]
        py = x[1] + m1 * L[1][0] + m2 * L[1][1] + n * kf[1]
        v = h.value((Fraction(px).limit_denominator(10**9), Fraction(py).limit_denominator(10**9)))
        if v is not None and v == target:
            return True
    return False

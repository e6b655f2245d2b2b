"""Verification of the two Parseval conditions for step functions.

For ``g`` with bounded support, lattices ``L`` and ``K`` and the constant
``d0 = 1/|det K|`` the conditions are

    sum_l |g(x - l)|^2 = d0                              (first condition)
    sum_l g(x - l) conj g(x - l - k) = 0,   0 != k in K  (second condition)

Both sums are L-periodic, so they are evaluated on one fundamental domain
``W`` of L.  For each k the products ``g_i conj g_j`` live on the boxes
``cell_i  intersect  (cell_j + k)``; folding those into ``W`` and summing on the
common refinement gives the exact piecewise-constant value.

Exact mode keeps every product as ``(s/q) sqrt(f) exp(2 pi i phase)`` grouped
by ``(phase, f)``, so a zero is a certificate rather than a rounding accident.
"""
from __future__ import annotations

import cmath
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy

from .errors import NonReducedPairWithoutBases, UnboundedSupport, ZeroTestFunction
from .generators import StepFunction, pointwise_product
from .multipliers import PhaseFunction, witness_matches
from .numerics import Irrational, LatticePair, is_rational, to_float
from .regions import Box, FoldLattice, Region, frame_matrix

__all__ = ["ConditionResult", "VerificationReport", "verify_conditions", "montecarlo_check",
           "frame_sum_oracle", "theorem0_closure", "correlation_values", "matching_failure", "EPS_RATIONAL", "EPS_DENSE"]

EPS_RATIONAL = 1e-9
EPS_DENSE = 5e-3


@dataclass
class ConditionResult:
    passed: bool
    worst_residual: object
    witness: dict | None = None
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {"pass": self.passed, "worst_residual": self.worst_residual, "witness": self.witness}
        if self.failures:
            out["failures"] = self.failures
        return out


@dataclass
class VerificationReport:
    """Outcome of one verification run.

    In epsilon mode ``worst_residual`` is the integral of the absolute
    residual over one fundamental domain (worst k for the second condition).
    """

    condition4: ConditionResult
    condition5: ConditionResult
    tested_k: list
    mode: str
    eps: float | None = None
    target: object = None
    target_label: str = "d0"
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.condition4.passed and self.condition5.passed

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "mode": self.mode,
            "eps": self.eps,
            "target": {"label": self.target_label, "value": self.target},
            "condition4": self.condition4.to_dict(),
            "condition5": self.condition5.to_dict(),
            "tested_k": self.tested_k,
            "notes": list(self.notes),
        }


# ---------------------------------------------------------------------------
# exact coefficient algebra
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _squarefree(n: int) -> tuple[int, int]:
    """``n = s^2 f`` with ``f`` squarefree."""
    s, f, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            f *= p
        p += 1
    return s, f * n


def _sqrt_rat(m: Fraction) -> tuple[Fraction, int]:
    s, f = _squarefree(m.numerator * m.denominator)
    return Fraction(s, m.denominator), f


def _product(ci, cj, exact: bool):
    """``ci * conj(cj)`` as ``((phase, f), rational)`` or a complex float."""
    if exact:
        coef, f = _sqrt_rat(ci.mag2 * cj.mag2)
        return (ci.phase - cj.phase) % 1, f, coef
    return ci.value * cj.value.conjugate()


def _exact_value(vals: dict) -> complex:
    return sum(float(c) * math.sqrt(f) * cmath.exp(2j * math.pi * float(ph))
               for (ph, f), c in vals.items())


def _exact_is_zero(vals: dict) -> tuple[bool, float]:
    if all(c == 0 for c in vals.values()):
        return True, 0.0
    v = abs(_exact_value(vals))
    if v > 1e-9:
        return False, v
    expr = sum(sympy.Rational(c.numerator, c.denominator) * sympy.sqrt(f)
               * sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(ph.numerator, ph.denominator))
               for (ph, f), c in vals.items())
    zero = bool(sympy.simplify(sympy.expand_complex(expr)) == 0)
    return zero, v


# ---------------------------------------------------------------------------
# piecewise sums on a fundamental domain
# ---------------------------------------------------------------------------

class _Field:
    """Piecewise-constant function on ``[0,u) x [0,v)`` accumulated from boxes."""

    def __init__(self, u, v, pieces, exact: bool):
        self.exact = exact
        if exact:
            xs = sorted({Fraction(0), u} | {p[0].x0 for p in pieces} | {p[0].x1 for p in pieces})
            ys = sorted({Fraction(0), v} | {p[0].y0 for p in pieces} | {p[0].y1 for p in pieces})
            xi = {x: i for i, x in enumerate(xs)}
            yi = {y: i for i, y in enumerate(ys)}
            acc = {}
            for box, key, c in pieces:
                arr = acc.get(key)
                if arr is None:
                    arr = acc[key] = np.full((len(xs), len(ys)), Fraction(0), dtype=object)
                i0, i1, j0, j1 = xi[box.x0], xi[box.x1], yi[box.y0], yi[box.y1]
                arr[i0, j0] += c
                arr[i1, j0] -= c
                arr[i0, j1] -= c
                arr[i1, j1] += c
            self.arrays = {k: np.cumsum(np.cumsum(a, axis=0), axis=1)[:-1, :-1] for k, a in acc.items()}
        else:
            xs = _merge([0.0, float(u)] + [float(p[0].x0) for p in pieces] + [float(p[0].x1) for p in pieces])
            ys = _merge([0.0, float(v)] + [float(p[0].y0) for p in pieces] + [float(p[0].y1) for p in pieces])
            arr = np.zeros((len(xs), len(ys)), dtype=complex)
            for box, _, c in pieces:
                i0, i1 = _near(xs, box.x0), _near(xs, box.x1)
                j0, j1 = _near(ys, box.y0), _near(ys, box.y1)
                arr[i0, j0] += c
                arr[i1, j0] -= c
                arr[i0, j1] -= c
                arr[i1, j1] += c
            self.arrays = {None: np.cumsum(np.cumsum(arr, axis=0), axis=1)[:-1, :-1]}
        self.xs, self.ys = xs, ys

    def nonzero_cells(self):
        """Indices of cells where some accumulated component is nonzero."""
        mask = None
        for a in self.arrays.values():
            m = (a != 0) if self.exact else (np.abs(a) > 1e-13)
            mask = m if mask is None else (mask | m)
        if mask is None:
            return []
        return list(zip(*np.nonzero(mask)))

    def cell_box(self, i, j) -> Box:
        return Box(self.xs[i], self.xs[i + 1], self.ys[j], self.ys[j + 1])

    def cell_value(self, i, j):
        if self.exact:
            return {k: a[i, j] for k, a in self.arrays.items() if a[i, j] != 0}
        return self.arrays[None][i, j]


def _merge(vals):
    a = np.unique(np.asarray(vals, dtype=float))
    keep = np.concatenate(([True], np.diff(a) > 1e-12))
    return a[keep]


def _near(xs, v) -> int:
    v = float(v)
    i = int(np.searchsorted(xs, v))
    if i > 0 and (i == len(xs) or abs(xs[i - 1] - v) <= abs(xs[i] - v)):
        return i - 1
    return i


# ---------------------------------------------------------------------------
# the verifier
# ---------------------------------------------------------------------------

class _Setup:
    def __init__(self, g: StepFunction, pair: LatticePair, d0, eps):
        if not isinstance(pair, LatticePair):
            raise NonReducedPairWithoutBases("a LatticePair with explicit bases is required")
        self.s = g.shear
        T = frame_matrix(self.s)
        self.Lf = FoldLattice(T @ pair.L_basis)
        self.Kf = FoldLattice(T @ pair.K_basis)
        self.items = [(c.base, k) for c, k in g.terms]
        for b, _ in self.items:
            if not all(math.isfinite(float(t)) for t in b.as_list()):
                raise UnboundedSupport("cells must be bounded")
        self.target = pair.target if d0 is None else d0
        self.exact = (eps is None and g.exact and self.Lf.exact and self.Kf.exact
                      and isinstance(self.target, Fraction))
        self.eps = None if self.exact else (EPS_RATIONAL if eps is None else eps)
        self.label = "d0" if pair.is_reduced else "b"

    def to_orig(self, pt):
        x, y = pt
        return (x, y + self.s * x)

    def k_groups(self) -> dict:
        """Nonzero K vectors (frame coordinates) with some ``cell_i`` meeting ``cell_j + k``."""
        groups = defaultdict(list)
        for i, (bi, _) in enumerate(self.items):
            for j, (bj, _) in enumerate(self.items):
                for k in self.Kf.points_in(bi.x0 - bj.x1, bi.x1 - bj.x0, bi.y0 - bj.y1, bi.y1 - bj.y0):
                    if k[0] != 0 or k[1] != 0:
                        groups[k].append((i, j))
        return groups

    def pieces(self, k, pairs):
        tol = 0 if self.exact else 1e-12
        out = []
        for i, j in pairs:
            bi, ci = self.items[i]
            bj, cj = self.items[j]
            P = bi.intersect(bj.shift(*k), tol) if k != (0, 0) else (bi if i == j else None)
            if P is None:
                continue
            prod = _product(ci, cj, self.exact)
            for q in self.Lf.fold_box(P):
                if self.exact:
                    out.append((q, prod[:2], prod[2]))
                else:
                    out.append((q, None, prod))
        return out

    def field(self, k, pairs, subtract_target=False) -> _Field:
        pcs = self.pieces(k, pairs)
        if subtract_target:
            W = Box(0 * self.Lf.u, self.Lf.u, 0 * self.Lf.v, self.Lf.v)
            if self.exact:
                pcs.append((W, (Fraction(0), 1), -self.target))
            else:
                pcs.append((W, None, -to_float(self.target) + 0j))
        return _Field(self.Lf.u, self.Lf.v, pcs, self.exact)

    def judge(self, fld: _Field):
        """(worst residual, lexicographically smallest failing point or None)."""
        if self.exact:
            worst, fails = 0.0, []
            for i, j in fld.nonzero_cells():
                zero, mag = _exact_is_zero(fld.cell_value(i, j))
                if not zero:
                    b = fld.cell_box(i, j)
                    fails.append(((b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2))
                    worst = max(worst, mag)
            return worst, (min(fails) if fails else None)
        arr = fld.arrays[None]
        dx = np.diff(fld.xs)[:, None]
        dy = np.diff(fld.ys)[None, :]
        integ = float(np.sum(np.abs(arr) * dx * dy))
        bad = np.argwhere((np.abs(arr) > 1e-9) & (dx * dy > 1e-18))
        pts = sorted(((fld.xs[i] + fld.xs[i + 1]) / 2, (fld.ys[j] + fld.ys[j + 1]) / 2) for i, j in bad)
        return integ, (pts[0] if pts else None)


def _resid(setup: _Setup, worst):
    if setup.exact:
        if worst == 0:
            return Fraction(0)
        fr = Fraction(worst).limit_denominator(10**6)
        return fr if abs(float(fr) - worst) < 1e-12 else Irrational(worst, "residual")
    return worst


def _exact_rational_residual(fld: _Field, target_key=(Fraction(0), 1)):
    """Largest |value| when every cell value is rational (first condition)."""
    worst = Fraction(0)
    for i, j in fld.nonzero_cells():
        vals = fld.cell_value(i, j)
        if set(vals) <= {target_key}:
            worst = max(worst, abs(vals.get(target_key, Fraction(0))))
        else:
            return None
    return worst


def verify_conditions(g: StepFunction, pair: LatticePair, d0=None, eps: float | None = None) -> VerificationReport:
    """Check both conditions on the common refinement of the folded cells.

    Exact mode (all data rational, ``eps`` None) passes only on an exact zero
    residual.  Otherwise residuals are integrated absolute values over one
    fundamental domain and pass when at most ``eps``.
    """
    st = _Setup(g, pair, d0, eps)
    n = len(st.items)
    f4 = st.field((0, 0), [(i, i) for i in range(n)], subtract_target=True)
    w4, x4 = st.judge(f4)
    r4 = _exact_rational_residual(f4) if st.exact else None
    res4 = r4 if r4 is not None else _resid(st, w4)
    pass4 = (x4 is None) if st.exact else (w4 <= st.eps)
    c4 = ConditionResult(pass4, res4, None if pass4 or x4 is None else {"x": st.to_orig(x4)})

    groups = st.k_groups()
    ks = sorted(groups, key=lambda k: (float(k[0]), float(k[1])))
    worst5, pass5, fails = 0.0, True, []
    for k in ks:
        w, x = st.judge(st.field(k, groups[k]))
        ok = (x is None) if st.exact else (w <= st.eps)
        worst5 = max(worst5, w)
        if not ok:
            pass5 = False
            fails.append({"x": st.to_orig(x), "k": st.to_orig(k)})
    wit5 = fails[0] if fails else None
    c5 = ConditionResult(pass5, _resid(st, worst5), wit5, fails)
    return VerificationReport(c4, c5, [st.to_orig(k) for k in ks], "exact" if st.exact else "epsilon",
                              st.eps, st.target, st.label)


def correlation_values(g: StepFunction, pair: LatticePair, k, region: Region) -> list:
    """Exact values of ``sum_l g(x-l) conj g(x-l-k)`` on the refined cells over ``region``.

    Returns ``(box, is_zero, approx)`` triples in box-frame coordinates.
    """
    st = _Setup(g, pair, None, None)
    T = frame_matrix(st.s)
    kf = T @ k
    n = len(st.items)
    pairs = [(i, j) for i in range(n) for j in range(n)]
    fld = st.field(tuple(kf), pairs) if tuple(kf) != (0, 0) else st.field((0, 0), [(i, i) for i in range(n)])
    folded = st.Lf.fold(region.frame_boxes(st.s))
    out = []
    for i in range(len(fld.xs) - 1):
        for j in range(len(fld.ys) - 1):
            b = fld.cell_box(i, j)
            if not any(b.intersect(f) is not None for f in folded):
                continue
            v = fld.cell_value(i, j)
            if st.exact:
                zero, _ = _exact_is_zero(v) if v else (True, 0.0)
                out.append((b, zero, _exact_value(v) if v else 0j))
            else:
                out.append((b, abs(v) <= 1e-12, v))
    return out


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def _eval_many(g: StepFunction, px, py):
    out = np.zeros(px.shape, dtype=complex)
    for c, k in g.terms:
        b = c.base
        yy = py - c.shear * px
        m = (px >= float(b.x0)) & (px < float(b.x1)) & (yy >= float(b.y0)) & (yy < float(b.y1))
        out[m] = k.value
    return out


def _int_range(M, box):
    """Integer coefficient boxes whose image under M can meet ``box`` (with margin)."""
    Minv = np.linalg.inv(M)
    corners = np.array([[box[0], box[2]], [box[0], box[3]], [box[1], box[2]], [box[1], box[3]]])
    c = corners @ Minv.T
    lo = np.floor(c.min(axis=0)) - 1
    hi = np.ceil(c.max(axis=0)) + 1
    return [range(int(lo[i]), int(hi[i]) + 1) for i in range(2)]


def montecarlo_check(g: StepFunction, pair: LatticePair, d0=None, n_points: int = 10_000,
                     seed: int = 0, tol: float = EPS_RATIONAL, max_work: int = 5_000_000) -> VerificationReport:
    """Evaluate both sums at random points of the L fundamental parallelogram.

    Uses plain float arithmetic and brute-force lattice enumeration, so it
    shares no code path with :func:`verify_conditions`.
    """
    target = to_float(pair.target if d0 is None else d0)
    L = np.array(pair.L_basis.to_floats())
    K = np.array(pair.K_basis.to_floats())
    rng = np.random.default_rng(seed)
    U = rng.random((n_points, 2))
    P = U @ L.T
    bxs = [g.support.bbox()] if g.terms else [(0, 0, 0, 0)]
    bx0, bx1, by0, by1 = bxs[0]
    fx0, fx1 = P[:, 0].min(), P[:, 0].max()
    fy0, fy1 = P[:, 1].min(), P[:, 1].max()
    r1, r2 = _int_range(L, (fx0 - bx1, fx1 - bx0, fy0 - by1, fy1 - by0))
    ls = np.array([L @ np.array([a, b]) for a in r1 for b in r2])
    wx, wy = bx1 - bx0, by1 - by0
    q1, q2 = _int_range(K, (-wx, wx, -wy, wy))
    ks = [K @ np.array([a, b]) for a in q1 for b in q2 if (a, b) != (0, 0)]
    ks = [k for k in ks if abs(k[0]) < wx + 1e-9 and abs(k[1]) < wy + 1e-9]
    notes = []
    if len(ls) * (len(ks) + 1) * n_points * max(len(g.terms), 1) > max_work * 100:
        notes.append("skipped: support too spread out for brute-force sampling")
        skipped = ConditionResult(True, 0.0, None)
        return VerificationReport(skipped, skipped, [], "epsilon", tol, target, "d0", notes)
    G = np.stack([_eval_many(g, P[:, 0] - l[0], P[:, 1] - l[1]) for l in ls])
    s4 = np.sum(np.abs(G) ** 2, axis=0) - target
    i4 = int(np.argmax(np.abs(s4)))
    w4 = float(np.abs(s4[i4]))
    c4 = ConditionResult(w4 <= tol, w4, None if w4 <= tol else {"x": tuple(P[i4])})
    worst, wit = 0.0, None
    for k in ks:
        Gk = np.stack([_eval_many(g, P[:, 0] - l[0] - k[0], P[:, 1] - l[1] - k[1]) for l in ls])
        s5 = np.abs(np.sum(G * np.conj(Gk), axis=0))
        i5 = int(np.argmax(s5))
        if s5[i5] > worst:
            worst = float(s5[i5])
            if worst > tol:
                wit = {"x": tuple(P[i5]), "k": tuple(k)}
    c5 = ConditionResult(worst <= tol, worst, wit)
    return VerificationReport(c4, c5, [tuple(k) for k in ks], "epsilon", tol, target,
                              "d0" if pair.is_reduced else "b", notes)


def _box_integral(w, a, b):
    """``int_a^b exp(-2 pi i w t) dt`` for an array of frequencies ``w``."""
    out = np.empty(w.shape, dtype=complex)
    z = np.abs(w) < 1e-15
    out[z] = b - a
    wn = w[~z]
    out[~z] = (np.exp(-2j * np.pi * wn * b) - np.exp(-2j * np.pi * wn * a)) / (-2j * np.pi * wn)
    return out


def frame_sum_oracle(g: StepFunction, pair: LatticePair, f: StepFunction, trunc: int) -> float:
    """Truncated frame sum ``sum |<f, M_w T_l g>|^2 / ||f||^2`` over ``|l|, |k| <= trunc``.

    ``w`` runs over the modulation lattice ``(K^T)^{-1} Z^2`` and ``l`` over
    ``L``; integrals over the (sheared) cell intersections are closed form.
    """
    norm2 = sum(to_float(k.mag2) * float(c.measure) for c, k in f.terms)
    if norm2 <= 0:
        raise ZeroTestFunction("the test function has zero norm")
    s = g.shear
    if f.terms and f.shear != s:
        from .errors import MixedShear
        raise MixedShear("test function and generator must share a shear")
    L = pair.L_basis
    Mod = np.array(pair.modulation.to_floats())
    rng = np.arange(-trunc, trunc + 1)
    A, B = np.meshgrid(rng, rng, indexing="ij")
    wx = (Mod[0, 0] * A + Mod[0, 1] * B).ravel()
    wy = (Mod[1, 0] * A + Mod[1, 1] * B).ravel()
    fb = [(c.base, k.value) for c, k in f.terms]
    total = 0.0
    for a in range(-trunc, trunc + 1):
        for b in range(-trunc, trunc + 1):
            lx = L.a * a + L.b * b
            ly = L.c * a + L.d * b
            acc = np.zeros(wx.shape, dtype=complex)
            hit = False
            for c, k in g.terms:
                gb = c.translate((lx, ly)).base
                for fbox, fv in fb:
                    P = fbox.intersect(gb)
                    if P is None:
                        continue
                    hit = True
                    coef = fv * np.conj(k.value)
                    acc += coef * _box_integral(wx + s * wy, float(P.x0), float(P.x1)) \
                        * _box_integral(wy, float(P.y0), float(P.y1))
            if hit:
                total += float(np.sum(np.abs(acc) ** 2))
    return total / norm2


def theorem0_closure(h: PhaseFunction, g: StepFunction, pair: LatticePair, d0=None) -> VerificationReport:
    """Verify ``h g``; a character factor is carried analytically.

    For a character the products ``h(x-l) conj h(x-l-k)`` equal the constant
    ``exp(2 pi i <c, k>)`` of modulus one, so the residuals of ``h g`` are
    those of ``g``.
    """
    notes = []
    if h.character is not None:
        notes.append("character factor exp(2 pi i <c, k>) pulled out of the sums")
    target = pointwise_product(PhaseFunction(h.cells, h.window, h.periodic), g) if h.cells else g
    rep = verify_conditions(target, pair, d0)
    rep.notes.extend(notes)
    return rep


def matching_failure(h: PhaseFunction, report: VerificationReport, pair: LatticePair) -> dict | None:
    """The recorded failure of ``report`` that matches the stored cocycle witness of ``h``."""
    if h.witness is None:
        return None
    for f in report.condition5.failures:
        if witness_matches(h.witness, f, h, pair):
            return f
    return None

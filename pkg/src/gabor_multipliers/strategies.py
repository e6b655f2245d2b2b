"""The per-(type, pair) construction table and the set builders behind it.

Every pair ``(l_i, k_j)`` of a canonical matrix ``D`` is handled by one of
the five-set constructions (flavors ``L6i``, ``L6ii``, ``L7i``, ``L7ii``), the
shift-sequence construction ``L6iii``, or the eight-set ``IXd-special``
construction.  The table below is plain data so that gaps and deviations are
auditable.

All the five-set builds share one engine.  In a working frame where ``L = Z^2``
and the cells are boxes, a small box ``E2`` is pinned inside ``Omega`` together
with ``E5 = E2 + k + l`` (first kind) or kept K-disjoint from ``E4 = E2 + l``
(second kind).  The rest of ``[0,1)^2`` is kept where it already packs by K
and rebuilt elsewhere otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadParameter, HypothesisCheckFailed, HypothesisViolation, NoRecipe
from .numerics import IDENTITY, LatticePair, Mat2, TypeTag, is_rational, to_float, unimodular_split
from .regions import (Box, Cell, FoldLattice, Region, disjoint, equivalent_rebuild, frame_matrix,
                      intersect_regions, overlap_measure, packs_by, subtract, tiles_by)

__all__ = ["Recipe", "TABLE", "StrategySets", "build_strategy_sets", "table_key",
           "delta_bound", "default_delta", "working_frame", "pair_vectors", "xi_flip", "PAIRS"]

PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))


@dataclass(frozen=True)
class Recipe:
    flavor: str
    shape: str | None = None
    bound: str | None = None
    depends_on: tuple | None = None
    analogy: bool = False
    note: str = ""


def _all(recipe: Recipe) -> dict:
    return {p: recipe for p in PAIRS}


_K2_NOT_IN_L = "the second-kind flavor needs k2 in L, which fails; built as L6i"
_IXC = "the second-kind flavor needs k in L, which fails; built with the first-kind flavor"

TABLE: dict[str, dict] = {
    "I.i": {(1, 1): Recipe("L6iii"),
            (2, 1): Recipe("L6ii", "strip_y", "I_21"),
            (2, 2): Recipe("L6i", "strip_y", "I_22"),
            (1, 2): Recipe("L7i", "strip_y", "I_22", (2, 2))},
    "I.ii": {(1, 1): Recipe("L6iii"),
             (2, 1): Recipe("L6ii", "strip_y", "I_21"),
             (2, 2): Recipe("L6ii", "S"),
             (1, 2): Recipe("L7ii", "S", None, (2, 2))},
    "II.a": _all(Recipe("L6ii", "S")),
    "II.b": {(1, 1): Recipe("L6i", "strip_x", "II_b"),
             (2, 1): Recipe("L7i", "strip_x", "II_b", (1, 1)),
             (2, 2): Recipe("L6i", "strip_y", "II_b"),
             (1, 2): Recipe("L7i", "strip_y", "II_b", (2, 2))},
    "II.c": {(1, 1): Recipe("L6ii", "S"),
             (2, 1): Recipe("L7ii", "S", None, (1, 1)),
             (1, 2): Recipe("L6i", "strip_y", "II_c"),
             (2, 2): Recipe("L6i", "strip_y", "II_c")},
    "II.d": {(1, 1): Recipe("L6i", "strip_x", "II_d"),
             (2, 1): Recipe("L7i", "strip_x", "II_d", (1, 1)),
             (2, 2): Recipe("L6ii", "S"),
             (1, 2): Recipe("L7ii", "S", None, (2, 2))},
    "III": _all(Recipe("L6iii")),
    "IV.a": _all(Recipe("L6ii", "S")),
    "IV.b": {(1, 1): Recipe("L6i", "square", "IV_b"),
             (2, 1): Recipe("L6i", "square", "IV_b"),
             (1, 2): Recipe("L6i", "square", "IV_b", note=_K2_NOT_IN_L),
             (2, 2): Recipe("L6i", "square", "IV_b", note=_K2_NOT_IN_L)},
    "V": _all(Recipe("L6iii", note="basis change k2' = k2 - k1")),
    "VI": {(2, 1): Recipe("L6i", "square", "VI"),
           (1, 1): Recipe("L6i", "square", "VI"),
           (2, 2): Recipe("L6i", "square", "VI"),
           (1, 2): Recipe("L7i", "square", "VI", (2, 2))},
    "VII": {(2, 1): Recipe("L6i", "grid_dx", "VII", analogy=True),
            (1, 1): Recipe("L6i", "grid_dx", "VII", analogy=True),
            (2, 2): Recipe("L6i", "grid_dx", "VII", analogy=True),
            (1, 2): Recipe("L7i", "grid_dx", "VII", (2, 2), analogy=True)},
    "VII.unit": {(2, 1): Recipe("L6i", "grid_dx", "VII", analogy=True),
                 (1, 1): Recipe("L7i", "grid_dx", "VII", (2, 1), analogy=True),
                 (2, 2): Recipe("L6i", "grid_dx", "VII", analogy=True),
                 (1, 2): Recipe("L7i", "grid_dx", "VII", (2, 2), analogy=True)},
    "VIII": {(2, 1): Recipe("L6i", "grid_dy", "VIII", analogy=True),
             (1, 1): Recipe("L6i", "grid_dy", "VIII", analogy=True),
             (2, 2): Recipe("L6i", "grid_dy", "VIII", analogy=True),
             (1, 2): Recipe("L7i", "grid_dy", "VIII", (2, 2), analogy=True)},
    "VIII.int": {(2, 1): Recipe("L6i", "grid_dy", "VIII", analogy=True),
                 (1, 1): Recipe("L6i", "grid_dy", "VIII", analogy=True),
                 (2, 2): Recipe("L6ii", "grid_dy", "VIII", analogy=True),
                 (1, 2): Recipe("L6ii", "grid_dy", "VIII", analogy=True)},
    "IX.a": {(2, 1): Recipe("L6i", "grid"),
             (1, 1): Recipe("L6i", "grid"),
             (2, 2): Recipe("L6i", "grid"),
             (1, 2): Recipe("L7i", "grid", None, (2, 2))},
    "IX.b": {(1, 1): Recipe("L6i", "grid"),
             (2, 1): Recipe("L6i", "grid"),
             (2, 2): Recipe("L6ii", "grid"),
             (1, 2): Recipe("L7ii", "grid", None, (2, 2))},
    "IX.c": {(2, 2): Recipe("L6i", "grid", note=_IXC),
             (2, 1): Recipe("L6i", "grid", note=_IXC),
             (1, 2): Recipe("L7i", "grid", None, (2, 2), note=_IXC),
             (1, 1): Recipe("L7i", "grid", None, (2, 1), note=_IXC)},
    "IX.d": {(2, 2): Recipe("L6ii", "grid"),
             (1, 2): Recipe("L7ii", "grid", None, (2, 2)),
             (2, 1): Recipe("L6i", "grid", note=_IXC),
             (1, 1): Recipe("L7i", "grid", None, (2, 1), note=_IXC)},
    "IX.d.q": {(2, 1): Recipe("L6i", "grid"),
               (1, 1): Recipe("L7i", "grid", None, (2, 1)),
               (2, 2): Recipe("IXd-special"),
               (1, 2): Recipe("IXd-special", None, None, (2, 2))},
    "X.a": _all(Recipe("L6i", "grid")),
    "X.b": _all(Recipe("L6ii", "S")),
}


def table_key(tag: TypeTag) -> str:
    p, m = tag.params, tag.major
    if m == "I":
        return "I.i" if p["r0"] > 0 else "I.ii"
    if m in ("II", "IV", "X"):
        return f"{m}.{tag.subcase}"
    if m == "IX":
        if tag.subcase == "d" and "q" in p:
            return "IX.d.q"
        return f"IX.{tag.subcase}"
    if m == "VII":
        return "VII.unit" if p["m1"] == 1 else "VII"
    if m == "VIII":
        return "VIII.int" if p["n2"] == 1 else "VIII"
    return m


# ---------------------------------------------------------------------------
# delta admissibility
# ---------------------------------------------------------------------------

def _frac(x):
    return x - math.floor(x)


def _min(*xs):
    best = xs[0]
    for x in xs[1:]:
        if x < best:
            best = x
    return best


def delta_bound(name: str, params: dict):
    """Upper end of the open admissibility interval ``(0, bound)`` for delta."""
    p = params
    if name == "I_21":
        return _min(p["r"] - 1, Fraction(1, 2))
    if name in ("I_22", "IV_b"):
        return _min(p["r0"], 1 - p["r0"])
    if name == "II_b":
        return _min(p["r0p"], p["r0pp"], 1 - p["r0p"], 1 - p["r0pp"])
    if name == "II_c":
        return _min(p["r0pp"], 1 - p["r0pp"])
    if name == "II_d":
        return _min(p["r0p"], 1 - p["r0p"])
    if name in ("VI", "VIII"):
        r1 = p["r1"]
        t = 1 - math.floor(1 / r1) * r1
        if name == "VI":
            r0 = _frac(p["r2"])
            return _min(t, r1 - t, r0, 1 - r0)
        return _min(t, r1 - t)
    if name == "VII":
        r0 = _frac(p["r2"])
        return _min(r0, 1 - r0)
    raise BadParameter(f"unknown delta bound {name!r}")


def default_delta(bound) -> Fraction:
    """Midpoint of ``(0, bound)``, rational whenever possible."""
    if is_rational(bound):
        return Fraction(bound) / 2
    return Fraction(to_float(bound) / 2).limit_denominator(1000)


def _resolve_delta(recipe: Recipe, tag: TypeTag, delta):
    if recipe.bound is None:
        return None
    ub = delta_bound(recipe.bound, tag.params)
    if delta is None:
        return default_delta(ub)
    d = Fraction(delta)
    if not (0 < d < ub):
        raise BadParameter(f"delta={d} outside the admissible interval (0, {ub})")
    return d


# ---------------------------------------------------------------------------
# frame and lattice vectors
# ---------------------------------------------------------------------------

def working_frame(tag: TypeTag) -> int:
    """Shear of the frame the constructions run in (nonzero only for Type X)."""
    if tag.major != "X":
        return 0
    p = tag.params
    P, _, _ = unimodular_split(Mat2.of([[p["a1"], p["b1"]], [-p["b1"], p["a1"]]]))
    return -int(P.c)


def pair_vectors(tag: TypeTag) -> tuple[Mat2, Mat2]:
    """Bases ``(L, K)`` whose columns index the four pairs.

    Type V uses ``k2' = k2 - k1``; all other types use ``k_j = D e_j``.
    """
    D = tag.canonical
    if tag.major == "V":
        k1, k2 = D.col(0), D.col(1)
        return IDENTITY, Mat2.from_columns(k1, (k2[0] - k1[0], k2[1] - k1[1]))
    return IDENTITY, D


def _shape(name: str, delta, params) -> Box:
    one = Fraction(1)
    if name == "S":
        return Box(Fraction(0), one, Fraction(0), one)
    if name == "strip_y":
        return Box(Fraction(0), one, Fraction(0), delta)
    if name == "strip_x":
        return Box(Fraction(0), delta, Fraction(0), one)
    if name == "square":
        return Box(Fraction(0), delta, Fraction(0), delta)
    if name == "grid":
        return Box(Fraction(0), Fraction(1, int(params["n1"])), Fraction(0), Fraction(1, int(params["n2"])))
    if name == "grid_dx":
        return Box(Fraction(0), Fraction(1, int(params["n1"])), Fraction(0), delta)
    if name == "grid_dy":
        return Box(Fraction(0), delta, Fraction(0), Fraction(1, int(params["n2"])))
    raise BadParameter(f"unknown shape {name!r}")


def xi_flip(D: Mat2) -> tuple[int, int]:
    """Signs ``(sx, sy)`` of the axis flip putting ``D S`` against the first quadrant."""
    (a, b), (c, d) = D.to_floats()
    for sx, sy in ((1, 1), (-1, 1), (1, -1), (-1, -1)):
        # the cone spanned by the flipped k1, k2 meets the open first quadrant
        v1 = (sx * a, sy * c)
        v2 = (sx * b, sy * d)
        mid = (v1[0] + v2[0], v1[1] + v2[1])
        if any(v[0] > 0 and v[1] > 0 for v in (v1, v2, mid)):
            return sx, sy
    return 1, 1


# ---------------------------------------------------------------------------
# result type and audit
# ---------------------------------------------------------------------------

@dataclass
class StrategySets:
    """Sets of one pair's construction, in original (reduced) coordinates."""

    flavor: str
    sets: dict
    l: tuple
    k: tuple
    pair: tuple
    delta: Fraction | None = None
    depends_on: tuple | None = None
    analogy: bool = False
    note: str = ""
    shear: int = 0
    mode: str = "exact"
    defect: object = Fraction(0)
    omega: Region | None = None
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {name: {"cells": len(r.cells), "measure": r.measure} for name, r in self.sets.items()}


def _check(ok: bool, what: str):
    if not ok:
        raise HypothesisCheckFailed(what)


def _in_lattice(v, lat: Mat2) -> bool:
    fl = FoldLattice(lat)
    return fl.contains_vector(v)


def _audit(st: StrategySets, lattices: LatticePair, eps):
    L, K = lattices.L_basis, lattices.K_basis
    E = st.sets
    if st.flavor == "L6iii":
        _check(tiles_by(E["Omega"], L), "Omega tiles by L")
        _check(packs_by(E["Omega"], K), "Omega packs by K")
        return
    if st.flavor == "IXd-special":
        _check(tiles_by(st.omega, L), "Omega tiles by L")
        _check(packs_by(st.omega, K), "Omega packs by K")
        _check(disjoint(*E.values()), "the nine sets are pairwise disjoint")
        return
    e1, e2, e3, e4, e5 = (E[f"E{i}"] for i in range(1, 6))
    _check(disjoint(e1, e2, e3, e4, e5, eps=eps), "E1..E5 pairwise disjoint")
    if st.flavor in ("L6i", "L7i"):
        _check(tiles_by(e1 | e2 | e3, L, eps=eps), "E1 u E2 u E3 tiles by L")
    else:
        _check(_in_lattice(st.k, L), "k in L")
        _check(st.k != st.l and st.k != (-st.l[0], -st.l[1]), "k != +-l")
        _check(tiles_by(e1 | e2, L, eps=eps), "E1 u E2 tiles by L")
    _check(packs_by(e1 | e2 | e4, K, eps=eps), "E1 u E2 u E4 packs by K")


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------

def _add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def _five_set_engine(flavor, E2: Box, l, k, Kf: Mat2, mode, eps):
    """Omega pieces (frame boxes) for a five-set flavor; see module docstring."""
    first_kind = flavor in ("L6i", "L7i")
    Lf = FoldLattice(IDENTITY)
    Kl = FoldLattice(Kf)
    E5 = E2.shift(*_add(k, l))
    E4 = E2.shift(*l)
    pinned = [E2, E5] if first_kind else [E2]
    Lfold = Lf.fold(pinned)
    _check(float(overlap_measure(Lfold)) <= 1e-12, "E2 and E2+k+l are not L-equivalent")
    kept = pinned + ([] if first_kind else [E4])
    Kfold = Kl.fold(kept)
    what = "E2 and E2+k+l are not K-equivalent" if first_kind else "E2 and E2+l are not K-equivalent"
    _check(float(overlap_measure(Kfold)) <= 1e-12, what)
    S = Box(Fraction(0), Fraction(1), Fraction(0), Fraction(1))
    R = Box(Fraction(0), Kl.u, Fraction(0), Kl.v) if Kl.exact else Box(0.0, Kl.u, 0.0, Kl.v)
    s_rem = subtract([S], Lfold)
    r_rem = subtract([R], Kfold)
    common = intersect_regions(s_rem, r_rem)
    A = subtract(s_rem, common)
    B = subtract(r_rem, common)
    if A:
        res = equivalent_rebuild(Region.boxes(A), Region.boxes(B), IDENTITY, Kf, mode=mode, eps=eps)
        moved = [c.base for c in res.region.cells]
        defect = res.defect
    else:
        moved, defect = [], Fraction(0)
    E1 = common + moved
    return E1, E4, E5, defect


def _five_sets(tag, recipe, pair_index, delta, eps) -> StrategySets:
    i, j = pair_index
    Lb, Kb = pair_vectors(tag)
    l = Lb.col(i - 1)
    if recipe.flavor in ("L7i", "L7ii"):
        l = _add(l, Lb.col(2 - i))
    k = Kb.col(j - 1)
    s = working_frame(tag)
    T = frame_matrix(s)
    Kf = T @ tag.canonical
    exact = tag.canonical.is_rational()
    mode = "exact-CRT" if exact else "dense-approx"
    E2 = _shape(recipe.shape, delta, tag.params)
    if not exact:
        E2 = Box(float(E2.x0), float(E2.x1), float(E2.y0), float(E2.y1))
    lf, kf = T @ l, T @ k
    if not exact:
        kf = (to_float(kf[0]), to_float(kf[1]))
    E1, E4, E5, defect = _five_set_engine(recipe.flavor, E2, lf, kf, Kf, mode, eps)
    E3 = E2.shift(*kf)
    if recipe.flavor in ("L6ii", "L7ii"):
        E5 = E3.shift(*lf)
    sets = {"E1": Region.boxes(E1, s), "E2": Region.boxes([E2], s), "E3": Region.boxes([E3], s),
            "E4": Region.boxes([E4], s), "E5": Region.boxes([E5], s)}
    omega = sets["E1"] | sets["E2"] | (sets["E5"] if recipe.flavor in ("L6i", "L7i") else Region())
    return StrategySets(recipe.flavor, sets, l, k, pair_index, delta, recipe.depends_on,
                        recipe.analogy, recipe.note, s, "exact" if exact else "epsilon",
                        defect, omega)


def ixd_sets(q: int, variant: tuple) -> dict:
    """The eight sets, Omega0 and Omega of the Type IX(d) construction with r1 = 1/q, r2 = q."""
    if q < 2:
        raise BadParameter("q must be at least 2")
    if variant not in ((2, 2), (1, 2)):
        raise BadParameter(f"variant {variant} is not (2,2) or (1,2)")
    Fq = Fraction(1, q)
    l1, l2, k1, k2 = (1, 0), (0, 1), (Fq, 0), (0, q)
    E1 = Box(Fraction(0), Fq, Fraction(0), Fraction(1))
    extra = l1 if variant == (1, 2) else (0, 0)
    E = {
        "E1": E1,
        "E2": E1.shift(*_add(l2, extra)),
        "E3": E1.shift(*k2),
        "E4": E1.shift(*_add(_add(k2, l2), extra)),
    }
    base2 = E1.shift(*k1)
    E.update({
        "E1'": base2,
        "E2'": base2.shift(*_add(l2, extra)),
        "E3'": base2.shift(*k2),
        "E4'": base2.shift(*_add(_add(k2, l2), extra)),
    })
    omega = [E1.shift(Fraction(j, q), j) for j in range(q)]
    omega0 = omega[2:]
    out = {name: Region.boxes([b]) for name, b in E.items()}
    out["Omega0"] = Region.boxes(omega0)
    return {"sets": out, "omega": Region.boxes(omega)}


def build_strategy_sets(tag: TypeTag, pair_index: tuple, delta=None, eps: float = 1e-3) -> StrategySets:
    """Sets and lemma flavor for one pair of a classified canonical matrix.

    Raises NoRecipe when the table has no construction and
    HypothesisCheckFailed (naming the first violated condition) when the
    self-audit fails.
    """
    key = table_key(tag)
    if key == "XI":
        sx, sy = xi_flip(tag.canonical)
        raise NoRecipe(f"Type XI needs a rotated K-domain outside the sheared-box cell family "
                       f"(axis flip {sx:+d},{sy:+d} recorded)")
    if key not in TABLE:
        raise NoRecipe(f"no construction for {tag.label}")
    pair_index = tuple(pair_index)
    recipe = TABLE[key][pair_index]
    lattices = LatticePair.reduced(tag.canonical)
    Lb, Kb = pair_vectors(tag)
    i, j = pair_index
    if recipe.flavor == "L6iii":
        S = Region.boxes([Box(Fraction(0), Fraction(1), Fraction(0), Fraction(1))], working_frame(tag))
        st = StrategySets("L6iii", {"Omega": S}, Lb.col(i - 1), Kb.col(j - 1), pair_index,
                          note=recipe.note, omega=S)
    elif recipe.flavor == "IXd-special":
        q = int(tag.params["q"])
        built = ixd_sets(q, pair_index)
        st = StrategySets("IXd-special", built["sets"], Lb.col(i - 1), Kb.col(j - 1), pair_index,
                          depends_on=recipe.depends_on, omega=built["omega"], extra={"q": q})
    else:
        d = _resolve_delta(recipe, tag, delta)
        try:
            st = _five_sets(tag, recipe, pair_index, d, eps)
        except HypothesisViolation as exc:
            raise HypothesisCheckFailed(str(exc)) from exc
    audit_eps = None if st.mode == "exact" else eps
    _audit(st, lattices, audit_eps)
    return st

"""Step-function generator candidates and their builders.

Coefficients are stored as ``(mag2, phase)``: the value is
``sqrt(mag2) * exp(2 pi i phase)``.  Products of two coefficients, which is
all the frame conditions need, then stay exact whenever ``mag2`` and
``phase`` are rational.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import BadParameter, NotStepCompatible, WindowTooSmall
from .multipliers import PhaseFunction
from .numerics import Irrational, is_rational, to_float
from .regions import Box, Cell, Region, num, shear_of, subtract
from .strategies import StrategySets, ixd_sets

__all__ = ["Coeff", "StepFunction", "ShiftSequence", "build_L6_generator", "build_IXd_generator",
           "build_shift_generator", "pointwise_product", "generator_for"]


@dataclass(frozen=True)
class Coeff:
    """``sqrt(mag2) * exp(2 pi i phase)`` with ``phase`` taken mod 1."""

    mag2: object
    phase: object = Fraction(0)

    @classmethod
    def of(cls, mag2, phase=Fraction(0)) -> "Coeff":
        m = Fraction(mag2) if isinstance(mag2, (int, Fraction)) else mag2
        ph = Fraction(phase) % 1 if isinstance(phase, (int, Fraction)) else phase
        return cls(m, ph)

    @property
    def exact(self) -> bool:
        return isinstance(self.mag2, Fraction) and isinstance(self.phase, Fraction)

    @property
    def value(self) -> complex:
        return math.sqrt(to_float(self.mag2)) * cmath.exp(2j * math.pi * to_float(self.phase))

    def __mul__(self, other: "Coeff") -> "Coeff":
        ph = self.phase + other.phase
        return Coeff(self.mag2 * other.mag2, ph % 1 if isinstance(ph, Fraction) else ph)


@dataclass(frozen=True)
class StepFunction:
    """Finite sum of ``coeff * indicator(cell)`` over pairwise disjoint cells."""

    terms: tuple = ()

    @classmethod
    def of(cls, terms) -> "StepFunction":
        return cls(tuple((c, k) for c, k in terms if c.measure != 0))

    @property
    def shear(self) -> int:
        return shear_of(Region(tuple(c for c, _ in self.terms)))

    @property
    def support(self) -> Region:
        return Region(tuple(c for c, _ in self.terms))

    @property
    def exact(self) -> bool:
        return all(c.base.exact and k.exact for c, k in self.terms)

    def __call__(self, pt) -> complex:
        for c, k in self.terms:
            if c.contains(pt):
                return k.value
        return 0j

    def coeff_at(self, pt) -> Coeff | None:
        for c, k in self.terms:
            if c.contains(pt):
                return k
        return None

    def __len__(self):
        return len(self.terms)


@dataclass(frozen=True)
class ShiftSequence:
    """Finitely supported sequence ``n -> Coeff``."""

    entries: tuple = ()

    @classmethod
    def delta(cls, phase=Fraction(0)) -> "ShiftSequence":
        return cls(((0, Coeff.of(1, phase)),))

    @classmethod
    def of(cls, mapping: dict) -> "ShiftSequence":
        return cls(tuple(sorted(mapping.items())))

    def norm2(self):
        total = Fraction(0)
        for _, c in self.entries:
            total = total + c.mag2
        return total


def _terms(region: Region, coeff: Coeff):
    return [(c, coeff) for c in region.cells]


def build_L6_generator(flavor: str, sets: dict, d0) -> StepFunction:
    """``sqrt(d0) 1_E1 + w (-1_E2 + 1_E3 + 1_E4 + 1_E5)``.

    ``w^2 = d0/2`` for the first-kind flavors and ``w^2 = d0/4`` for the
    second kind.
    """
    if flavor in ("L6i", "L7i"):
        w2 = d0 / 2
    elif flavor in ("L6ii", "L7ii"):
        w2 = d0 / 4
    else:
        raise BadParameter(f"{flavor} is not a five-set flavor")
    terms = _terms(sets.get("E1", Region()), Coeff.of(d0))
    terms += _terms(sets.get("E2", Region()), Coeff.of(w2, Fraction(1, 2)))
    for name in ("E3", "E4", "E5"):
        terms += _terms(sets.get(name, Region()), Coeff.of(w2))
    return StepFunction.of(terms)


_IXD_SIGNS = {"E1": 0, "E2": 0, "E3": 0, "E4": Fraction(1, 2),
              "E1'": 0, "E2'": 0, "E3'": Fraction(1, 2), "E4'": 0}


def build_IXd_generator(q: int, variant=(2, 2), sets: dict | None = None) -> StepFunction:
    """Eight quarter-weight indicators plus ``1_Omega0`` for ``D = diag(1/q, q)`` (so d0 = 1)."""
    if q < 2:
        raise BadParameter("q must be at least 2")
    if sets is None:
        sets = ixd_sets(q, tuple(variant))["sets"]
    terms = []
    for name, ph in _IXD_SIGNS.items():
        terms += _terms(sets[name], Coeff.of(Fraction(1, 4), ph))
    terms += _terms(sets["Omega0"], Coeff.of(1))
    return StepFunction.of(terms)


def build_shift_generator(omega: Region, eta: ShiftSequence, axis, d0) -> StepFunction:
    """``g(x) = sqrt(d0) eta_n`` where ``x + n axis`` lies in ``omega``."""
    terms = []
    for n, c in eta.entries:
        shifted = omega.translate((-n * num(axis[0]), -n * num(axis[1])))
        terms += _terms(shifted, Coeff(c.mag2 * d0, c.phase))
    return StepFunction.of(terms)


def pointwise_product(h: PhaseFunction, g: StepFunction) -> StepFunction:
    """The step function ``h g`` on the common refinement of both cell families.

    Characters are not piecewise constant and raise NotStepCompatible.
    """
    if h.character is not None:
        raise NotStepCompatible("a character is not a step function; handle it analytically")
    s = g.shear
    if h.cells and h.shear != s:
        from .errors import MixedShear
        raise MixedShear(f"multiplier shear {h.shear} differs from generator shear {s}")
    gboxes = [c.base for c, _ in g.terms]
    if not h.periodic:
        wboxes = h.window.frame_boxes(s) if h.window is not None else []
        if subtract(gboxes, wboxes):
            raise WindowTooSmall("the support of g leaves the multiplier window")
    out = []
    for cell, k in g.terms:
        b = cell.base
        for hc, ph, m2 in h.cells:
            hb = hc.base
            if h.periodic:
                shifts = [(i, j) for i in range(math.floor(b.x0 - hb.x1) + 1, math.ceil(b.x1 - hb.x0))
                          for j in range(math.floor(b.y0 - hb.y1) + 1, math.ceil(b.y1 - hb.y0))]
            else:
                shifts = [(0, 0)]
            for i, j in shifts:
                piece = b.intersect(hb.shift(i, j))
                if piece is not None:
                    out.append((Cell(piece, s), k * Coeff(m2, ph)))
    return StepFunction.of(out)


def generator_for(st: StrategySets, d0) -> StepFunction:
    """The generator prescribed by a strategy-set build."""
    if st.flavor == "L6iii":
        return build_shift_generator(st.sets["Omega"], ShiftSequence.delta(), st.l, d0)
    if st.flavor == "IXd-special":
        return build_IXd_generator(st.extra["q"], st.pair, st.sets)
    return build_L6_generator(st.flavor, st.sets, d0)

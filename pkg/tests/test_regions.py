import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, strategies as st

from gabor_multipliers import (Box, Cell, FoldLattice, Mat2, Region, disjoint, equivalent_rebuild, packs_by,
                               region_to_svg, tiles_by, translate, unit_square)
from gabor_multipliers.errors import MixedShear
from gabor_multipliers.regions import fold_region, frame_matrix, overlap_measure, subtract, sym_diff_measure

Z2 = Mat2.diag(1, 1)
fr = st.fractions(min_value=-3, max_value=3, max_denominator=6)


def test_translate_examples():
    S = unit_square()
    assert translate(S, (0, 0)) == S
    moved = translate(S, (1, F(3, 2)))
    assert moved.cells[0].base == Box.of(1, 2, F(3, 2), F(5, 2))


def test_sheared_translate_membership():
    cell = Region((Cell(Box.of(0, 1, 0, 1), 1),))
    moved = translate(cell, (1, 0))
    assert moved.cells[0].shear == 1
    rng = random.Random(3)
    for _ in range(10):
        p = (F(rng.randint(-20, 40), 10), F(rng.randint(-20, 40), 10))
        assert moved.contains(p) == cell.contains((p[0] - 1, p[1]))


def test_tiling_examples():
    assert tiles_by(unit_square(), Z2)
    assert not tiles_by(Region.boxes([Box.of(0, F(1, 2), 0, 1)]), Z2)
    stair = Region.boxes([Box.of(0, F(1, 2), 0, 1), Box.of(F(1, 2), 1, 1, 2)])
    assert tiles_by(stair, Z2)


def test_packing_examples():
    assert packs_by(unit_square(), Mat2.diag(1, 2))
    assert not packs_by(Region.boxes([Box.of(0, 1, 0, 3)]), Z2)
    q = 2
    omega = Region.boxes([Box.of(0, F(1, q), 0, 1).shift(F(j, q), j) for j in range(q)])
    assert packs_by(omega, Mat2.diag(F(1, q), q))


def test_mixed_shear_rejected():
    reg = Region((Cell(Box.of(0, 1, 0, 1), 0), Cell(Box.of(2, 3, 0, 1), 1)))
    with pytest.raises(MixedShear):
        tiles_by(reg, Z2)


@given(fr, fr)
def test_translate_preserves_measure(dx, dy):
    reg = Region.boxes([Box.of(0, F(1, 2), 0, 1), Box.of(1, F(5, 3), F(1, 3), 2)])
    assert translate(reg, (dx, dy)).measure == reg.measure


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), min_size=1, max_size=6, unique=True),
       st.integers(1, 3), st.integers(1, 3))
def test_tiles_implies_packs_and_measure(cells, a, b):
    # boxes on a 1/2 grid; the lattice is diag(a/2, b/2)
    boxes = [Box.of(F(i, 2), F(i + 1, 2), F(j, 2), F(j + 1, 2)) for i, j in cells]
    reg = Region.boxes(boxes)
    lat = Mat2.diag(F(a, 2), F(b, 2))
    if tiles_by(reg, lat):
        assert packs_by(reg, lat)
        assert reg.measure == abs(lat.det())


@given(st.integers(-4, 4), st.integers(-4, 4), st.integers(0, 3))
def test_canonical_domains(i, j, s):
    # the unit square tiles by Z^2 and D [0,1)^2 packs by D Z^2, for sheared frames as well
    S = Region.boxes([Box.of(i, i + 1, j, j + 1)], s)
    assert tiles_by(S, Z2)
    R = Region.boxes([Box.of(0, F(3, 2), 0, F(2, 3))])
    assert packs_by(R, Mat2.diag(F(3, 2), F(2, 3)))


def _point_in(boxes, x, y):
    return sum(1 for b in boxes if b.x0 <= x < b.x1 and b.y0 <= y < b.y1)


@given(st.lists(st.tuples(fr, fr, st.fractions(F(1, 6), 2, max_denominator=6),
                          st.fractions(F(1, 6), 2, max_denominator=6)), min_size=1, max_size=4),
       st.lists(st.tuples(fr, fr, st.fractions(F(1, 6), 2, max_denominator=6),
                          st.fractions(F(1, 6), 2, max_denominator=6)), min_size=1, max_size=4))
def test_subtract_against_grid_count(A, B):
    """Set difference agrees with a pointwise count on a fine grid of cell midpoints."""
    Ab = [Box.of(x, x + w, y, y + h) for x, y, w, h in A]
    Bb = [Box.of(x, x + w, y, y + h) for x, y, w, h in B]
    D = subtract(Ab, Bb)
    step = F(1, 12)
    for ix in range(-36, 60, 5):
        for iy in range(-36, 60, 5):
            x, y = ix * step + step / 2, iy * step + step / 2
            inside = _point_in(Ab, x, y) > 0 and _point_in(Bb, x, y) == 0
            assert (_point_in(D, x, y) > 0) == inside


@given(st.integers(0, 2), st.integers(0, 1), st.integers(0, 2), st.integers(0, 1))
def test_crt_rebuild_fold_equalities(ci, cj, pi, pj):
    """C'' folds like C under L and like C' under K, exactly."""
    K = Mat2.diag(F(2, 3), F(3, 2))
    C = Region.boxes([Box.of(F(ci, 3), F(ci + 1, 3), F(cj, 2), F(cj + 1, 2))])
    Cp = Region.boxes([Box.of(F(pi, 3), F(pi + 1, 3), F(pj, 2), F(pj + 1, 2))])
    out = equivalent_rebuild(C, Cp, Z2, K).region
    fL = lambda r: fold_region(r, Z2)[0]
    fK = lambda r: fold_region(r, K)[0]
    assert sym_diff_measure(fL(out), fL(C)) == 0
    assert sym_diff_measure(fK(out), fK(Cp)) == 0


def test_crt_rebuild_examples():
    C = Region.boxes([Box.of(0, F(1, 3), 0, 1)])
    Cp = Region.boxes([Box.of(F(1, 3), F(2, 3), 0, 1)])
    # [DERIVED] x = 0 mod 3 and x = 1 mod 2 gives grid index 3
    assert equivalent_rebuild(C, Cp, Z2, Mat2.diag(F(2, 3), 1)).region.cells[0].base == Box.of(1, F(4, 3), 0, 1)
    C = Region.boxes([Box.of(0, F(1, 3), 0, F(1, 2))])
    Cp = Region.boxes([Box.of(F(1, 3), F(2, 3), F(1, 2), 1)])
    out = equivalent_rebuild(C, Cp, Z2, Mat2.diag(F(2, 3), F(3, 2))).region
    assert out.cells[0].base == Box.of(1, F(4, 3), 2, F(5, 2))
    assert equivalent_rebuild(C, C, Z2, Mat2.diag(F(2, 3), F(3, 2))).region == C


def test_fold_lattice_triangular_basis():
    fl = FoldLattice(Mat2.of([[1, 1], [-1, 1]]))
    assert fl.u * fl.v == 2
    for x, y in fl.points_in(-3, 3, -3, 3):
        assert fl.contains_vector((x, y))
    assert not fl.contains_vector((1, 0))


def test_frame_matrix_inverts_shear():
    assert (frame_matrix(2) @ (1, 3)) == (1, 1)


def test_disjoint():
    a = Region.boxes([Box.of(0, 1, 0, 1)])
    b = Region.boxes([Box.of(1, 2, 0, 1)])
    assert disjoint(a, b)
    assert not disjoint(a, Region.boxes([Box.of(F(1, 2), 2, 0, 1)]))


def test_svg_has_one_path_per_cell():
    svg = region_to_svg({"A": unit_square(), "B": Region.boxes([Box.of(1, 2, 0, 1), Box.of(2, 3, 0, 1)])})
    assert svg.startswith("<svg") and svg.count("<polygon") + svg.count("<rect") + svg.count("<path") >= 3

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from gabor_multipliers import Box, Irrational, LatticePair, Mat2, Region, build_strategy_sets, classify, ixd_sets
from gabor_multipliers.errors import BadParameter, NoRecipe
from gabor_multipliers.regions import disjoint, packs_by, subtract, tiles_by
from gabor_multipliers.strategies import TABLE, delta_bound, table_key

from conftest import EXACT_SUITE, PAIRS

EXTRA = {
    "II(c)": Mat2.diag(2, F(5, 2)),
    "II(d)": Mat2.diag(F(3, 2), 2),
    "IV(a)": Mat2.of([[2, 1], [0, 2]]),
    "IX(b)": Mat2.diag(F(2, 3), 3),
    "IX(c)": Mat2.diag(F(1, 3), F(7, 2)),
    "X(a)": Mat2.of([[F(3, 2), F(3, 2)], [F(-3, 2), F(3, 2)]]),
}


def test_type_one_pair_21_sets():
    # (l2, k1) with delta = 1/4: a horizontal strip split
    s = build_strategy_sets(classify(Mat2.diag(1, F(3, 2))), (2, 1), F(1, 4))
    assert s.flavor == "L6ii"
    base = {k: [c.base for c in v.cells] for k, v in s.sets.items()}
    assert base["E1"] == [Box.of(0, 1, F(1, 4), 1)]
    assert base["E2"] == [Box.of(0, 1, 0, F(1, 4))]
    assert base["E3"] == [Box.of(1, 2, 0, F(1, 4))]
    assert base["E4"] == [Box.of(0, 1, 1, F(5, 4))]
    assert base["E5"] == [Box.of(1, 2, 1, F(5, 4))]


@pytest.mark.parametrize("ij", PAIRS)
def test_identity_uses_sequence_flavor(ij):
    s = build_strategy_sets(classify(Mat2.diag(1, 1)), ij)
    assert s.flavor == "L6iii" and set(s.sets) == {"Omega"}


def test_ixd_sets_q2():
    built = ixd_sets(2, (2, 2))
    E = built["sets"]
    assert E["E3"].cells[0].base == E["E1"].cells[0].base.shift(0, 2)
    rest = subtract(built["omega"].frame_boxes(), E["E1"].frame_boxes() + E["E2'"].frame_boxes())
    assert not rest and not E["Omega0"].cells
    assert tiles_by(built["omega"], Mat2.diag(1, 1))
    assert packs_by(built["omega"], Mat2.diag(F(1, 2), 2))


@pytest.mark.parametrize("q", [2, 3, 4])
def test_ixd_sets_omega0(q):
    built = ixd_sets(q, (2, 2))
    E = built["sets"]
    left = subtract(built["omega"].frame_boxes(), E["E1"].frame_boxes() + E["E2'"].frame_boxes())
    assert sum(b.area for b in left) == E["Omega0"].measure == F(q - 2, q)


@pytest.mark.parametrize("name,D", list(EXACT_SUITE.items()) + list(EXTRA.items()),
                         ids=list(EXACT_SUITE) + list(EXTRA))
def test_every_build_satisfies_its_hypotheses(name, D):
    tag = classify(D)
    assert tag.label == name
    pair = LatticePair.reduced(tag.canonical)
    for ij in PAIRS:
        s = build_strategy_sets(tag, ij)
        if s.flavor == "L6iii":
            assert tiles_by(s.sets["Omega"], pair.L_basis) and packs_by(s.sets["Omega"], pair.K_basis)
            continue
        if s.flavor == "IXd-special":
            continue
        E = s.sets
        assert disjoint(E["E1"], E["E2"], E["E3"], E["E4"], E["E5"]) or s.flavor in ("L6ii", "L7ii")
        assert tiles_by(s.omega, pair.L_basis)


def test_irrational_build_reports_defect():
    s2 = math.sqrt(2)
    tag = classify(Mat2.diag(Irrational(1 / s2, "1/sqrt2"), Irrational(s2, "sqrt2")))
    for ij in PAIRS:
        s = build_strategy_sets(tag, ij)
        assert s.mode == "epsilon" and float(s.defect) <= 1e-3


def test_type_xi_has_no_recipe():
    s2 = math.sqrt(2)
    rot = Mat2(Irrational(1.2, "a"), Irrational(s2, "b"), Irrational(-s2, "-b"), Irrational(1.2, "a"))
    with pytest.raises(NoRecipe, match="flip"):
        build_strategy_sets(classify(rot), (1, 1))


def test_delta_outside_interval_rejected():
    tag = classify(Mat2.diag(1, F(3, 2)))
    assert delta_bound("I_21", tag.params) == F(1, 2)
    with pytest.raises(BadParameter):
        build_strategy_sets(tag, (2, 1), F(1, 2))
    with pytest.raises(BadParameter):
        build_strategy_sets(tag, (2, 1), F(0))


@given(st.fractions(min_value=F(1, 100), max_value=F(49, 100), max_denominator=100))
def test_any_admissible_delta_builds(delta):
    tag = classify(Mat2.diag(1, F(3, 2)))
    s = build_strategy_sets(tag, (2, 1), delta)
    assert s.sets["E2"].measure == delta


def test_table_is_complete_for_pairs():
    for key, row in TABLE.items():
        assert set(row) == set(PAIRS), key
    flagged = [k for k, row in TABLE.items() if any(r.analogy for r in row.values())]
    assert flagged and all(k.startswith(("VII", "VIII")) for k in flagged)
    assert table_key(classify(Mat2.diag(F(1, 2), 2))) in ("IX.d.q", "IX.d")

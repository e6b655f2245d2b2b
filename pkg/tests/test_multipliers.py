import random
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from gabor_multipliers import (Box, LatticePair, Mat2, cocycle_check, make_multiplier, propagate_base_relations,
                               unimodular_check)
from gabor_multipliers.errors import BadInput, BaseRelationFails
from gabor_multipliers.multipliers import witness_matches

PAIR = LatticePair.reduced(Mat2.diag(1, F(3, 2)))
phase = st.fractions(min_value=0, max_value=1, max_denominator=12)


def test_character_passes_everything():
    h = make_multiplier("character", c=(F(1, 3), F(2, 5)))
    assert unimodular_check(h).passed
    assert cocycle_check(h, PAIR, 3).passed
    assert propagate_base_relations(h, PAIR, 2).passed


@given(st.integers(1, 7), phase, phase, st.integers(0, 2))
def test_periodic_steps_satisfy_identity(cut, p1, p2, shear):
    c = F(cut, 8)
    h = make_multiplier("periodic_step", phases=[((0, c, 0, 1), p1), ((c, 1, 0, 1), p2)], shear=shear)
    assert cocycle_check(h, PAIR, 1).passed


def test_periodic_step_radius_three():
    h = make_multiplier("periodic_step", phases=[((0, F(1, 3), 0, F(1, 2)), F(1, 5)),
                                                 ((F(1, 3), 1, 0, F(1, 2)), F(2, 3)),
                                                 ((0, 1, F(1, 2), 1), F(3, 4))])
    res = cocycle_check(h, PAIR, 3)
    # l = 0 or k = 0 is trivial and skipped
    assert res.passed and res.checked == 48 ** 2


def test_counterexample_witness_frozen():
    # [DERIVED] the sign flip on [0,1/4) x [0,1) breaks the (l2, k2) identity at x = (1/8, 1/2)
    h = make_multiplier("counterexample", pair=PAIR)
    w = h.witness
    assert w["x"] == (F(1, 8), F(1, 2)) and w["l"] == (0, 1) and w["k"] == (0, F(3, 2))
    res = cocycle_check(h, PAIR, 1)
    assert not res.passed
    with pytest.raises(BaseRelationFails):
        propagate_base_relations(h, PAIR, 2)


def test_magnitude_override_is_not_unimodular():
    h = make_multiplier("periodic_step", phases=[((0, F(1, 2), 0, 1), 0, 2), ((F(1, 2), 1, 0, 1), 0)])
    res = unimodular_check(h)
    assert not res.passed and res.witness is not None


def test_periodic_step_must_partition():
    with pytest.raises(BadInput):
        make_multiplier("periodic_step", phases=[((0, F(1, 2), 0, 1), 0)])


def test_witness_matches_itself_modulo_lattice():
    h = make_multiplier("counterexample", pair=PAIR)
    w = h.witness
    shifted = {"x": (w["x"][0] + 2, w["x"][1] - 1), "k": (0, F(-3, 2))}
    assert witness_matches(w, shifted, h, PAIR)
    assert not witness_matches(w, {"x": w["x"], "k": (1, 0)}, h, PAIR)


@pytest.mark.parametrize("seed", range(3))
def test_propagation_random_periodic(seed):
    rng = random.Random(seed)
    c = F(rng.randint(1, 5), 6)
    h = make_multiplier("periodic_step", phases=[((0, 1, 0, c), F(rng.randint(0, 9), 10)),
                                                 ((0, 1, c, 1), F(rng.randint(0, 9), 10))],
                        character=(F(rng.randint(-3, 3), 2), F(1, 3)))
    assert propagate_base_relations(h, PAIR, 2).passed

import json
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from gabor_multipliers import (Box, Cell, Coeff, Irrational, LatticePair, Mat2, Region, StepFunction,
                               build_IXd_generator, make_multiplier)
from gabor_multipliers.errors import BadInput, ParseError
from gabor_multipliers.serialize import (dumps, load_file, loads, mat_from_json, phase_from_json, phase_to_json,
                                         region_from_json, region_to_json, scalar_from_json, scalar_to_json,
                                         step_from_json, step_to_json)

fracs = st.fractions(min_value=-20, max_value=20, max_denominator=50)


@given(fracs)
def test_scalar_round_trip(x):
    assert scalar_from_json(scalar_to_json(x)) == x


def test_irrational_round_trip():
    v = scalar_from_json(scalar_to_json(Irrational(2 ** 0.5, "sqrt2")))
    assert isinstance(v, Irrational) and v.label == "sqrt2"


def test_matrix_shape_checked():
    assert mat_from_json([["1", "1/2"], ["0", "3"]]).equals(Mat2.of([[1, F(1, 2)], [0, 3]]))
    with pytest.raises(BadInput):
        mat_from_json([["1", "0"]])


@given(st.lists(st.tuples(fracs, fracs, st.integers(-2, 2)), min_size=1, max_size=5))
def test_region_round_trip(corners):
    reg = Region(tuple(Cell(Box.of(x, x + 1, y, y + F(1, 3)), s) for x, y, s in corners))
    assert region_from_json(json.loads(json.dumps(region_to_json(reg)))) == reg


def test_step_round_trip_exact():
    g = build_IXd_generator(3)
    back = step_from_json(json.loads(json.dumps(step_to_json(g))))
    assert back == g and back.exact


def test_phase_round_trip_keeps_witness():
    pair = LatticePair.reduced(Mat2.diag(1, F(3, 2)))
    h = make_multiplier("counterexample", pair=pair, half_width=3)
    data = json.loads(dumps(h))
    back = phase_from_json(data)
    assert back.cells == h.cells and data["witness"]["x"] == ["1/8", "1/2"]
    ch = phase_from_json(phase_to_json(make_multiplier("character", c=(F(1, 2), 0))))
    assert ch.character == (F(1, 2), 0)


def test_parse_error_has_line(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "D": [["1", "0"],\n  ["0" "2"]]\n}\n')
    with pytest.raises(ParseError) as info:
        load_file(p, "raw")
    assert info.value.lineno == 3
    with pytest.raises(ParseError):
        loads("")


def test_dumps_is_deterministic():
    g = StepFunction.of([(Cell(Box.of(0, 1, 0, 1), 0), Coeff.of(F(1, 2), F(1, 3)))])
    assert dumps({"b": g, "a": F(1, 3)}) == dumps({"a": F(1, 3), "b": g})

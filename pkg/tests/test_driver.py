import json
import math
import subprocess
import sys
from fractions import Fraction as F

import pytest

from gabor_multipliers import Mat2, make_multiplier
from gabor_multipliers.driver import (EXIT_FAIL, EXIT_INPUT, EXIT_PARTIAL, EXIT_PASS, Instance, parse_instance,
                                      run_certificate, run_multiplier_check, run_verify)
from gabor_multipliers.errors import BadInput
from gabor_multipliers.serialize import dumps
from gabor_multipliers import build_IXd_generator
from gabor_multipliers.cli import main


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def test_instance_needs_exactly_one_form():
    with pytest.raises(BadInput):
        Instance()
    with pytest.raises(BadInput):
        Instance(A=Mat2.diag(1, 1), B=Mat2.diag(1, 1), D=Mat2.diag(1, 1))
    with pytest.raises(BadInput):
        Instance(A=Mat2.diag(1, 1))


def test_type_one_certificate():
    cert, code = run_certificate(parse_instance({"D": [["1", "0"], ["0", "3/2"]]}))
    assert code == EXIT_PASS and cert["conclusion"]["status"] == "full-cocycle-coverage"
    assert cert["type_tag"]["label"] == "I" and cert["mode"] == "exact"
    assert all(p["report"]["condition4"]["worst_residual"] == 0 for p in cert["per_pair"].values())


def test_certificate_is_byte_identical():
    inst = {"D": [["2/3", "0"], ["0", "3/2"]], "options": {"seed": 4}}
    a = dumps(run_certificate(parse_instance(inst))[0])
    b = dumps(run_certificate(parse_instance(inst))[0])
    assert a == b and '"worst_residual": "0"' in a


def test_general_pair_certificate():
    cert, code = run_certificate(parse_instance({"A": [["1", "0"], ["0", "1"]],
                                                 "B": [["1/2", "1/4"], ["-1/4", "1/2"]]}))
    assert code == EXIT_PASS and "P" in cert and cert["type_tag"]["label"] == "X(a)"


def test_type_xi_is_partial():
    s2 = math.sqrt(2)
    inst = parse_instance({"D": [[{"approx": 1.2, "label": "a"}, {"approx": s2, "label": "b"}],
                                 [{"approx": -s2, "label": "-b"}, {"approx": 1.2, "label": "a"}]]})
    cert, code = run_certificate(inst)
    assert code == EXIT_PARTIAL
    assert cert["conclusion"] == {"status": "partial", "uncovered": ["1,1", "1,2", "2,1", "2,2"]}
    assert all(p["status"] == "no-recipe" for p in cert["per_pair"].values())


def test_verify_tile_and_ixd(tmp_path):
    tile = [{"cell": {"base": ["0", "1", "0", "1"]}, "mag2": "1/2", "phase": "0"}]
    rep, code = run_verify(parse_instance({"D": [["1", "0"], ["0", "2"]]}), write(tmp_path, "g.json", tile))
    assert code == EXIT_PASS and rep["agree"]
    g = write(tmp_path, "ixd.json", dumps(build_IXd_generator(2)))
    rep, code = run_verify(parse_instance({"D": [["1/2", "0"], ["0", "2"]]}), g)
    assert code == EXIT_PASS and rep["montecarlo"]["pass"]


def test_multiplier_files(tmp_path):
    inst = parse_instance({"D": [["1", "0"], ["0", "3/2"]]})
    ch = write(tmp_path, "c.json", dumps(make_multiplier("character", c=(F(1, 3), 0))))
    assert run_multiplier_check(inst, ch)[1] == EXIT_PASS
    cex = write(tmp_path, "x.json", dumps(make_multiplier("counterexample", pair=inst.lattice_pair())))
    rep, code = run_multiplier_check(inst, cex)
    assert code == EXIT_FAIL and rep["stored_witness"]["x"] == ["1/8", "1/2"]
    assert rep["cocycle"]["witness"]
    mag = make_multiplier("periodic_step", phases=[((0, F(1, 2), 0, 1), 0, 2), ((F(1, 2), 1, 0, 1), 0)])
    rep, code = run_multiplier_check(inst, write(tmp_path, "m.json", dumps(mag)))
    assert code == EXIT_FAIL and not rep["unimodular"]["pass"]


def test_cli_subcommands(tmp_path, capsys):
    inst = write(tmp_path, "i.json", {"D": [["1", "0"], ["0", "3/2"]]})
    assert main(["classify", inst]) == EXIT_PASS
    assert json.loads(capsys.readouterr().out)["type_tag"]["label"] == "I"
    out = tmp_path / "c.json"
    assert main(["certificate", inst, "--delta", "1/4", "--window-radius", "1", "--trunc", "3",
                 "--seed", "2", "--out", str(out)]) == EXIT_PASS
    cert = json.loads(out.read_text())
    assert cert["instance"]["options"]["delta"] == "1/4" and "frame_sum" in cert["per_pair"]["2,1"]
    svg = tmp_path / "p.svg"
    assert main(["plot", inst, "--pair", "2,1", "--out", str(svg)]) == EXIT_PASS
    assert svg.read_text().startswith("<svg")
    assert main(["certificate", write(tmp_path, "bad.json", "{oops")]) == EXIT_INPUT
    assert "line 1" in capsys.readouterr().err


def test_cli_module_entry(tmp_path):
    inst = write(tmp_path, "i.json", {"D": [["1", "0"], ["0", "2"]]})
    g = write(tmp_path, "g.json", [{"cell": {"base": ["0", "1", "0", "1"]}, "mag2": "1", "phase": "0"}])
    res = subprocess.run([sys.executable, "-m", "gabor_multipliers", "verify", inst, g, "--epsilon", "1e-9"],
                         capture_output=True, text=True)
    assert res.returncode == EXIT_FAIL
    assert json.loads(res.stdout)["report"]["mode"] == "epsilon"

"""Certificate pipeline: parse, reduce, classify, build, verify, report.

Every entry point returns a plain dict ready for :func:`serialize.dumps` and
an exit code: 0 full pass, 1 verification failure, 2 input error,
3 missing recipe or partial coverage.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadInput, BaseRelationFails, NoRecipe, ParseError
from .frames import EPS_DENSE, frame_sum_oracle, montecarlo_check, verify_conditions
from .generators import Coeff, StepFunction, generator_for
from .multipliers import (PhaseFunction, cocycle_check, make_multiplier, propagate_base_relations,
                          unimodular_check)
from .numerics import LatticePair, Mat2, TypeTag, as_scalar, classify, reduce_to_canonical
from .regions import Box, Region, region_to_svg
from .serialize import SCHEMA_VERSION, load_file, mat_from_json
from .strategies import PAIRS, build_strategy_sets

__all__ = ["Instance", "EXIT_PASS", "EXIT_FAIL", "EXIT_INPUT", "EXIT_PARTIAL", "parse_instance",
           "load_instance", "classify_instance", "run_certificate", "run_verify", "run_multiplier_check",
           "plot_instance"]

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_PARTIAL = 0, 1, 2, 3


@dataclass
class Instance:
    """Either a general pair ``(A, B)`` or a reduced matrix ``D``, plus run options."""

    A: Mat2 | None = None
    B: Mat2 | None = None
    D: Mat2 | None = None
    delta: Fraction | None = None
    epsilon: float | None = None
    seed: int = 0
    trunc: int | None = None
    window_radius: int = 3
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        general = self.A is not None or self.B is not None
        if general == (self.D is not None):
            raise BadInput("give exactly one of (A, B) or D")
        if general and (self.A is None or self.B is None):
            raise BadInput("a general instance needs both A and B")

    def lattice_pair(self) -> LatticePair:
        pair = LatticePair.reduced(self.D) if self.D is not None else LatticePair.general(self.A, self.B)
        pair.validate()
        return pair

    def options(self) -> dict:
        return {"delta": self.delta, "epsilon": self.epsilon, "seed": self.seed,
                "trunc": self.trunc, "window_radius": self.window_radius}

    def to_dict(self) -> dict:
        out = {"options": self.options()}
        if self.D is not None:
            out["D"] = self.D
        else:
            out["A"], out["B"] = self.A, self.B
        return out


def parse_instance(data, **overrides) -> Instance:
    """Build an Instance from decoded JSON; non-None ``overrides`` win over file options."""
    if not isinstance(data, dict):
        raise BadInput("an instance is a JSON object")
    opts = dict(data.get("options", {}))
    opts.update({k: v for k, v in overrides.items() if v is not None})
    mats = {k: mat_from_json(data[k]) for k in ("A", "B", "D") if k in data}
    delta = opts.get("delta")
    return Instance(mats.get("A"), mats.get("B"), mats.get("D"),
                    as_scalar(delta) if delta is not None else None,
                    float(opts["epsilon"]) if opts.get("epsilon") is not None else None,
                    int(opts.get("seed", 0)),
                    int(opts["trunc"]) if opts.get("trunc") is not None else None,
                    int(opts.get("window_radius", 3)))


def load_instance(path, **overrides) -> Instance:
    data = load_file(path, "raw")
    try:
        return parse_instance(data, **overrides)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad instance: {exc}") from exc


def _reduce(inst: Instance):
    if inst.D is not None:
        inst.lattice_pair()
        return inst.D, None
    inst.lattice_pair()
    return reduce_to_canonical(inst.A, inst.B)


def _tag_dict(tag: TypeTag) -> dict:
    U, V = tag.transform
    return {"label": tag.label, "major": tag.major, "subcase": tag.subcase,
            "params": tag.params, "canonical": tag.canonical, "transform": {"U": U, "V": V}}


def classify_instance(inst: Instance) -> dict:
    D, P = _reduce(inst)
    tag = classify(D)
    out = {"schema_version": SCHEMA_VERSION, "D": D, "type_tag": _tag_dict(tag)}
    if P is not None:
        out["P"] = P
    return out


def _unit_test_function(shear: int) -> StepFunction:
    return StepFunction.of([(c, Coeff.of(1)) for c in Region.boxes([Box.of(0, 1, 0, 1)], shear).cells])


def _probe_multiplier(seed: int) -> PhaseFunction:
    """A deterministic Z^2-periodic step multiplier times a rational character."""
    rng = random.Random(seed)
    cut = Fraction(rng.randint(1, 7), 8)
    phases = [(Box.of(0, cut, 0, 1), Fraction(rng.randint(0, 11), 12)),
              (Box.of(cut, 1, 0, 1), Fraction(rng.randint(0, 11), 12))]
    c = (Fraction(rng.randint(-4, 4), 3), Fraction(rng.randint(-4, 4), 5))
    return make_multiplier("periodic_step", phases=phases, character=c)


def run_certificate(inst: Instance) -> tuple[dict, int]:
    """Walk the four pairs of the classified instance and verify each generator."""
    D, P = _reduce(inst)
    tag = classify(D)
    pair = LatticePair.reduced(tag.canonical)
    d0 = pair.target
    per_pair, uncovered, failed = {}, [], False
    modes = set()
    for ij in PAIRS:
        key = f"{ij[0]},{ij[1]}"
        try:
            st = build_strategy_sets(tag, ij, inst.delta)
        except NoRecipe as exc:
            per_pair[key] = {"status": "no-recipe", "reason": str(exc)}
            uncovered.append(key)
            continue
        g = generator_for(st, d0)
        eps = inst.epsilon if inst.epsilon is not None else (EPS_DENSE if st.mode == "epsilon" else None)
        rep = verify_conditions(g, pair, d0, eps)
        modes.add(rep.mode)
        entry = {"status": "pass" if rep.passed else "fail", "flavor": st.flavor,
                 "l": st.l, "k": st.k, "delta": st.delta, "analogy": st.analogy,
                 "depends_on": st.depends_on, "note": st.note, "shear": st.shear,
                 "sets": st.summary(), "generator_cells": len(g), "defect": st.defect,
                 "report": rep.to_dict()}
        if inst.trunc is not None:
            entry["frame_sum"] = {"trunc": inst.trunc,
                                  "ratio": frame_sum_oracle(g, pair, _unit_test_function(g.shear), inst.trunc)}
        per_pair[key] = entry
        if not rep.passed:
            failed = True
            uncovered.append(key)
    N = inst.window_radius
    probe = _probe_multiplier(inst.seed)
    try:
        span = propagate_base_relations(probe, pair, N)
        span_d = {"N": N, "pass": span.passed, "checked": span.checked, "probe": probe}
    except BaseRelationFails as exc:
        span_d = {"N": N, "pass": False, "error": str(exc), "probe": probe}
    full = not uncovered and span_d["pass"]
    cert = {
        "schema_version": SCHEMA_VERSION,
        "instance": inst.to_dict(),
        "D": D,
        "type_tag": _tag_dict(tag),
        "per_pair": per_pair,
        "lemma5_span": span_d,
        "conclusion": {"status": "full-cocycle-coverage"} if full
        else {"status": "partial", "uncovered": uncovered},
        "mode": "exact" if modes == {"exact"} else ("epsilon" if modes else "none"),
    }
    if P is not None:
        cert["P"] = P
    code = EXIT_PASS if full else (EXIT_FAIL if failed or not span_d["pass"] else EXIT_PARTIAL)
    return cert, code


def run_verify(inst: Instance, g_file) -> tuple[dict, int]:
    """Exact (or epsilon) verification plus the Monte-Carlo cross-check of a generator file."""
    g = load_file(g_file, "step")
    pair = inst.lattice_pair()
    rep = verify_conditions(g, pair, None, inst.epsilon)
    mc = montecarlo_check(g, pair, None, seed=inst.seed,
                          tol=1e-9 if rep.mode == "exact" else max(rep.eps, 1e-9) * 10)
    out = {"schema_version": SCHEMA_VERSION, "instance": inst.to_dict(), "report": rep.to_dict(),
           "montecarlo": mc.to_dict(), "agree": rep.passed == mc.passed or bool(mc.notes)}
    if inst.trunc is not None:
        out["frame_sum"] = {"trunc": inst.trunc,
                            "ratio": frame_sum_oracle(g, pair, _unit_test_function(g.shear), inst.trunc)}
    return out, EXIT_PASS if rep.passed else EXIT_FAIL


def run_multiplier_check(inst: Instance, h_file) -> tuple[dict, int]:
    """Unimodularity, the cocycle identity on a window and base-relation propagation."""
    h = load_file(h_file, "phase")
    pair = inst.lattice_pair()
    R = inst.window_radius
    uni = unimodular_check(h)
    coc = cocycle_check(h, pair, R)
    try:
        prop = propagate_base_relations(h, pair, R).to_dict()
    except BaseRelationFails as exc:
        prop = {"pass": False, "error": str(exc)}
    out = {"schema_version": SCHEMA_VERSION, "instance": inst.to_dict(), "window_radius": R,
           "unimodular": uni.to_dict(), "cocycle": coc.to_dict(), "propagation": prop,
           "pass": uni.passed and coc.passed and prop["pass"]}
    if h.witness is not None:
        out["stored_witness"] = h.witness
    return out, EXIT_PASS if out["pass"] else EXIT_FAIL


def plot_instance(inst: Instance, pair_index=(2, 2)) -> str:
    """SVG of the strategy sets for one pair."""
    D, _ = _reduce(inst)
    tag = classify(D)
    st = build_strategy_sets(tag, tuple(pair_index), inst.delta)
    return region_to_svg({name: r for name, r in st.sets.items() if r.cells})

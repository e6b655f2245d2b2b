"""Acceptance criteria 1-9; each test prints one PASS/FAIL line."""
import math
import random
import time
from fractions import Fraction as F

import pytest

from gabor_multipliers import (Box, Cell, Coeff, Irrational, LatticePair, Mat2, Region, StepFunction,
                               build_IXd_generator, build_strategy_sets, classify, cocycle_check,
                               equivalent_rebuild, frame_sum_oracle, generator_for, ixd_sets, make_multiplier,
                               montecarlo_check, pointwise_product, propagate_base_relations, run_certificate,
                               theorem0_closure, unimodular_check, verify_conditions)
from gabor_multipliers.driver import Instance
from gabor_multipliers.frames import correlation_values, matching_failure

from conftest import EXACT_SUITE, PAIRS


@pytest.fixture
def report(capsys):
    def _report(n, ok, msg):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {msg}")
        assert ok, msg
    return _report


@pytest.fixture(scope="module")
def certified():
    """Every certified generator of the exact suite: {(label, pair): (g, LatticePair)}."""
    out = {}
    for label, D in EXACT_SUITE.items():
        tag = classify(D)
        pair = LatticePair.reduced(tag.canonical)
        for ij in PAIRS:
            out[(label, ij)] = (generator_for(build_strategy_sets(tag, ij), pair.target), pair)
    return out


def _is_exact_zero(x):
    return isinstance(x, (int, F)) and x == 0


def test_criterion_1_exact_certificates(report):
    slow, bad = [], []
    for label, D in EXACT_SUITE.items():
        t0 = time.perf_counter()
        cert, code = run_certificate(Instance(D=D))
        dt = time.perf_counter() - t0
        if dt >= 60:
            slow.append((label, dt))
        zeros = all(_is_exact_zero(p["report"]["condition4"]["worst_residual"])
                    and _is_exact_zero(p["report"]["condition5"]["worst_residual"])
                    for p in cert["per_pair"].values())
        if not (code == 0 and cert["conclusion"]["status"] == "full-cocycle-coverage" and zeros
                and cert["type_tag"]["label"] == label):
            bad.append(label)
    report(1, not slow and not bad, f"{len(EXACT_SUITE)} instances, failures={bad}, over 60 s={slow}")


def test_criterion_2_closure(report, certified):
    rng = random.Random(2024)
    failures, runs = [], 0
    for (label, ij), (g, pair) in certified.items():
        hs = [make_multiplier("character", c=(F(rng.randint(-9, 9), rng.randint(1, 7)),
                                              F(rng.randint(-9, 9), rng.randint(1, 7)))) for _ in range(10)]
        for _ in range(3):
            cut = F(rng.randint(1, 5), 6)
            hs.append(make_multiplier("periodic_step", shear=g.shear,
                                      phases=[((0, 1, 0, cut), F(rng.randint(0, 11), 12)),
                                              ((0, cut, cut, 1), F(rng.randint(0, 11), 12)),
                                              ((cut, 1, cut, 1), F(rng.randint(0, 11), 12))]))
        for h in hs:
            runs += 1
            rep = theorem0_closure(h, g, pair)
            if not (rep.passed and _is_exact_zero(rep.condition4.worst_residual)
                    and _is_exact_zero(rep.condition5.worst_residual)):
                failures.append((label, ij))
    report(2, not failures, f"{runs} closure runs over {len(certified)} generators, failures={failures[:5]}")


def test_criterion_3_magnitude_detector(report):
    rng = random.Random(3)
    pair = LatticePair.reduced(Mat2.diag(1, F(3, 2)))
    h = make_multiplier("periodic_step", phases=[((0, F(1, 2), 0, 1), 0, 2), ((F(1, 2), 1, 0, 1), 0)])
    assert not unimodular_check(h).passed
    detected = 0
    for _ in range(20):
        v = (F(rng.randint(-30, 30), 7), F(rng.randint(-30, 30), 5))
        tile = StepFunction.of([(Cell(Box.of(0, 1, 0, 1), 0).translate(v), Coeff.of(pair.target))])
        assert verify_conditions(tile, pair).passed
        rep = verify_conditions(pointwise_product(h, tile), pair)
        w = rep.condition4.witness
        if not rep.condition4.passed and w is not None and h.value(w["x"])[1] == 2:
            detected += 1
    report(3, detected == 20, f"condition-4 witness in the override cell for {detected}/20 translations")


def test_criterion_4_propagation(report):
    rng = random.Random(4)
    pair = LatticePair.reduced(Mat2.diag(1, F(3, 2)))
    fails, checked = 0, 0
    for i in range(10):
        cut = F(rng.randint(1, 7), 8)
        ch = (F(rng.randint(-5, 5), 3), F(rng.randint(-5, 5), 4)) if i % 2 else None
        h = make_multiplier("periodic_step", character=ch,
                            phases=[((0, cut, 0, 1), F(rng.randint(0, 9), 10)),
                                    ((cut, 1, 0, 1), F(rng.randint(0, 9), 10))])
        assert cocycle_check(h, pair, 1, pairs=PAIRS).passed
        res = propagate_base_relations(h, pair, 5)
        checked += res.checked
        fails += 0 if res.passed else 1
    report(4, fails == 0, f"10 multipliers, |m|,|n| <= 5, {checked} identities, {fails} failures")


def _perturb(g: StepFunction, how: str) -> StepFunction:
    terms = list(g.terms)
    i = max(range(len(terms)), key=lambda t: terms[t][0].measure)
    c, k = terms[i]
    if how == "scale":
        terms[i] = (c, Coeff(k.mag2 * 2, k.phase))
    else:
        terms = [(cc, Coeff(kk.mag2, (kk.phase + F(1, 4)) % 1)) if kk.phase == F(1, 2) else (cc, kk)
                 for cc, kk in terms]
    return StepFunction.of(terms)


def test_criterion_5_oracle_agreement(report, certified):
    rng = random.Random(5)
    keys = sorted(certified, key=str)
    good, bad = [], []
    for n in range(25):
        g, pair = certified[keys[n % len(keys)]]
        v = (rng.randint(-3, 3), rng.randint(-3, 3))
        good.append((StepFunction.of([(c.translate(v), k) for c, k in g.terms]), pair))
    for n in range(25):
        g, pair = certified[keys[(7 * n + 3) % len(keys)]]
        how = "phase" if n % 2 and any(k.phase == F(1, 2) for _, k in g.terms) else "scale"
        bad.append((_perturb(g, how), pair))
    disagree, worst_mc = [], 0.0
    for tag, group in (("pass", good), ("fail", bad)):
        for idx, (g, pair) in enumerate(group):
            rep = verify_conditions(g, pair)
            mc = montecarlo_check(g, pair, n_points=10_000, seed=11)
            if rep.passed != mc.passed or rep.passed != (tag == "pass"):
                disagree.append((tag, idx, rep.passed, mc.passed))
            if tag == "pass":
                worst_mc = max(worst_mc, mc.condition4.worst_residual, mc.condition5.worst_residual)
    ok = not disagree and worst_mc <= 1e-12
    report(5, ok, f"50 instances, disagreements={disagree}, worst MC residual on passes={worst_mc:.2e}")


def test_criterion_6_ixd_sums(report):
    bad = []
    for q in (2, 3):
        pair = LatticePair.reduced(Mat2.diag(F(1, q), q))
        k1, k2 = (F(1, q), 0), (0, q)
        ks = {"-k1": (-k1[0], 0), "+k2": k2, "-k2": (0, -k2[1]),
              "-k1+k2": (-k1[0], k2[1]), "-k1-k2": (-k1[0], -k2[1])}
        for variant in ((2, 2), (1, 2)):
            g = build_IXd_generator(q, variant)
            E = ixd_sets(q, variant)["sets"]
            region = E["E1"] | E["E2"]
            for name, k in ks.items():
                vals = correlation_values(g, pair, k, region)
                if not vals or not all(z for _, z, _ in vals):
                    bad.append((q, variant, name))
    report(6, not bad, f"q in (2, 3), both variants, five k each, nonzero cells at {bad}")


def test_criterion_7_dense_chain(report):
    s2 = math.sqrt(2)
    D = Mat2.diag(Irrational(1 / s2, "1/sqrt2"), Irrational(s2, "sqrt2"))
    tag = classify(D)
    defects = [float(build_strategy_sets(tag, ij).defect) for ij in PAIRS]
    cert, code = run_certificate(Instance(D=D))
    res = [float(p["report"][c]["worst_residual"]) for p in cert["per_pair"].values()
           for c in ("condition4", "condition5")]
    ok = (tag.major == "VI" and max(defects) <= 1e-3 and cert["mode"] == "epsilon"
          and all(p["status"] == "pass" for p in cert["per_pair"].values()) and max(res) <= 5e-3)
    report(7, ok, f"max K-fold defect={max(defects):.2e}, max residual={max(res):.2e}, exit={code}")


def test_criterion_8_frame_sum(report):
    unit = Region.boxes([Box.of(0, 1, 0, 1)]).cells
    f = StepFunction.of([(c, Coeff.of(1)) for c in unit])
    g = StepFunction.of([(c, Coeff.of(F(1, 2))) for c in unit])
    pair = LatticePair.reduced(Mat2.diag(1, 2))
    vals = [frame_sum_oracle(g, pair, f, t) for t in (5, 10, 20, 40)]
    control = frame_sum_oracle(f, LatticePair.reduced(Mat2.diag(1, F(3, 2))), f, 40)
    ok = (all(a <= b for a, b in zip(vals, vals[1:])) and vals[-1] <= 1 + 1e-12 and vals[2] >= 0.98
          and abs(control - 1) > 0.05)
    report(8, ok, f"ratios={[round(v, 5) for v in vals]}, control plateau={control:.4f}")


def test_criterion_9_counterexamples(report, certified):
    matched, missing, immune = 0, [], []
    for label, D in EXACT_SUITE.items():
        pair = LatticePair.reduced(classify(D).canonical)
        gens = [certified[(label, ij)][0] for ij in PAIRS]
        for target in PAIRS:
            hit = False
            # the generator of the target pair first, then the others of the same lattice pair
            order = [gens[PAIRS.index(target)]] + [g for i, g in enumerate(gens) if PAIRS[i] != target]
            for g in order:
                h = make_multiplier("counterexample", pair=pair, target=target, shear=g.shear)
                rep = verify_conditions(pointwise_product(h, g), pair)
                if not rep.passed and matching_failure(h, rep, pair) is not None:
                    hit = True
                    break
            if hit:
                matched += 1
            elif label in ("III", "V"):
                immune.append((label, target))
            else:
                missing.append((label, target))
    # K = L for Types III and V: every compactly supported step generator is a unimodular
    # function on a tile, so h g stays Parseval for any unimodular h (recorded as out of scope)
    ok = not missing and len(immune) == 8
    report(9, ok, f"{matched} counterexamples matched on 7 types; "
                  f"Types III and V out of scope ({len(immune)} immune); unmatched={missing}")

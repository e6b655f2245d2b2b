"""Build, verify and serialise the four generators of D = diag(1, 3/2)."""
from fractions import Fraction

from gabor_multipliers import (LatticePair, Mat2, build_strategy_sets, classify, generator_for, montecarlo_check,
                               verify_conditions)
from gabor_multipliers.serialize import dumps

D = Mat2.diag(1, Fraction(3, 2))
tag = classify(D)
pair = LatticePair.reduced(tag.canonical)
print(f"type {tag.label}, d0 = {pair.target}")

for ij in [(1, 1), (1, 2), (2, 1), (2, 2)]:
    sets = build_strategy_sets(tag, ij)
    g = generator_for(sets, pair.target)
    rep = verify_conditions(g, pair)
    mc = montecarlo_check(g, pair, n_points=4000, seed=0)
    print(f"pair {ij}: {sets.flavor:5s} cells={len(g):2d} exact={rep.passed} "
          f"k tested={len(rep.tested_k)} sampler={mc.passed}")

# one generator as JSON, ready for `gabor-multipliers verify`
print(dumps(generator_for(build_strategy_sets(tag, (2, 2)), pair.target))[:400], "...")

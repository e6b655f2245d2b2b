"""A sign flip that breaks the cocycle identity, seen from both sides."""
from fractions import Fraction

from gabor_multipliers import (LatticePair, Mat2, build_strategy_sets, classify, cocycle_check, generator_for,
                               make_multiplier, pointwise_product, theorem0_closure, verify_conditions)
from gabor_multipliers.frames import matching_failure

tag = classify(Mat2.diag(1, Fraction(3, 2)))
pair = LatticePair.reduced(tag.canonical)
g = generator_for(build_strategy_sets(tag, (2, 2)), pair.target)

h = make_multiplier("counterexample", pair=pair)
print("stored cocycle witness:", h.witness)
print("full window check:", cocycle_check(h, pair, 2).to_dict())

rep = verify_conditions(pointwise_product(h, g), pair)
print("h g passes:", rep.passed)
print("first verifier failure:", rep.condition5.witness)
print("failure matching the stored witness:", matching_failure(h, rep, pair))

ch = make_multiplier("character", c=(Fraction(1, 3), Fraction(2, 5)))
print("character times g passes:", theorem0_closure(ch, g, pair).passed)

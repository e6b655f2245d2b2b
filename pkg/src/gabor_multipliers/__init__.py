"""Parseval Gabor generators and frame multipliers for box-union sets in the plane."""
from .errors import *  # noqa: F401,F403
from .numerics import (Irrational, LatticePair, Mat2, TypeTag, classify, crt_translate_index, normalize,
                       reduce_to_canonical, unimodular_split, xgcd)
from .regions import (Box, Cell, FoldLattice, Region, disjoint, equivalent_rebuild, packs_by, region_to_svg,
                      tiles_by, translate, unit_square)
from .strategies import StrategySets, build_strategy_sets, ixd_sets
from .multipliers import (PhaseFunction, cocycle_check, make_multiplier, propagate_base_relations,
                          unimodular_check)
from .generators import (Coeff, ShiftSequence, StepFunction, build_IXd_generator, build_L6_generator,
                         build_shift_generator, generator_for, pointwise_product)
from .frames import (VerificationReport, correlation_values, frame_sum_oracle, montecarlo_check,
                     theorem0_closure, verify_conditions)
from .driver import Instance, run_certificate, run_multiplier_check, run_verify

__version__ = "0.1.0"

"""Irrational diagonal: dense rebuild plus epsilon-mode certificate, and a figure."""
import math
from pathlib import Path

from gabor_multipliers import Irrational, Mat2, build_strategy_sets, classify, region_to_svg
from gabor_multipliers.driver import Instance, run_certificate

s2 = math.sqrt(2)
D = Mat2.diag(Irrational(1 / s2, "1/sqrt2"), Irrational(s2, "sqrt2"))
cert, code = run_certificate(Instance(D=D))
print("type", cert["type_tag"]["label"], "mode", cert["mode"], "exit", code)
for key, p in cert["per_pair"].items():
    r = p["report"]
    print(f"  pair {key}: {p['flavor']:4s} defect={float(p['defect']):.2e} "
          f"res4={float(r['condition4']['worst_residual']):.2e} res5={float(r['condition5']['worst_residual']):.2e}")

sets = build_strategy_sets(classify(D), (2, 2))
out = Path("dense_type_six.svg")
out.write_text(region_to_svg({k: v for k, v in sets.sets.items() if v.cells}))
print("wrote", out)

"""Walk a genotype through decoding and repair, step by step.

Five assets, pick two.  The compressed scheme uses one vector twice: the
two largest genes select the assets, and the same two values, renormalized,
become the weights.  The direct scheme spends a second vector on weights.
Repair then quantizes weights to round lots, enforces the floor, and
nudges single lots until the budget is met exactly.
"""

import numpy as np

from portmoea import ConstraintSet, Genotype, ccs_decode, dcs_decode, repair
from portmoea.problem import check_feasibility

cset = ConstraintSet.uniform(5, cardinality=2, floor=0.01, ceiling=1.0, lot=0.008)
print(f"constraints: pick K={cset.cardinality} of {cset.n_assets}, "
      f"floor {cset.floors[0]}, lot 1/{cset.lot_denominator}")

print("\n--- compressed scheme: one vector, used twice ---")
genes = np.array([0.81, 0.91, 0.13, 0.91, 0.63])
raw = ccs_decode(Genotype(genes, "ccs"), cset)
print(f"genes      {genes}")
print(f"selected   {np.flatnonzero(raw.selection) + 1} (1-based)")
print(f"weights    {np.round(raw.weights, 2)}   <- 0.91/1.82 each")

print("\n--- direct scheme: selection half + weight half ---")
genes2 = np.array([0.0, 1.0, 0.0, 1.0, 0.0, 0.81, 0.28, 0.13, 0.96, 0.63])
raw2 = dcs_decode(Genotype(genes2, "dcs"), cset)
print(f"selected   {np.flatnonzero(raw2.selection) + 1} (1-based)")
print(f"weights    {np.round(raw2.weights, 2)}   <- 0.28/1.24 and 0.96/1.24")

print("\n--- repair: to whole lots, floor respected, budget exact ---")
portfolio = repair(raw2, cset)
print(f"lots       {portfolio.lots}  (sum {portfolio.lots.sum()} = 1/{cset.lot})")
print(f"weights    {portfolio.weights}")
print(f"check      {check_feasibility(portfolio, cset)}")

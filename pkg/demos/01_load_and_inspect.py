"""Load a benchmark universe and its reference frontier, poke at the data.

The ``port`` layout is the classic OR-Library one: asset count, one
``mean stddev`` line per asset, then 1-based ``i j correlation`` triples.
Frontier files hold ``mean_return variance`` lines.  Downloaded OR-Library
files drop straight into data/ and load the same way.
"""

from pathlib import Path

import numpy as np

from portmoea import load_frontier, load_instance

DATA = Path(__file__).resolve().parent.parent / "data"

inst = load_instance(DATA / "synth31.port")
print(f"instance {inst.name}: {inst.n_assets} assets")
print(f"  mean returns:   [{inst.mu.min():+.4f}, {inst.mu.max():+.4f}]")
print(f"  volatilities:   [{inst.sigma.min():.4f}, {inst.sigma.max():.4f}]")
off_diag = inst.rho[~np.eye(inst.n_assets, dtype=bool)]
print(f"  correlations:   [{off_diag.min():+.2f}, {off_diag.max():+.2f}], "
      f"median {np.median(off_diag):+.2f}")

# covariances come from the dense matrix built once at load time
i, j = 0, 1
print(f"  cov({i},{j}) = rho*sigma_i*sigma_j = {inst.covariance(i, j):.3e}")
assert inst.covariance(i, j) == inst.covariance(j, i)

front = load_frontier(DATA / "synth31.ef")
print(f"\nreference frontier: {len(front)} points "
      f"({front.n_removed} dominated inputs dropped at parse time)")
print(f"  risk span:   [{front.risks[0]:.2e}, {front.risks[-1]:.2e}]")
print(f"  return span: [{front.returns[0]:+.5f}, {front.returns[-1]:+.5f}]")

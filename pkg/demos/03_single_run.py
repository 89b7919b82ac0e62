"""One seeded optimization run and its quality scores.

Uses the compressed coding with the decomposition backend on the bundled
31-asset universe under the first benchmark constraint family (K=10,
floor 0.01, asset 30 pre-assigned, lot 0.008), at a tenth of the standard
budget so it finishes in a few seconds.
"""

from pathlib import Path

import numpy as np

from portmoea import RunConfig, load_frontier, load_instance, preset_constraints, run
from portmoea.metrics import NormalizedFront, igd, ih, minimization_points

DATA = Path(__file__).resolve().parent.parent / "data"

inst = load_instance(DATA / "synth31.port")
cfg = RunConfig(
    constraints=preset_constraints("i", inst.n_assets),
    scheme="ccs",
    backend="moead",
    pop_size=100,
    generations=100,
    seed=7,
)
result = run(inst, cfg)
print(f"{cfg.scheme}/{cfg.backend} on {inst.name}: {result.evaluations} evaluations, "
      f"archive of {len(result.archive)} portfolios")

by_risk = sorted(result.archive, key=lambda ind: ind.risk)
print("\n  risk        return   assets")
for ind in by_risk[:5] + by_risk[-2:]:
    held = (np.flatnonzero(ind.portfolio.selection) + 1).tolist()
    print(f"  {ind.risk:.3e}  {ind.ret:+.5f}  {held}")

reference = NormalizedFront.from_reference(load_frontier(DATA / "synth31.ef"))
obtained = reference.rescale(
    minimization_points([i.ret for i in result.archive],
                        [i.risk for i in result.archive])
)
print(f"\nigd vs reference frontier: {igd(obtained, reference.points):.5f}")
print(f"ih  vs reference frontier: {ih(obtained, reference.points):.5f}")
print("(both indicators: lower is better, 0 means the reference is matched)")

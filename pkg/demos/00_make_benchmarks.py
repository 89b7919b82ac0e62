"""Regenerate the bundled synthetic benchmark files under data/.

The repository ships deterministic stand-ins for the classic portfolio
benchmarks: a 31-asset and a 10-asset universe in the OR-Library ``port``
layout, each with a long-only unconstrained efficient frontier computed by
quadratic programming, plus a tiny 5-asset universe for fast determinism
checks.  Real OR-Library files (port1..port5 and their frontier files) can
be dropped into data/ and parsed with the same loaders.

Run from the repository root:

    python demos/00_make_benchmarks.py
"""

from pathlib import Path

from portmoea.instance import serialize_frontier, serialize_orlibrary
from portmoea.synthetic import synthetic_instance, unconstrained_frontier

DATA = Path(__file__).resolve().parent.parent / "data"


def make(n_assets: int, seed: int, n_points: int) -> None:
    inst = synthetic_instance(n_assets, seed=seed)
    (DATA / f"{inst.name}.port").write_text(serialize_orlibrary(inst))
    front = unconstrained_frontier(inst, n_points=n_points)
    (DATA / f"{inst.name}.ef").write_text(serialize_frontier(front))
    print(f"{inst.name}: {n_assets} assets, frontier of {len(front)} points "
          f"({front.n_removed} dominated solver points removed)")


if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    make(31, seed=5, n_points=200)
    make(10, seed=11, n_points=120)
    make(5, seed=7, n_points=60)
    print(f"files written to {DATA}")

"""Seeded batch experiments over instances, constraint sets and algorithms.

An experiment is described by a declarative TOML file (see load_spec).
Validation fills in the standard parameter defaults (population 100, 1000
generations, F=0.5, CR=0.9, eta_m=20, p_m=1/NP, neighborhood 10,
whole-population probability 0.1, replacement cap 2) and aggregates every
configuration error before anything executes.

The result tree is a pure function of the spec: per-run front CSVs under
fronts/, a metrics.csv with one row per scored run, summary.csv with
mean/std/rank blocks plus a MeanRank row, comparisons.csv with pairwise
rank-sum patterns, and a generated plot script.  Per-run seeds mix the
base seed with a stable hash of (instance, algorithm, run), so reruns of
an identical spec are bit-identical and runs may execute in parallel.
"""

from __future__ import annotations

import csv
import hashlib
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .encoding import SCHEMES
from .instance import Instance, load_frontier, load_instance
from .metrics import (
    DEFAULT_REFERENCE_POINT,
    NormalizedFront,
    format_counts,
    igd,
    ih,
    mean_rank,
    minimization_points,
    rank_sum_test,
)
from .moea import BACKENDS, RunConfig, run
from .operators import OperatorConfig
from .problem import ConstraintError, ConstraintSet, preset_constraints

__all__ = [
    "SpecValidationError",
    "ExperimentSpec",
    "load_spec",
    "validate_spec",
    "derive_seed",
    "run_experiment",
    "summarize_results",
    "compare_results",
]

FRONT_SCHEMA = "portmoea front v1 (risk,return,weights; weights are 1-based asset:weight pairs joined by ';')"
METRICS_SCHEMA = (
    "portmoea metrics v1 (instance,algorithm,run,seed,igd,ih; "
    "normalization=reference_front_bounds source=archive ref_point=1.2,1.2)"
)
SUMMARY_SCHEMA = "portmoea summary v1 (instance,algorithm,metric,mean,std,rank; MeanRank rows close each metric)"
COMPARISONS_SCHEMA = "portmoea comparisons v1 (metric,algorithm_a,algorithm_b,better,worse,equal,pattern)"


class SpecValidationError(ValueError):
    """Carries the full list of validation failures."""

    def __init__(self, errors: list[str]):
        super().__init__("invalid experiment spec:\n" + "\n".join(f"- {e}" for e in errors))
        self.errors = errors


@dataclass(frozen=True)
class ExperimentSpec:
    """A declarative experiment: what to run, where, and with which knobs."""

    instances: tuple[str, ...]
    frontiers: tuple[str | None, ...]
    algorithms: tuple[tuple[str, str], ...]
    runs: int = 20
    base_seed: int = 1
    out_dir: str = "results"
    workers: int = 1
    constraint_preset: str = "i"
    custom_constraints: dict | None = None
    pop_size: int = 100
    generations: int = 1000
    scale_factor: float = 0.5
    crossover_rate: float = 0.9
    eta_m: float = 20.0
    mutation_rate: float | None = None  # None -> 1/pop_size
    op_weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    neighborhood: int = 10
    whole_pop_prob: float = 0.1
    max_replacements: int = 2

    def algorithm_labels(self) -> list[str]:
        return [f"{s}/{b}" for s, b in self.algorithms]

    def config_hash(self) -> str:
        """Stable digest of everything that shapes the numbers (not paths
        of the output tree or the worker count)."""
        parts = [
            "|".join(Path(p).stem for p in self.instances),
            "|".join(f"{s}/{b}" for s, b in self.algorithms),
            f"runs={self.runs}",
            f"seed={self.base_seed}",
            f"constraints={self.constraint_preset}:{sorted((self.custom_constraints or {}).items())}",
            f"np={self.pop_size}",
            f"gen={self.generations}",
            f"f={self.scale_factor}",
            f"cr={self.crossover_rate}",
            f"eta={self.eta_m}",
            f"pm={self.mutation_rate}",
            f"ow={self.op_weights}",
            f"t={self.neighborhood}",
            f"pd={self.whole_pop_prob}",
            f"tr={self.max_replacements}",
        ]
        return hashlib.sha256(";".join(parts).encode()).hexdigest()[:16]


def load_spec(path: str | Path) -> ExperimentSpec:
    """Read an experiment spec from a TOML file.

    Layout::

        [experiment]
        runs = 20
        base_seed = 1
        output = "results/demo"
        workers = 1

        [[instances]]
        port = "data/synth31.port"
        frontier = "data/synth31.ef"   # optional

        [constraints]
        preset = "i"                   # "i" | "ii" | "custom"
        # cardinality/floor/ceiling/preassigned(1-based)/lot for "custom"

        [[algorithms]]
        scheme = "ccs"                 # "ccs" | "dcs"
        backend = "moead"              # "moead" | "nsga2" | "smsemoa"

        [parameters]                   # optional overrides of the defaults
        pop_size = 100
    """
    path = Path(path)
    raw = tomllib.loads(path.read_text())
    exp = raw.get("experiment", {})
    pars = raw.get("parameters", {})
    cons = raw.get("constraints", {})
    base = path.parent

    def resolve(p: str) -> str:
        q = Path(p)
        return str(q if q.is_absolute() else base / q)

    instances = []
    frontiers = []
    for entry in raw.get("instances", []):
        instances.append(resolve(entry["port"]))
        frontiers.append(resolve(entry["frontier"]) if "frontier" in entry else None)
    algorithms = tuple(
        (entry.get("scheme", "ccs"), entry.get("backend", "moead"))
        for entry in raw.get("algorithms", [])
    )
    preset = cons.get("preset", "i")
    custom = {k: v for k, v in cons.items() if k != "preset"} or None

    kwargs = dict(
        instances=tuple(instances),
        frontiers=tuple(frontiers),
        algorithms=algorithms,
        runs=exp.get("runs", 20),
        base_seed=exp.get("base_seed", 1),
        out_dir=resolve(exp["output"]) if "output" in exp else "results",
        workers=exp.get("workers", 1),
        constraint_preset=preset,
        custom_constraints=custom,
    )
    for key in (
        "pop_size",
        "generations",
        "scale_factor",
        "crossover_rate",
        "eta_m",
        "mutation_rate",
        "neighborhood",
        "whole_pop_prob",
        "max_replacements",
    ):
        if key in pars:
            kwargs[key] = pars[key]
    if "op_weights" in pars:
        kwargs["op_weights"] = tuple(pars["op_weights"])
    return ExperimentSpec(**kwargs)


def build_constraints(spec: ExperimentSpec, n_assets: int) -> ConstraintSet:
    if spec.constraint_preset in ("i", "ii"):
        return preset_constraints(spec.constraint_preset, n_assets)
    if spec.constraint_preset != "custom":
        raise ConstraintError(f"unknown constraint preset {spec.constraint_preset!r}")
    custom = dict(spec.custom_constraints or {})
    preassigned = tuple(int(i) - 1 for i in custom.get("preassigned", ()))
    return ConstraintSet.uniform(
        n_assets,
        cardinality=int(custom.get("cardinality", 10)),
        floor=float(custom.get("floor", 0.01)),
        ceiling=float(custom.get("ceiling", 1.0)),
        preassigned=preassigned,
        lot=custom.get("lot", 0.008),
    )


def validate_spec(spec: ExperimentSpec) -> ExperimentSpec:
    """Check every invariant, filling defaults; raises SpecValidationError
    with the aggregated list when anything is wrong."""
    errors: list[str] = []
    if spec.runs < 1:
        errors.append(f"runs must be >= 1, got {spec.runs}")
    if spec.workers < 1:
        errors.append(f"workers must be >= 1, got {spec.workers}")
    if not spec.instances:
        errors.append("no instances configured")
    if not spec.algorithms:
        errors.append("no algorithms configured")
    if len(spec.frontiers) != len(spec.instances):
        errors.append("frontiers list must align with instances")

    seen = set()
    for scheme, backend in spec.algorithms:
        if scheme not in SCHEMES:
            errors.append(f"unknown scheme {scheme!r}")
        if backend not in BACKENDS:
            errors.append(f"unknown backend {backend!r}")
        if (scheme, backend) in seen:
            errors.append(f"duplicate algorithm {scheme}/{backend}")
        seen.add((scheme, backend))

    for p in spec.instances:
        if not Path(p).is_file():
            errors.append(f"instance file not found: {p}")
    for p in spec.frontiers:
        if p is not None and not Path(p).is_file():
            errors.append(f"frontier file not found: {p}")

    # constraint sets must be buildable for every instance (e.g. a pre-assigned
    # index beyond the asset count is a configuration error)
    probe_cset = None
    for p in spec.instances:
        if not Path(p).is_file():
            continue
        try:
            inst = load_instance(p)
            cset = build_constraints(spec, inst.n_assets)
            probe_cset = probe_cset or cset
        except (ConstraintError, ValueError) as exc:
            errors.append(f"{Path(p).stem}: {exc}")

    if probe_cset is not None:
        try:
            _run_config(spec, probe_cset)
        except (ValueError, ConstraintError) as exc:
            errors.append(str(exc))

    if errors:
        raise SpecValidationError(errors)
    return spec


def _run_config(spec: ExperimentSpec, cset: ConstraintSet, scheme="ccs", backend="moead", seed=0) -> RunConfig:
    return RunConfig(
        constraints=cset,
        scheme=scheme,
        backend=backend,
        pop_size=spec.pop_size,
        generations=spec.generations,
        seed=seed,
        neighborhood=spec.neighborhood,
        whole_pop_prob=spec.whole_pop_prob,
        max_replacements=spec.max_replacements,
        operators=OperatorConfig(
            f=spec.scale_factor,
            cr=spec.crossover_rate,
            eta_m=spec.eta_m,
            p_m=spec.mutation_rate,
            op_weights=spec.op_weights,
        ),
    )


def derive_seed(base_seed: int, instance: str, scheme: str, backend: str, run_idx: int) -> int:
    """Stable 64-bit per-run seed: base_seed XOR blake2b(grid coordinates)."""
    key = f"{instance}|{scheme}|{backend}|{run_idx}".encode()
    h = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")
    return (base_seed ^ h) & ((1 << 64) - 1)


@lru_cache(maxsize=32)
def _cached_instance(path: str) -> Instance:
    return load_instance(path)


def _front_filename(instance: str, scheme: str, backend: str, run_idx: int) -> str:
    return f"{instance}__{scheme}-{backend}__r{run_idx}.csv"


def _write_front_csv(path: Path, result, meta: str) -> None:
    rows = sorted(result.archive, key=lambda ind: (ind.risk, ind.ret))
    lines = [f"# {FRONT_SCHEMA} {meta}", "risk,return,weights"]
    for ind in rows:
        p = ind.portfolio
        sparse = ";".join(
            f"{i + 1}:{float(w)!r}"
            for i, w in zip(np.flatnonzero(p.selection), p.weights[p.selection])
        )
        lines.append(f"{ind.risk!r},{ind.ret!r},{sparse}")
    path.write_text("\n".join(lines) + "\n")


def _execute_one(args) -> tuple[int, list | None, str | None]:
    """One grid cell: run, write the front file, score it if possible."""
    (task_idx, spec, port_path, frontier_path, scheme, backend, run_idx, seed, out_dir) = args
    inst = _cached_instance(port_path)
    cset = build_constraints(spec, inst.n_assets)
    cfg = _run_config(spec, cset, scheme=scheme, backend=backend, seed=seed)
    result = run(inst, cfg)

    meta = (
        f"instance={inst.name} scheme={scheme} backend={backend} "
        f"run={run_idx} seed={seed} config={spec.config_hash()}"
    )
    front_path = Path(out_dir) / "fronts" / _front_filename(inst.name, scheme, backend, run_idx)
    _write_front_csv(front_path, result, meta)

    if frontier_path is None:
        return task_idx, None, f"{inst.name}: no frontier file, metrics skipped"
    reference = NormalizedFront.from_reference(load_frontier(frontier_path))
    obtained = reference.rescale(
        minimization_points(
            [ind.ret for ind in result.archive], [ind.risk for ind in result.archive]
        )
    )
    row = [
        inst.name,
        f"{scheme}/{backend}",
        str(run_idx),
        str(seed),
        repr(igd(obtained, reference.points)),
        repr(ih(obtained, reference.points, DEFAULT_REFERENCE_POINT)),
    ]
    return task_idx, row, None


def run_experiment(spec: ExperimentSpec) -> Path:
    """Execute the whole grid and write the result tree; returns out_dir."""
    spec = validate_spec(spec)
    out = Path(spec.out_dir)
    (out / "fronts").mkdir(parents=True, exist_ok=True)

    tasks = []
    seeds = []
    for port_path, frontier_path in zip(spec.instances, spec.frontiers):
        name = Path(port_path).stem
        for scheme, backend in spec.algorithms:
            for r in range(spec.runs):
                seed = derive_seed(spec.base_seed, name, scheme, backend, r)
                seeds.append(seed)
                tasks.append(
                    (len(tasks), spec, port_path, frontier_path, scheme, backend, r, seed, str(out))
                )
    if len(set(seeds)) != len(seeds):
        raise SpecValidationError(["derived per-run seeds collide; change base_seed"])

    outcomes: list = [None] * len(tasks)
    if spec.workers > 1:
        with ProcessPoolExecutor(max_workers=spec.workers) as pool:
            for idx, row, warning in pool.map(_execute_one, tasks):
                outcomes[idx] = (row, warning)
    else:
        for task in tasks:
            idx, row, warning = _execute_one(task)
            outcomes[idx] = (row, warning)

    rows = [row for row, _ in outcomes if row is not None]
    warnings = sorted({w for _, w in outcomes if w is not None})

    metrics_path = out / "metrics.csv"
    lines = [f"# {METRICS_SCHEMA}", "instance,algorithm,run,seed,igd,ih"]
    lines += [",".join(row) for row in rows]
    metrics_path.write_text("\n".join(lines) + "\n")

    if warnings:
        (out / "warnings.txt").write_text("\n".join(warnings) + "\n")
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)

    if rows:
        summarize_results(out)
        compare_results(out)
    _write_plot_script(out, spec)
    return out


def _read_metrics(out_dir: Path) -> list[dict]:
    path = Path(out_dir) / "metrics.csv"
    if not path.is_file():
        raise FileNotFoundError(f"no metrics.csv under {out_dir}")
    rows = []
    with path.open() as fh:
        data = [line for line in fh if not line.startswith("#")]
    for rec in csv.DictReader(data):
        rows.append(
            {
                "instance": rec["instance"],
                "algorithm": rec["algorithm"],
                "run": int(rec["run"]),
                "igd": float(rec["igd"]),
                "ih": float(rec["ih"]),
            }
        )
    return rows


def _grid(rows: list[dict]) -> tuple[list[str], list[str]]:
    instances = sorted({r["instance"] for r in rows})
    algorithms = sorted({r["algorithm"] for r in rows})
    return instances, algorithms


def _samples(rows: list[dict], instance: str, algorithm: str, metric: str) -> np.ndarray:
    picked = [r[metric] for r in rows if r["instance"] == instance and r["algorithm"] == algorithm]
    return np.array(picked)


def summarize_results(out_dir: str | Path) -> Path:
    """Rebuild summary.csv (mean/std/rank per instance, MeanRank rows) from
    the per-run rows in metrics.csv."""
    out_dir = Path(out_dir)
    rows = _read_metrics(out_dir)
    instances, algorithms = _grid(rows)
    lines = [f"# {SUMMARY_SCHEMA}", "instance,algorithm,metric,mean,std,rank"]
    for metric in ("igd", "ih"):
        means = np.zeros((len(algorithms), len(instances)))
        stds = np.zeros_like(means)
        for j, instance in enumerate(instances):
            for i, algorithm in enumerate(algorithms):
                sample = _samples(rows, instance, algorithm, metric)
                means[i, j] = sample.mean()
                stds[i, j] = sample.std(ddof=1) if len(sample) > 1 else 0.0
        ranks = mean_rank(means) if len(instances) else np.array([])
        for j, instance in enumerate(instances):
            per_instance_rank = mean_rank(means[:, [j]])
            for i, algorithm in enumerate(algorithms):
                lines.append(
                    f"{instance},{algorithm},{metric},"
                    f"{float(means[i, j])!r},{float(stds[i, j])!r},{float(per_instance_rank[i])!r}"
                )
        for i, algorithm in enumerate(algorithms):
            lines.append(f"MeanRank,{algorithm},{metric},{float(ranks[i])!r},,")
    path = out_dir / "summary.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def compare_results(out_dir: str | Path, alpha: float = 0.05) -> Path:
    """Rebuild comparisons.csv: pairwise rank-sum "+/-/=" counts across
    instances, per metric, for every ordered algorithm pair."""
    out_dir = Path(out_dir)
    rows = _read_metrics(out_dir)
    instances, algorithms = _grid(rows)
    lines = [f"# {COMPARISONS_SCHEMA}", "metric,algorithm_a,algorithm_b,better,worse,equal,pattern"]
    for metric in ("igd", "ih"):
        for a in algorithms:
            for b in algorithms:
                if a == b:
                    continue
                plus = minus = equal = 0
                for instance in instances:
                    sa = _samples(rows, instance, a, metric)
                    sb = _samples(rows, instance, b, metric)
                    if min(len(sa), len(sb)) < 2:
                        verdict = "equal"  # too few runs to reject anything
                    else:
                        verdict = rank_sum_test(sa, sb, alpha)
                    plus += verdict == "better"
                    minus += verdict == "worse"
                    equal += verdict == "equal"
                pattern = format_counts((plus, minus, equal))
                lines.append(f"{metric},{a},{b},{plus},{minus},{equal},{pattern}")
    path = out_dir / "comparisons.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


_PLOT_TEMPLATE = '''"""Render obtained fronts against the reference frontier (needs matplotlib).

Generated file; run from anywhere:  python plot_fronts.py [--save out.png]
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
FRONTIERS = {frontiers!r}

fig, ax = plt.subplots(figsize=(8, 6))
for name, frontier in sorted(FRONTIERS.items()):
    if frontier is not None:
        pts = [line.split() for line in Path(frontier).read_text().split("\\n") if line.strip()]
        ax.plot([float(p[1]) for p in pts], [float(p[0]) for p in pts],
                "k-", lw=1, label=f"reference {{name}}")

for front in sorted((HERE / "fronts").glob("*.csv")):
    risks, rets = [], []
    for line in front.read_text().splitlines():
        if line.startswith("#") or line.startswith("risk"):
            continue
        risk, ret, _ = line.split(",", 2)
        risks.append(float(risk))
        rets.append(float(ret))
    ax.scatter(risks, rets, s=6, alpha=0.5, label=front.stem)

ax.set_xlabel("risk (variance)")
ax.set_ylabel("expected return")
if len(FRONTIERS) + sum(1 for _ in (HERE / "fronts").glob("*.csv")) <= 12:
    ax.legend(fontsize=7)
if "--save" in sys.argv:
    out = sys.argv[sys.argv.index("--save") + 1]
    fig.savefig(out, dpi=150)
    print(f"saved {{out}}")
else:
    plt.show()
'''


def _write_plot_script(out_dir: Path, spec: ExperimentSpec) -> None:
    frontiers = {
        Path(p).stem: (str(Path(f).resolve()) if f else None)
        for p, f in zip(spec.instances, spec.frontiers)
    }
    (out_dir / "plot_fronts.py").write_text(_PLOT_TEMPLATE.format(frontiers=frontiers))

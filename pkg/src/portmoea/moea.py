"""Generational framework with pluggable environmental-selection backends.

One run samples a random population, decodes/repairs/evaluates every
genotype, then loops: draw an operator, produce an offspring, decode,
repair, evaluate, and hand the offspring to the backend (MOEA/D, NSGA-II
or steady-state SMS-EMOA).  Repair always precedes evaluation, so every
individual the run ever returns is feasible.  The run stops when the
evaluation budget pop_size * generations is spent exactly, and yields the
final population plus a bounded archive of non-dominated individuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .encoding import SCHEMES, Genotype, decode, random_genotype, repair
from .instance import Instance
from .operators import (
    OperatorConfig,
    op_de_polymut,
    op_power,
    op_swap,
    select_operator,
)
from .problem import ConstraintError, ConstraintSet, evaluate

__all__ = [
    "BACKENDS",
    "Individual",
    "RunConfig",
    "RunResult",
    "run",
    "nondominated_sort",
    "crowding_distance",
    "nsga2_select",
    "smsemoa_select",
    "tchebycheff",
    "MoeadState",
    "moead_pool",
    "moead_step",
    "update_archive",
]

BACKENDS = ("moead", "nsga2", "smsemoa")


@dataclass(frozen=True)
class Individual:
    """A genotype with its repaired phenotype and minimization objectives."""

    objectives: np.ndarray
    genotype: Genotype | None = None
    portfolio: object = None

    @property
    def risk(self) -> float:
        return float(self.objectives[0])

    @property
    def ret(self) -> float:
        return float(-self.objectives[1])


@dataclass(frozen=True)
class RunConfig:
    """Scheme, backend and parameters for one optimization run."""

    constraints: ConstraintSet
    scheme: str = "ccs"
    backend: str = "moead"
    pop_size: int = 100
    generations: int = 1000
    seed: int = 0
    neighborhood: int = 10
    whole_pop_prob: float = 0.1
    max_replacements: int = 2
    operators: OperatorConfig = field(default_factory=OperatorConfig)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.pop_size < 4:
            raise ValueError("pop_size must be >= 4 (three DE donors plus the target)")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not 4 <= self.neighborhood <= self.pop_size:
            raise ValueError("neighborhood size must lie in [4, pop_size]")
        if not 0 <= self.whole_pop_prob <= 1:
            raise ValueError("whole_pop_prob must lie in [0, 1]")
        if self.max_replacements < 1:
            raise ValueError("max_replacements must be >= 1")

    @property
    def evaluation_budget(self) -> int:
        return self.pop_size * self.generations


@dataclass(frozen=True)
class RunResult:
    population: list
    archive: list
    evaluations: int
    seed: int


def nondominated_sort(objectives: np.ndarray) -> list[np.ndarray]:
    """Partition minimization points into Pareto fronts (index arrays).

    Dominance is componentwise <= with at least one strict <.  Front k+1 is
    the non-dominated set once fronts 1..k are removed.
    """
    objs = np.atleast_2d(np.asarray(objectives, dtype=float))
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominates = le & lt
    dom_count = dominates.sum(axis=0)

    fronts = []
    current = np.flatnonzero(dom_count == 0)
    while len(current):
        fronts.append(current)
        dom_count = dom_count - dominates[current].sum(axis=0)
        dom_count[current] = -1
        current = np.flatnonzero(dom_count == 0)
    return fronts


def crowding_distance(objectives: np.ndarray) -> np.ndarray:
    """Crowding distance within one front: boundary points get +inf,
    interior points the sum over objectives of neighbor gaps normalized by
    the objective range (a zero range contributes nothing)."""
    objs = np.atleast_2d(np.asarray(objectives, dtype=float))
    n, m = objs.shape
    dist = np.zeros(n)
    for k in range(m):
        order = np.argsort(objs[:, k], kind="stable")
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = objs[order[-1], k] - objs[order[0], k]
        if n > 2 and span > 0:
            dist[order[1:-1]] += (objs[order[2:], k] - objs[order[:-2], k]) / span
    return dist


def nsga2_select(individuals: list[Individual], pop_size: int) -> list[Individual]:
    """Keep pop_size individuals by front order; the split front is
    truncated by descending crowding distance (ties: lower input index)."""
    if len(individuals) != 2 * pop_size:
        raise ValueError(
            f"nsga2_select expects exactly {2 * pop_size} individuals, got {len(individuals)}"
        )
    objs = np.array([ind.objectives for ind in individuals])
    chosen: list[int] = []
    for front in nondominated_sort(objs):
        if len(chosen) + len(front) <= pop_size:
            chosen.extend(front.tolist())
            if len(chosen) == pop_size:
                break
        else:
            need = pop_size - len(chosen)
            order = np.argsort(-crowding_distance(objs[front]), kind="stable")
            chosen.extend(front[order[:need]].tolist())
            break
    return [individuals[i] for i in chosen]


def _exclusive_contributions(points: np.ndarray, ref: float) -> np.ndarray:
    """Exclusive 2-D hypervolume contribution of each point of one front.

    For mutually non-dominated points sorted by the first coordinate, the
    exclusive region of a point is the rectangle up to its neighbors:
    (x_next - x) * (y_prev - y), with the reference closing the ends.
    """
    order = np.lexsort((points[:, 1], points[:, 0]))
    x = points[order, 0]
    y = points[order, 1]
    x_next = np.append(x[1:], ref)
    y_prev = np.concatenate([[ref], y[:-1]])
    contrib = (x_next - x) * (y_prev - y)
    out = np.empty(len(points))
    out[order] = contrib
    return out


def smsemoa_select(individuals: list[Individual], pop_size: int) -> list[Individual]:
    """Drop the worst of pop_size+1 individuals: from the last front, the
    one with the smallest exclusive hypervolume contribution.

    The last front is normalized by its own min/max per objective (zero
    ranges fall back to 1) and measured against the reference point (2, 2),
    i.e. the worst normalized point plus an offset of 1 per objective.
    Ties resolve to the lower input index.
    """
    if len(individuals) != pop_size + 1:
        raise ValueError(
            f"smsemoa_select expects exactly {pop_size + 1} individuals, got {len(individuals)}"
        )
    objs = np.array([ind.objectives for ind in individuals])
    last = nondominated_sort(objs)[-1]
    if len(last) == 1:
        drop = int(last[0])
    else:
        pts = objs[last]
        lo = pts.min(axis=0)
        span = pts.max(axis=0) - lo
        span = np.where(span > 0, span, 1.0)
        contribs = _exclusive_contributions((pts - lo) / span, 2.0)
        drop = int(last[int(np.argmin(contribs))])
    return [ind for i, ind in enumerate(individuals) if i != drop]


def tchebycheff(objectives: np.ndarray, weights: np.ndarray, ideal: np.ndarray) -> np.ndarray:
    """Weighted Tchebycheff aggregation max_k w_k * |f_k - z_k|."""
    return (np.asarray(weights) * np.abs(np.asarray(objectives) - np.asarray(ideal))).max(
        axis=-1
    )


@dataclass
class MoeadState:
    """Mutable decomposition state: weights, neighborhoods, ideal point and
    the current population (with a synchronized objective matrix)."""

    lambdas: np.ndarray
    neighbors: np.ndarray
    ideal: np.ndarray
    population: list[Individual]
    objs: np.ndarray
    whole_pop_prob: float
    max_replacements: int

    @classmethod
    def create(cls, population: list[Individual], cfg: RunConfig) -> "MoeadState":
        n = cfg.pop_size
        ticks = np.arange(n) / (n - 1)
        lambdas = np.column_stack([ticks, 1.0 - ticks])
        dists = np.linalg.norm(lambdas[:, None, :] - lambdas[None, :, :], axis=2)
        neighbors = np.argsort(dists, kind="stable", axis=1)[:, : cfg.neighborhood]
        objs = np.array([ind.objectives for ind in population])
        return cls(
            lambdas=lambdas,
            neighbors=neighbors,
            ideal=objs.min(axis=0),
            population=list(population),
            objs=objs,
            whole_pop_prob=cfg.whole_pop_prob,
            max_replacements=cfg.max_replacements,
        )


def moead_pool(state: MoeadState, subproblem: int, rng: np.random.Generator) -> np.ndarray:
    """Mating/replacement pool: the whole population with probability
    whole_pop_prob, otherwise the subproblem's neighborhood."""
    if rng.random() < state.whole_pop_prob:
        return np.arange(len(state.population))
    return state.neighbors[subproblem]


def moead_step(
    state: MoeadState,
    subproblem: int,
    pool: np.ndarray,
    offspring: Individual,
    rng: np.random.Generator,
) -> list[int]:
    """Ideal-point update plus capped replacement for one new offspring.

    Pool members are visited in random order; a member is replaced when the
    offspring achieves a strictly better Tchebycheff value for that
    member's weight vector (objectives normalized by the running population
    range), stopping after max_replacements.  Returns the replaced indices.
    """
    state.ideal = np.minimum(state.ideal, offspring.objectives)
    lo = state.objs.min(axis=0)
    span = state.objs.max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    z = (state.ideal - lo) / span
    f_child = (offspring.objectives - lo) / span

    lams = state.lambdas[pool]
    g_old = tchebycheff((state.objs[pool] - lo) / span, lams, z)
    g_new = tchebycheff(f_child, lams, z)
    improves = g_new < g_old

    replaced: list[int] = []
    for k in rng.permutation(len(pool)):
        if improves[k]:
            j = int(pool[k])
            state.population[j] = offspring
            state.objs[j] = offspring.objectives
            replaced.append(j)
            if len(replaced) >= state.max_replacements:
                break
    return replaced


def update_archive(
    archive: list[Individual], newcomers: list[Individual], cap: int
) -> list[Individual]:
    """Merge newcomers, drop dominated points, truncate to cap by keeping
    the largest crowding distances (ties: earlier insertion)."""
    pool = list(archive) + list(newcomers)
    if not pool:
        return []
    objs = np.array([ind.objectives for ind in pool])
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dominated = (le & lt).any(axis=0)
    keep = np.flatnonzero(~dominated)
    # coincident objective vectors are one front point; keep the earliest
    first_seen: dict[tuple, int] = {}
    for i in keep:
        first_seen.setdefault((objs[i, 0], objs[i, 1]), int(i))
    keep = np.array(sorted(first_seen.values()), dtype=int)
    if len(keep) > cap:
        order = np.argsort(-crowding_distance(objs[keep]), kind="stable")
        keep = np.sort(keep[order[:cap]])
    return [pool[i] for i in keep]


def _assert_repairable(c: ConstraintSet):
    """Every admissible selection must admit the lot budget, so repair can
    never fail mid-run."""
    t = c.lot_denominator
    free = ~c.preassigned
    need = c.cardinality - c.n_preassigned
    worst_floor = int(c.min_lots[c.preassigned].sum())
    least_ceiling = int(c.max_lots[c.preassigned].sum())
    if need > 0:
        worst_floor += int(np.sort(c.min_lots[free])[-need:].sum())
        least_ceiling += int(np.sort(c.max_lots[free])[:need].sum())
    if worst_floor > t:
        raise ConstraintError(
            f"some selection requires {worst_floor} lots of floor > budget {t}"
        )
    if least_ceiling < t:
        raise ConstraintError(
            f"some selection caps out at {least_ceiling} lots of ceiling < budget {t}"
        )


def _offspring_genotype(
    target_idx: int,
    pool: np.ndarray,
    population: list[Individual],
    opcfg: OperatorConfig,
    inst: Instance,
    cset: ConstraintSet,
    rng: np.random.Generator,
) -> Genotype:
    target = population[target_idx]
    op = select_operator(opcfg, rng)
    if op == "de":
        donors = pool[pool != target_idx]
        picks = rng.choice(donors, size=3, replace=False)
        return op_de_polymut(
            target.genotype,
            population[int(picks[0])].genotype,
            population[int(picks[1])].genotype,
            population[int(picks[2])].genotype,
            opcfg,
            rng,
        )
    if op == "power":
        return op_power(target.genotype, rng)
    # repair never alters the selection, so the stored phenotype carries the
    # same selection mask as the genotype's decode
    return op_swap(target.genotype, target.portfolio, inst, cset, rng)


def run(inst: Instance, cfg: RunConfig) -> RunResult:
    """Execute one seeded optimization run; see the module docstring."""
    cset = cfg.constraints
    if cset.n_assets != inst.n_assets:
        raise ConstraintError(
            f"constraint set covers {cset.n_assets} assets, instance {inst.n_assets}"
        )
    _assert_repairable(cset)

    rng = np.random.default_rng(cfg.seed)
    opcfg = cfg.operators.resolved(cfg.pop_size)
    budget = cfg.evaluation_budget

    def make_individual(g: Genotype) -> Individual:
        phenotype = repair(decode(g, cset), cset)
        obj = evaluate(phenotype, inst)
        return Individual(objectives=obj.minimization(), genotype=g, portfolio=phenotype)

    population = [
        make_individual(random_genotype(cfg.scheme, inst.n_assets, rng))
        for _ in range(cfg.pop_size)
    ]
    evaluations = cfg.pop_size
    archive = update_archive([], population, cfg.pop_size)
    everyone = np.arange(cfg.pop_size)

    if cfg.backend == "nsga2":
        while evaluations < budget:
            offspring = []
            for i in range(cfg.pop_size):
                g = _offspring_genotype(i, everyone, population, opcfg, inst, cset, rng)
                offspring.append(make_individual(g))
            evaluations += cfg.pop_size
            population = nsga2_select(population + offspring, cfg.pop_size)
            archive = update_archive(archive, offspring, cfg.pop_size)

    elif cfg.backend == "smsemoa":
        step = 0
        pending: list[Individual] = []
        while evaluations < budget:
            i = step % cfg.pop_size
            g = _offspring_genotype(i, everyone, population, opcfg, inst, cset, rng)
            child = make_individual(g)
            evaluations += 1
            step += 1
            population = smsemoa_select(population + [child], cfg.pop_size)
            pending.append(child)
            if len(pending) == cfg.pop_size:
                archive = update_archive(archive, pending, cfg.pop_size)
                pending = []
        if pending:
            archive = update_archive(archive, pending, cfg.pop_size)

    else:  # moead
        state = MoeadState.create(population, cfg)
        while evaluations < budget:
            pending = []
            for i in range(cfg.pop_size):
                pool = moead_pool(state, i, rng)
                g = _offspring_genotype(i, pool, state.population, opcfg, inst, cset, rng)
                child = make_individual(g)
                evaluations += 1
                moead_step(state, i, pool, child, rng)
                pending.append(child)
            archive = update_archive(archive, pending, cfg.pop_size)
        population = state.population

    return RunResult(
        population=population, archive=archive, evaluations=evaluations, seed=cfg.seed
    )

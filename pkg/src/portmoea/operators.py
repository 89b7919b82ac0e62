"""Variation operators over real-valued genotypes.

Three operators generate offspring: a DE/rand/1 step with binomial
crossover and polynomial mutation ("de"), a shared-exponent power
transform that reshapes weights without touching the selection ("power"),
and a gene swap between a selected asset and a partner chosen by one of
four heuristics ("swap").  Every operator clamps its output to [0,1] and
draws exclusively from the generator it is handed, so a pinned seed
reproduces the offspring stream byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .encoding import DCS, Genotype
from .instance import Instance
from .problem import ConstraintSet

__all__ = [
    "OperatorConfig",
    "OPERATORS",
    "select_operator",
    "polynomial_mutation",
    "op_de_polymut",
    "op_power",
    "op_swap",
    "swap_partner",
]

OPERATORS = ("de", "power", "swap")


@dataclass(frozen=True)
class OperatorConfig:
    """Variation parameters.

    ``p_m`` may be left as None and resolved to 1/pop_size by the run
    configuration.  ``op_weights`` are the selection probabilities for
    (de, power, swap).
    """

    f: float = 0.5
    cr: float = 0.9
    eta_m: float = 20.0
    p_m: float | None = None
    op_weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        if self.f <= 0:
            raise ValueError(f"scaling factor must be positive, got {self.f}")
        if not 0 <= self.cr <= 1:
            raise ValueError(f"crossover probability must lie in [0,1], got {self.cr}")
        if self.eta_m <= 0:
            raise ValueError(f"mutation index must be positive, got {self.eta_m}")
        if self.p_m is not None and not 0 <= self.p_m <= 1:
            raise ValueError(f"mutation probability must lie in [0,1], got {self.p_m}")
        w = np.asarray(self.op_weights, dtype=float)
        if w.shape != (3,) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("op_weights must be three non-negative values summing to 1")

    def resolved(self, pop_size: int) -> "OperatorConfig":
        """Fill the default mutation probability 1/pop_size when unset."""
        if self.p_m is not None:
            return self
        return replace(self, p_m=1.0 / pop_size)


def select_operator(cfg: OperatorConfig, rng: np.random.Generator) -> str:
    """Categorical draw over ("de", "power", "swap") by cfg.op_weights."""
    return OPERATORS[rng.choice(3, p=np.asarray(cfg.op_weights, dtype=float))]


def _polymut_values(genes: np.ndarray, eta_m: float, u: np.ndarray) -> np.ndarray:
    """Bounded polynomial mutation on [0,1] driven by uniform draws ``u``."""
    out = np.empty_like(genes)
    exp = 1.0 / (eta_m + 1.0)
    low = u < 0.5
    if np.any(low):
        x = genes[low]
        val = 2.0 * u[low] + (1.0 - 2.0 * u[low]) * (1.0 - x) ** (eta_m + 1.0)
        out[low] = x + val**exp - 1.0
    if np.any(~low):
        x = genes[~low]
        val = 2.0 * (1.0 - u[~low]) + 2.0 * (u[~low] - 0.5) * x ** (eta_m + 1.0)
        out[~low] = x + 1.0 - val**exp
    return np.clip(out, 0.0, 1.0)


def polynomial_mutation(gene: float, eta_m: float, rng: np.random.Generator) -> float:
    """Mutate one gene in [0,1] with distribution index eta_m."""
    if not 0.0 <= gene <= 1.0:
        raise ValueError(f"gene must lie in [0,1], got {gene}")
    u = np.array([rng.random()])
    return float(_polymut_values(np.array([gene]), eta_m, u)[0])


def op_de_polymut(
    target: Genotype,
    c1: Genotype,
    c2: Genotype,
    c3: Genotype,
    cfg: OperatorConfig,
    rng: np.random.Generator,
) -> Genotype:
    """DE/rand/1 mutant c3 + F*(c1 - c2), binomial crossover against the
    target at rate CR (one gene always from the mutant), then per-gene
    polynomial mutation at rate p_m."""
    n = len(target.genes)
    for other in (c1, c2, c3):
        if len(other.genes) != n or other.scheme != target.scheme:
            raise ValueError("all four genotypes must share scheme and length")
    if cfg.p_m is None:
        raise ValueError("p_m is unresolved; call cfg.resolved(pop_size) first")

    mutant = c3.genes + cfg.f * (c1.genes - c2.genes)
    j_rand = rng.integers(n)
    cross = rng.random(n) < cfg.cr
    cross[j_rand] = True
    child = np.where(cross, mutant, target.genes)
    np.clip(child, 0.0, 1.0, out=child)

    mutate = rng.random(n) < cfg.p_m
    if np.any(mutate):
        child[mutate] = _polymut_values(child[mutate], cfg.eta_m, rng.random(mutate.sum()))
    return Genotype(genes=child, scheme=target.scheme)


def op_power(g: Genotype, rng: np.random.Generator) -> Genotype:
    """Raise every gene to one shared exponent drawn from U[1,2].

    The shared exponent preserves the gene ranking exactly, so the decoded
    selection is unchanged; only the weight distribution sharpens.
    """
    r = rng.uniform(1.0, 2.0)
    return Genotype(genes=g.genes**r, scheme=g.scheme)


def swap_partner(
    strategy: int,
    i: int,
    selection: np.ndarray,
    inst: Instance,
) -> int | None:
    """Pick the swap partner j for selected asset i under one of 4 strategies.

    0: any other selected asset is eligible (caller draws); this function
       returns None and the caller must sample uniformly.
    1: the non-selected asset with the lowest individual risk (min sigma).
    2: the non-selected asset with the highest expected return (max mu).
    3: the non-selected asset least correlated with the rest of the
       selection, argmin_j sum_{k in selection - {i}} rho_kj.

    Ties resolve to the lower asset index.  Returns None when no candidate
    exists.
    """
    if strategy == 0:
        return None
    candidates = np.flatnonzero(~selection)
    if len(candidates) == 0:
        return None
    if strategy == 1:
        return int(candidates[np.argmin(inst.sigma[candidates])])
    if strategy == 2:
        return int(candidates[np.argmax(inst.mu[candidates])])
    if strategy == 3:
        others = np.flatnonzero(selection)
        others = others[others != i]
        if len(others) == 0:
            return int(candidates[0])
        scores = inst.rho[np.ix_(candidates, others)].sum(axis=1)
        return int(candidates[np.argmin(scores)])
    raise ValueError(f"unknown swap strategy {strategy}")


def op_swap(
    g: Genotype,
    decoded,
    inst: Instance,
    c: ConstraintSet,
    rng: np.random.Generator,
) -> Genotype:
    """Swap genes i and j, where i is a random selected, non-pre-assigned
    asset and j comes from one of four uniformly drawn strategies.

    ``decoded`` must expose the selection mask of g's decode.  For DCS
    genotypes the paired weight genes i+N and j+N are swapped as well.
    Returns g unchanged when no eligible i or partner j exists.
    """
    selection = decoded.selection
    eligible = np.flatnonzero(selection & ~c.preassigned)
    if len(eligible) == 0:
        return g
    i = int(rng.choice(eligible))
    strategy = int(rng.integers(4))
    if strategy == 0:
        others = np.flatnonzero(selection)
        others = others[others != i]
        if len(others) == 0:
            return g
        j = int(rng.choice(others))
    else:
        j = swap_partner(strategy, i, selection, inst)
        if j is None:
            return g

    genes = g.genes.copy()
    genes[i], genes[j] = genes[j], genes[i]
    if g.scheme == DCS:
        n = g.n_assets
        genes[i + n], genes[j + n] = genes[j + n], genes[i + n]
    return Genotype(genes=genes, scheme=g.scheme)

"""Genotype representations, decoding and the constraint-repair procedure.

Two schemes are supported.  The compressed scheme (CCS) uses one vector in
[0,1]^N whose entries pick the selection by rank and the weights by
normalized value.  The direct scheme (DCS) uses two stacked vectors in
[0,1]^{2N}: the first half drives the selection with the same rank rule,
the second half supplies the weights.

Decoding is deterministic: ties in gene value are broken toward the lower
asset index, and a degenerate all-zero weight mass yields equal weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import ConstraintError, ConstraintSet, Portfolio, RawPortfolio

__all__ = [
    "CCS",
    "DCS",
    "SCHEMES",
    "Genotype",
    "random_genotype",
    "select_assets",
    "ccs_decode",
    "dcs_decode",
    "decode",
    "repair",
]

CCS = "ccs"
DCS = "dcs"
SCHEMES = (CCS, DCS)


@dataclass(frozen=True)
class Genotype:
    """A real-valued search point: genes in [0,1], length N (CCS) or 2N (DCS)."""

    genes: np.ndarray
    scheme: str

    def __post_init__(self):
        genes = np.asarray(self.genes, dtype=float)
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}, expected one of {SCHEMES}")
        if genes.ndim != 1 or len(genes) == 0:
            raise ValueError("genes must be a non-empty 1-d array")
        if self.scheme == DCS and len(genes) % 2 != 0:
            raise ValueError("a DCS genotype needs an even gene count (2N)")
        if np.any(genes < 0) or np.any(genes > 1):
            raise ValueError("genes must lie in [0, 1]")
        genes = genes.copy()
        genes.flags.writeable = False
        object.__setattr__(self, "genes", genes)

    @property
    def n_assets(self) -> int:
        return len(self.genes) if self.scheme == CCS else len(self.genes) // 2


def random_genotype(scheme: str, n_assets: int, rng: np.random.Generator) -> Genotype:
    """Sample i.i.d. uniform genes on [0,1], length N or 2N by scheme."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}, expected one of {SCHEMES}")
    length = n_assets if scheme == CCS else 2 * n_assets
    return Genotype(genes=rng.random(length), scheme=scheme)


def select_assets(values: np.ndarray, c: ConstraintSet) -> np.ndarray:
    """Selection mask: all pre-assigned assets plus the K-L highest-value rest.

    Ties in value go to the lower asset index.
    """
    free_slots = c.cardinality - c.n_preassigned
    selection = c.preassigned.copy()
    if free_slots > 0:
        order = np.argsort(-values, kind="stable")  # descending, lower index first
        free = order[~c.preassigned[order]]
        selection[free[:free_slots]] = True
    return selection


def _normalized_weights(values: np.ndarray, selection: np.ndarray, k: int) -> np.ndarray:
    weights = np.zeros(len(values))
    mass = values[selection].sum()
    if mass > 0:
        weights[selection] = values[selection] / mass
    else:
        weights[selection] = 1.0 / k
    return weights


def ccs_decode(g: Genotype, c: ConstraintSet) -> RawPortfolio:
    """Decode a compressed genotype: the same genes rank the selection and,
    renormalized over it, become the pre-repair weights."""
    if g.scheme != CCS:
        raise ValueError(f"expected a {CCS} genotype, got {g.scheme}")
    if g.n_assets != c.n_assets:
        raise ValueError(f"genotype covers {g.n_assets} assets, constraints {c.n_assets}")
    selection = select_assets(g.genes, c)
    return RawPortfolio(
        selection=selection,
        weights=_normalized_weights(g.genes, selection, c.cardinality),
    )


def dcs_decode(g: Genotype, c: ConstraintSet) -> RawPortfolio:
    """Decode a direct genotype: first half selects (rank rule), second half
    supplies the weights over the selection."""
    if g.scheme != DCS:
        raise ValueError(f"expected a {DCS} genotype, got {g.scheme}")
    if g.n_assets != c.n_assets:
        raise ValueError(f"genotype covers {g.n_assets} assets, constraints {c.n_assets}")
    n = g.n_assets
    selection = select_assets(g.genes[:n], c)
    return RawPortfolio(
        selection=selection,
        weights=_normalized_weights(g.genes[n:], selection, c.cardinality),
    )


def decode(g: Genotype, c: ConstraintSet) -> RawPortfolio:
    return ccs_decode(g, c) if g.scheme == CCS else dcs_decode(g, c)


def repair(p: RawPortfolio | Portfolio, c: ConstraintSet) -> Portfolio:
    """Quantize a decoded portfolio to lots and enforce budget and bounds.

    Works entirely in integer lot units with T = lot_denominator:

    1. every selected asset starts at its weight truncated to whole lots,
       raised to the floor bound (and capped at the ceiling bound);
    2. while the lots exceed T, one lot is taken from the largest holding
       whose floor permits it; while they fall short, one lot is added to
       the smallest holding whose ceiling permits it (ties: lowest index).

    Each iteration moves the total by exactly one lot toward T, so the loop
    terminates after at most T steps and the result is fully feasible.
    """
    sel_idx = np.flatnonzero(p.selection)
    if len(sel_idx) != c.cardinality:
        raise ConstraintError(
            f"repair needs exactly K={c.cardinality} selected assets, got {len(sel_idx)}"
        )
    if not np.all(p.selection[c.preassigned]):
        raise ConstraintError("repair needs every pre-assigned asset selected")

    t = c.lot_denominator
    lo = c.min_lots[sel_idx]
    hi = c.max_lots[sel_idx]
    lo_total = int(lo.sum())
    hi_total = int(hi.sum())
    if lo_total > t or hi_total < t:
        raise ConstraintError(
            f"selection admits lot totals [{lo_total}, {hi_total}], "
            f"which excludes the budget {t}"
        )

    if isinstance(p, Portfolio) and p.lot_denominator == t:
        start = p.lots[sel_idx]
    else:
        # truncate toward zero; the snap keeps exact lot multiples intact
        start = np.floor(p.weights[sel_idx] * t + 1e-9).astype(np.int64)
    lots = list(np.clip(start, lo, hi))
    lo = list(lo)
    hi = list(hi)
    k = len(lots)
    total = sum(lots)
    while total > t:
        best = -1
        for i in range(k):
            if lots[i] > lo[i] and (best < 0 or lots[i] > lots[best]):
                best = i
        lots[best] -= 1
        total -= 1
    while total < t:
        best = -1
        for i in range(k):
            if lots[i] < hi[i] and (best < 0 or lots[i] < lots[best]):
                best = i
        lots[best] += 1
        total += 1

    full = np.zeros(p.n_assets, dtype=np.int64)
    full[sel_idx] = lots
    return Portfolio(selection=p.selection, lots=full, lot_denominator=t)

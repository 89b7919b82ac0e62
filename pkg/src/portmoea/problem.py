"""Portfolio objectives and the five constraint families of the model.

Weights are held as integer lot counts (``weight = lots / lot_denominator``)
so that the budget and round-lot constraints are checked in exact integer
arithmetic; no feasibility test uses a floating-point tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .instance import Instance

__all__ = [
    "ConstraintError",
    "ConstraintSet",
    "Portfolio",
    "RawPortfolio",
    "ObjectiveVector",
    "FeasibilityReport",
    "preset_constraints",
    "evaluate",
    "check_feasibility",
]

# snap tolerance used once, when converting real-valued bounds to lot counts
_LOT_SNAP = 1e-9


def lot_denominator(lot: float | int) -> int:
    """Convert a round-lot size to its integer denominator 1/lot.

    Accepts either the lot fraction (e.g. 0.008 -> 125) or the denominator
    itself.  1 must be divisible by the lot size.
    """
    if isinstance(lot, (int, np.integer)):
        denom = int(lot)
        if denom < 1:
            raise ConstraintError(f"lot denominator must be >= 1, got {denom}")
        return denom
    if not 0 < lot <= 1:
        raise ConstraintError(f"lot size must lie in (0, 1], got {lot}")
    denom = round(1.0 / lot)
    if denom < 1 or abs(denom * lot - 1.0) > _LOT_SNAP:
        raise ConstraintError(f"1 is not divisible by lot size {lot}")
    return denom


class ConstraintError(ValueError):
    """Invalid or infeasible constraint configuration."""


@dataclass(frozen=True)
class ConstraintSet:
    """Cardinality, floor/ceiling, pre-assignment and round-lot parameters.

    ``lot_denominator`` is the integer T = 1/tau; per-asset lot bounds
    ``min_lots = ceil(floor_i * T)`` and ``max_lots = floor(ceiling_i * T)``
    are derived once so repair and feasibility share the same quantization.
    """

    cardinality: int
    floors: np.ndarray
    ceilings: np.ndarray
    preassigned: np.ndarray
    lot_denominator: int
    min_lots: np.ndarray = field(init=False, repr=False, compare=False)
    max_lots: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        floors = np.asarray(self.floors, dtype=float)
        ceilings = np.asarray(self.ceilings, dtype=float)
        pre = np.asarray(self.preassigned, dtype=bool)
        n = len(floors)
        k = int(self.cardinality)
        t = int(self.lot_denominator)
        if floors.shape != (n,) or ceilings.shape != (n,) or pre.shape != (n,):
            raise ConstraintError("floors, ceilings and preassigned must share one length")
        if n < 1:
            raise ConstraintError("constraint set needs at least one asset")
        if t < 1:
            raise ConstraintError(f"lot denominator must be >= 1, got {t}")
        if np.any(floors < 0) or np.any(ceilings > 1) or np.any(floors > ceilings):
            raise ConstraintError("need 0 <= floor_i <= ceiling_i <= 1 for every asset")
        n_pre = int(pre.sum())
        if not n_pre <= k <= n:
            raise ConstraintError(
                f"cardinality {k} must satisfy {n_pre} (pre-assigned) <= K <= {n} (assets)"
            )

        min_lots = np.ceil(floors * t - _LOT_SNAP).astype(np.int64)
        max_lots = np.floor(ceilings * t + _LOT_SNAP).astype(np.int64)
        if np.any(min_lots > max_lots):
            bad = int(np.flatnonzero(min_lots > max_lots)[0])
            raise ConstraintError(
                f"asset {bad}: no lot count satisfies both bounds "
                f"[{floors[bad]}, {ceilings[bad]}] at lot 1/{t}"
            )
        # worst case over any K-asset selection: the K largest floors must fit
        worst_floor = int(np.sort(min_lots)[-k:].sum())
        if worst_floor > t:
            raise ConstraintError(
                f"floors are infeasible: {k} assets may require {worst_floor} lots > {t}"
            )
        if k * float(ceilings.max()) < 1.0:
            raise ConstraintError(
                f"ceilings are infeasible: K*max(ceiling) = {k * ceilings.max()} < 1"
            )

        object.__setattr__(self, "cardinality", k)
        object.__setattr__(self, "lot_denominator", t)
        for name, arr in [
            ("floors", floors),
            ("ceilings", ceilings),
            ("preassigned", pre),
            ("min_lots", min_lots),
            ("max_lots", max_lots),
        ]:
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def n_assets(self) -> int:
        return len(self.floors)

    @property
    def n_preassigned(self) -> int:
        return int(self.preassigned.sum())

    @property
    def lot(self) -> float:
        """The round-lot size tau = 1/lot_denominator."""
        return 1.0 / self.lot_denominator

    @classmethod
    def uniform(
        cls,
        n_assets: int,
        cardinality: int,
        floor: float = 0.01,
        ceiling: float = 1.0,
        preassigned: tuple[int, ...] = (),
        lot: float | int = 0.008,
    ) -> "ConstraintSet":
        """Build a set with shared bounds; ``preassigned`` holds 0-based indices."""
        pre = np.zeros(n_assets, dtype=bool)
        for idx in preassigned:
            if not 0 <= idx < n_assets:
                raise ConstraintError(
                    f"pre-assigned asset index {idx} out of range [0, {n_assets})"
                )
            pre[idx] = True
        return cls(
            cardinality=cardinality,
            floors=np.full(n_assets, float(floor)),
            ceilings=np.full(n_assets, float(ceiling)),
            preassigned=pre,
            lot_denominator=lot_denominator(lot),
        )


def preset_constraints(preset: str, n_assets: int) -> ConstraintSet:
    """The two benchmark constraint sets.

    ``"i"``: K=10, floor 0.01, ceiling 1.0, asset 30 (1-based) pre-assigned,
    lot 0.008.  ``"ii"``: K=15 with asset 5 pre-assigned, other values equal.
    """
    if preset == "i":
        k, pre_1based = 10, 30
    elif preset == "ii":
        k, pre_1based = 15, 5
    else:
        raise ConstraintError(f"unknown constraint preset {preset!r}")
    if pre_1based > n_assets:
        raise ConstraintError(
            f"constraint set ({preset}) pre-assigns asset {pre_1based}, "
            f"but the instance has only {n_assets} assets"
        )
    if k > n_assets:
        raise ConstraintError(
            f"constraint set ({preset}) needs K={k} <= {n_assets} assets"
        )
    return ConstraintSet.uniform(
        n_assets, cardinality=k, floor=0.01, ceiling=1.0,
        preassigned=(pre_1based - 1,), lot=0.008,
    )


@dataclass(frozen=True)
class Portfolio:
    """A lot-quantized portfolio: selection mask plus integer lot counts."""

    selection: np.ndarray
    lots: np.ndarray
    lot_denominator: int

    def __post_init__(self):
        sel = np.asarray(self.selection, dtype=bool)
        lots = np.asarray(self.lots, dtype=np.int64)
        if sel.shape != lots.shape or sel.ndim != 1:
            raise ValueError("selection and lots must be 1-d arrays of equal length")
        if np.any(lots < 0):
            raise ValueError("lot counts must be non-negative")
        if np.any(lots[~sel] != 0):
            raise ValueError("unselected assets must hold zero lots")
        sel = sel.copy()
        lots = lots.copy()
        sel.flags.writeable = False
        lots.flags.writeable = False
        object.__setattr__(self, "selection", sel)
        object.__setattr__(self, "lots", lots)
        object.__setattr__(self, "lot_denominator", int(self.lot_denominator))

    @property
    def n_assets(self) -> int:
        return len(self.selection)

    @property
    def weights(self) -> np.ndarray:
        return self.lots / self.lot_denominator

    def csv_rows(self) -> list[str]:
        """Held positions as "asset,lots,weight" rows (1-based asset ids),
        preceded by a header row."""
        rows = ["asset,lots,weight"]
        for i in np.flatnonzero(self.selection):
            rows.append(f"{i + 1},{int(self.lots[i])},{float(self.weights[i])!r}")
        return rows


@dataclass(frozen=True)
class RawPortfolio:
    """A decoded, not yet lot-quantized portfolio (real-valued weights)."""

    selection: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        sel = np.asarray(self.selection, dtype=bool)
        w = np.asarray(self.weights, dtype=float)
        if sel.shape != w.shape or sel.ndim != 1:
            raise ValueError("selection and weights must be 1-d arrays of equal length")
        if np.any(w < 0):
            raise ValueError("weights must be non-negative")
        if np.any(w[~sel] != 0):
            raise ValueError("unselected assets must carry zero weight")
        sel = sel.copy()
        w = w.copy()
        sel.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "selection", sel)
        object.__setattr__(self, "weights", w)

    @property
    def n_assets(self) -> int:
        return len(self.selection)


@dataclass(frozen=True)
class ObjectiveVector:
    """Risk (variance) to minimize and expected return to maximize."""

    risk: float
    ret: float

    def minimization(self) -> np.ndarray:
        """Both objectives in minimization orientation: (risk, -return)."""
        return np.array([self.risk, -self.ret])


@dataclass(frozen=True)
class FeasibilityReport:
    """One verdict per constraint family; ``ok`` is their conjunction."""

    sum_to_one: bool
    cardinality: bool
    floor_ceiling: bool
    preassignment: bool
    round_lot: bool

    @property
    def ok(self) -> bool:
        return (
            self.sum_to_one
            and self.cardinality
            and self.floor_ceiling
            and self.preassignment
            and self.round_lot
        )

    def __str__(self) -> str:
        def mark(b: bool) -> str:
            return "ok" if b else "VIOLATED"

        return (
            f"sum_to_one={mark(self.sum_to_one)} "
            f"cardinality={mark(self.cardinality)} "
            f"floor_ceiling={mark(self.floor_ceiling)} "
            f"preassignment={mark(self.preassignment)} "
            f"round_lot={mark(self.round_lot)}"
        )


def evaluate(p: Portfolio | RawPortfolio, inst: Instance) -> ObjectiveVector:
    """Portfolio risk and return, iterating selected assets only (O(K^2))."""
    if p.n_assets != inst.n_assets:
        raise ValueError(
            f"portfolio covers {p.n_assets} assets, instance has {inst.n_assets}"
        )
    idx = np.flatnonzero(p.selection)
    w = p.weights[idx]
    risk = float(w @ inst.cov[np.ix_(idx, idx)] @ w)
    ret = float(w @ inst.mu[idx])
    return ObjectiveVector(risk=risk, ret=ret)


def check_feasibility(p: Portfolio, c: ConstraintSet) -> FeasibilityReport:
    """Diagnostic check of every constraint family, in exact lot arithmetic."""
    if p.n_assets != c.n_assets:
        raise ValueError(
            f"portfolio covers {p.n_assets} assets, constraint set {c.n_assets}"
        )
    sel = p.selection
    lots = p.lots
    in_bounds = np.all(lots[sel] >= c.min_lots[sel]) and np.all(
        lots[sel] <= c.max_lots[sel]
    )
    return FeasibilityReport(
        sum_to_one=int(lots.sum()) == c.lot_denominator,
        cardinality=int(sel.sum()) == c.cardinality,
        floor_ceiling=bool(in_bounds),
        preassignment=bool(np.all(sel[c.preassigned])),
        # integer lot counts make every weight a lot multiple by construction
        round_lot=p.lot_denominator == c.lot_denominator,
    )

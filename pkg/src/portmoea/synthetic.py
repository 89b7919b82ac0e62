"""Deterministic synthetic benchmark instances and reference frontiers.

The generator mimics the statistical texture of the classic weekly-return
benchmarks (factor-driven, mostly positive correlations; volatilities of a
few percent) so the bundled data files exercise the same code paths as the
published ones.  Frontiers are computed as the unconstrained efficient
frontier (long-only, fully invested, no cardinality or lot constraints) by
quadratic programming and serve as the reference set for the indicators.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .instance import Instance, ReferenceFront, parse_frontier

__all__ = ["synthetic_instance", "unconstrained_frontier"]


def synthetic_instance(n_assets: int, seed: int, name: str | None = None) -> Instance:
    """A reproducible asset universe from a market-plus-sector factor model.

    Every asset loads on one shared market factor and on one of five
    sectors, with idiosyncratic noise on top, giving the blocky, mostly
    positive correlation structure of real equity universes.  Volatilities
    spread over [1%, 8%] and expected per-period returns are drawn around
    0.2% independently of risk, so the efficient frontier trades off
    meaningfully and cardinality-constrained tracking of it is non-trivial.
    """
    rng = np.random.default_rng(seed)
    sectors = rng.integers(0, 5, n_assets)
    loadings = np.zeros((n_assets, 6))
    loadings[:, 0] = rng.uniform(0.45, 0.75, n_assets)
    for i in range(n_assets):
        loadings[i, 1 + sectors[i]] = rng.uniform(0.55, 0.85)
    idiosyncratic = rng.uniform(0.05, 0.4, n_assets)
    cov_factor = loadings @ loadings.T + np.diag(idiosyncratic)
    scale = np.sqrt(np.diag(cov_factor))
    rho = cov_factor / np.outer(scale, scale)
    rho = np.triu(rho) + np.triu(rho, k=1).T
    np.fill_diagonal(rho, 1.0)

    sigma = rng.uniform(0.01, 0.08, n_assets)
    mu = rng.normal(0.002, 0.002, n_assets)
    return Instance(
        name=name or f"synth{n_assets}",
        n_assets=n_assets,
        mu=mu,
        sigma=sigma,
        rho=rho,
    )


def unconstrained_frontier(inst: Instance, n_points: int = 200) -> ReferenceFront:
    """Long-only efficient frontier by QP: minimize w'Cw subject to
    sum(w) = 1, w'mu = target, 0 <= w <= 1, swept over target returns.

    The sweep spans the global minimum-variance return up to the maximum
    single-asset return; dominated solver points are cleaned on output.
    """
    n = inst.n_assets
    cov = inst.cov
    mu = inst.mu
    bounds = [(0.0, 1.0)] * n
    budget = {"type": "eq", "fun": lambda w: w.sum() - 1.0}

    def solve(target: float | None, start: np.ndarray) -> np.ndarray:
        cons = [budget]
        if target is not None:
            cons.append({"type": "eq", "fun": lambda w: w @ mu - target})
        res = minimize(
            lambda w: w @ cov @ w,
            start,
            jac=lambda w: 2.0 * cov @ w,
            bounds=bounds,
            constraints=cons,
            method="SLSQP",
            options={"maxiter": 200, "ftol": 1e-12},
        )
        return res.x

    w_minvar = solve(None, np.full(n, 1.0 / n))
    ret_lo = float(w_minvar @ mu)
    ret_hi = float(mu.max())

    lines = []
    w = w_minvar
    for target in np.linspace(ret_lo, ret_hi, n_points):
        w = solve(float(target), w)
        lines.append(f"{float(w @ mu)!r} {float(w @ cov @ w)!r}")
    return parse_frontier("\n".join(lines))

"""Benchmark instances: asset statistics and reference frontiers.

Reads the whitespace-delimited OR-Library ``port`` layout (asset count,
one ``mean stddev`` line per asset, then 1-based ``i j correlation``
triples covering at least the upper triangle) and the companion frontier
files of ``mean_return variance`` lines.  File indices are 1-based; all
indices are 0-based past the parse boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ParseError",
    "Instance",
    "ReferenceFront",
    "parse_orlibrary",
    "serialize_orlibrary",
    "parse_frontier",
    "serialize_frontier",
    "load_instance",
    "load_frontier",
]

# mirrored correlation entries (both triangles given) must agree this closely
MIRROR_TOLERANCE = 1e-9
# symmetry tolerance accepted when a correlation matrix is passed in directly
SYMMETRY_TOLERANCE = 1e-12


class ParseError(ValueError):
    """Malformed, incomplete or inconsistent benchmark file."""


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Instance:
    """An asset universe: expected returns, deviations and correlations.

    The dense covariance matrix is materialized once at construction; the
    correlation matrix is canonicalized by mirroring its upper triangle so
    that ``covariance(i, j) == covariance(j, i)`` holds exactly.  Instances
    are immutable and safe to share across concurrent runs.
    """

    name: str
    n_assets: int
    mu: np.ndarray
    sigma: np.ndarray
    rho: np.ndarray
    cov: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.n_assets
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        rho = np.asarray(self.rho, dtype=float)
        if n < 1:
            raise ValueError(f"n_assets must be positive, got {n}")
        if mu.shape != (n,) or sigma.shape != (n,):
            raise ValueError(
                f"mu/sigma must have length {n}, got {mu.shape} and {sigma.shape}"
            )
        if rho.shape != (n, n):
            raise ValueError(f"rho must be {n}x{n}, got {rho.shape}")
        if np.any(sigma < 0):
            raise ValueError("sigma entries must be non-negative")
        if np.any(np.abs(rho) > 1 + MIRROR_TOLERANCE):
            raise ValueError("correlation entries must lie in [-1, 1]")
        if np.any(rho.diagonal() != 1.0):
            raise ValueError("correlation diagonal must be exactly 1")
        if np.max(np.abs(rho - rho.T)) > SYMMETRY_TOLERANCE:
            raise ValueError("correlation matrix is not symmetric")

        # canonical form: upper triangle wins, so rho is exactly symmetric
        rho = np.triu(rho) + np.triu(rho, k=1).T
        np.clip(rho, -1.0, 1.0, out=rho)
        np.fill_diagonal(rho, 1.0)
        cov = rho * np.outer(sigma, sigma)

        object.__setattr__(self, "mu", _frozen(mu))
        object.__setattr__(self, "sigma", _frozen(sigma))
        object.__setattr__(self, "rho", _frozen(rho))
        object.__setattr__(self, "cov", _frozen(cov))

    def covariance(self, i: int, j: int) -> float:
        """Covariance of assets ``i`` and ``j`` (0-based), rho_ij*sigma_i*sigma_j."""
        n = self.n_assets
        if not (0 <= i < n and 0 <= j < n):
            raise IndexError(f"asset index out of range [0, {n}): ({i}, {j})")
        return float(self.cov[i, j])


@dataclass(frozen=True)
class ReferenceFront:
    """A dominance-clean reference frontier, sorted by ascending risk.

    ``returns`` and ``risks`` are parallel arrays; higher return must come
    with strictly higher risk (minimize risk, maximize return).  ``n_removed``
    counts dominated or duplicate input points dropped while cleaning.
    """

    returns: np.ndarray
    risks: np.ndarray
    n_removed: int = 0

    def __post_init__(self):
        returns = np.asarray(self.returns, dtype=float)
        risks = np.asarray(self.risks, dtype=float)
        if returns.ndim != 1 or returns.shape != risks.shape:
            raise ValueError("returns and risks must be 1-d arrays of equal length")
        if len(returns) == 0:
            raise ValueError("reference front must contain at least one point")
        if np.any(np.diff(risks) <= 0) or np.any(np.diff(returns) <= 0):
            raise ValueError("front must have strictly increasing risk and return")
        object.__setattr__(self, "returns", _frozen(returns))
        object.__setattr__(self, "risks", _frozen(risks))

    def __len__(self) -> int:
        return len(self.returns)

    @property
    def points(self) -> np.ndarray:
        """(n, 2) array of (return, risk) pairs."""
        return np.column_stack([self.returns, self.risks])


def _tokens(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        for tok in line.split():
            yield tok, lineno


class _TokenReader:
    def __init__(self, text: str):
        self._it = _tokens(text)
        self._pushed = None
        self.lineno = 0

    def next(self, what: str) -> str:
        if self._pushed is not None:
            tok, self.lineno = self._pushed
            self._pushed = None
            return tok
        try:
            tok, self.lineno = next(self._it)
        except StopIteration:
            raise ParseError(f"unexpected end of input, expected {what}") from None
        return tok

    def next_int(self, what: str) -> int:
        tok = self.next(what)
        try:
            return int(tok)
        except ValueError:
            raise ParseError(
                f"line {self.lineno}: expected integer {what}, got {tok!r}"
            ) from None

    def next_float(self, what: str) -> float:
        tok = self.next(what)
        try:
            return float(tok)
        except ValueError:
            raise ParseError(
                f"line {self.lineno}: expected number {what}, got {tok!r}"
            ) from None

    def exhausted(self) -> bool:
        if self._pushed is not None:
            return False
        try:
            self._pushed = next(self._it)
        except StopIteration:
            return True
        return False


def parse_orlibrary(text: str, name: str = "instance") -> Instance:
    """Parse an OR-Library style ``port`` file into an :class:`Instance`.

    Correlation entries may be given on either or both triangles; mirrored
    duplicates must agree within ``MIRROR_TOLERANCE`` and any missing
    off-diagonal pair is an error.  The diagonal is forced to 1.
    """
    rd = _TokenReader(text)
    n = rd.next_int("asset count")
    if n < 1:
        raise ParseError(f"line {rd.lineno}: asset count must be positive, got {n}")

    mu = np.empty(n)
    sigma = np.empty(n)
    for i in range(n):
        mu[i] = rd.next_float(f"mean return of asset {i + 1}")
        sigma[i] = rd.next_float(f"stddev of asset {i + 1}")
        if sigma[i] < 0:
            raise ParseError(f"line {rd.lineno}: negative stddev for asset {i + 1}")

    rho = np.full((n, n), np.nan)
    while not rd.exhausted():
        i = rd.next_int("correlation row index")
        if not (1 <= i <= n):
            raise ParseError(f"line {rd.lineno}: asset index {i} out of [1, {n}]")
        j = rd.next_int("correlation column index")
        if not (1 <= j <= n):
            raise ParseError(f"line {rd.lineno}: asset index {j} out of [1, {n}]")
        val = rd.next_float(f"correlation of assets ({i}, {j})")
        if abs(val) > 1 + MIRROR_TOLERANCE:
            raise ParseError(
                f"line {rd.lineno}: correlation {val!r} of ({i}, {j}) outside [-1, 1]"
            )
        a, b = min(i, j) - 1, max(i, j) - 1
        prev = rho[a, b]
        if not np.isnan(prev) and abs(prev - val) > MIRROR_TOLERANCE:
            raise ParseError(
                f"line {rd.lineno}: correlation of ({i}, {j}) given twice with "
                f"disagreeing values {prev!r} and {val!r}"
            )
        if np.isnan(prev):
            rho[a, b] = val

    upper = np.triu_indices(n, k=1)
    missing = np.isnan(rho[upper])
    if np.any(missing):
        k = int(np.flatnonzero(missing)[0])
        i, j = upper[0][k] + 1, upper[1][k] + 1
        raise ParseError(
            f"missing correlation entry for assets ({i}, {j}) "
            f"({int(missing.sum())} missing in total)"
        )

    np.fill_diagonal(rho, 1.0)
    rho = np.triu(rho) + np.triu(rho, k=1).T
    return Instance(name=name, n_assets=n, mu=mu, sigma=sigma, rho=rho)


def serialize_orlibrary(inst: Instance) -> str:
    """Render an instance back to the ``port`` file layout (1-based indices).

    Round-trips exactly: ``parse_orlibrary(serialize_orlibrary(inst))``
    reproduces n_assets, mu, sigma and the upper-triangular correlations.
    """
    lines = [str(inst.n_assets)]
    for i in range(inst.n_assets):
        lines.append(f"{float(inst.mu[i])!r} {float(inst.sigma[i])!r}")
    for i in range(inst.n_assets):
        for j in range(i, inst.n_assets):
            lines.append(f"{i + 1} {j + 1} {float(inst.rho[i, j])!r}")
    return "\n".join(lines) + "\n"


def parse_frontier(text: str) -> ReferenceFront:
    """Parse ``mean_return variance`` lines into a clean :class:`ReferenceFront`.

    Points are sorted by ascending risk; any point dominated by another
    (lower or equal return at higher or equal risk) and exact duplicates are
    dropped, with the count reported on the result.
    """
    points = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        toks = line.split()
        if not toks:
            continue
        if len(toks) != 2:
            raise ParseError(
                f"line {lineno}: expected 'return variance', got {len(toks)} tokens"
            )
        try:
            ret, risk = float(toks[0]), float(toks[1])
        except ValueError:
            raise ParseError(f"line {lineno}: non-numeric token in {line!r}") from None
        points.append((risk, -ret))
    if not points:
        raise ParseError("frontier file contains no points")

    # ascending risk, ties resolved to the higher return first
    points.sort()
    risks, returns = [], []
    best_ret = -np.inf
    for risk, negret in points:
        if -negret > best_ret:
            risks.append(risk)
            returns.append(-negret)
            best_ret = -negret
    return ReferenceFront(
        returns=np.array(returns),
        risks=np.array(risks),
        n_removed=len(points) - len(risks),
    )


def serialize_frontier(front: ReferenceFront) -> str:
    """Render a frontier to the ``mean_return variance`` layout."""
    lines = [f"{float(r)!r} {float(v)!r}" for r, v in zip(front.returns, front.risks)]
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> Instance:
    path = Path(path)
    return parse_orlibrary(path.read_text(), name=path.stem)


def load_frontier(path: str | Path) -> ReferenceFront:
    return parse_frontier(Path(path).read_text())

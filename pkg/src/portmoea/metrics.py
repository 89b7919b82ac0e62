"""Quality indicators and comparison statistics for 2-D fronts.

All indicator math happens in minimization orientation, (risk, -return),
after an affine rescale whose bounds come from the reference front; the
reference then spans [0,1]^2 while obtained points may exceed it and are
kept unclipped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .instance import ReferenceFront

__all__ = [
    "DEFAULT_REFERENCE_POINT",
    "NormalizedFront",
    "minimization_points",
    "reference_bounds",
    "normalize_points",
    "igd",
    "hypervolume_2d",
    "ih",
    "rank_sum_test",
    "mean_rank",
    "compare_samples",
    "format_counts",
]

DEFAULT_REFERENCE_POINT = (1.2, 1.2)


def minimization_points(returns, risks) -> np.ndarray:
    """Stack (risk, -return) columns: both objectives to minimize."""
    returns = np.asarray(returns, dtype=float)
    risks = np.asarray(risks, dtype=float)
    return np.column_stack([risks, -returns])


def reference_bounds(front: ReferenceFront) -> np.ndarray:
    """(2, 2) array of per-objective (min, max) over the reference front,
    in minimization orientation."""
    pts = minimization_points(front.returns, front.risks)
    return np.stack([pts.min(axis=0), pts.max(axis=0)], axis=1)


def normalize_points(points: np.ndarray, bounds: np.ndarray) -> np.ndarray:
    """Affinely rescale minimization points by the given bounds.

    An objective with zero range maps to zero; points outside the bounds
    land outside [0,1] and are kept as-is.
    """
    points = np.asarray(points, dtype=float)
    lo = bounds[:, 0]
    span = bounds[:, 1] - lo
    span = np.where(span > 0, span, 1.0)
    return (points - lo) / span


@dataclass(frozen=True)
class NormalizedFront:
    """Minimization points rescaled by reference-front bounds."""

    points: np.ndarray
    bounds: np.ndarray

    @classmethod
    def from_reference(cls, front: ReferenceFront) -> "NormalizedFront":
        bounds = reference_bounds(front)
        pts = minimization_points(front.returns, front.risks)
        return cls(points=normalize_points(pts, bounds), bounds=bounds)

    def rescale(self, points: np.ndarray) -> np.ndarray:
        """Bring other minimization points onto this front's scale."""
        return normalize_points(points, self.bounds)


def igd(obtained: np.ndarray, reference: np.ndarray) -> float:
    """Mean, over reference points, of the Euclidean distance to the
    closest obtained point.  Both sets must share one normalization."""
    obtained = np.atleast_2d(np.asarray(obtained, dtype=float))
    reference = np.atleast_2d(np.asarray(reference, dtype=float))
    if obtained.size == 0 or reference.size == 0:
        raise ValueError("igd needs non-empty obtained and reference sets")
    diff = reference[:, None, :] - obtained[None, :, :]
    dists = np.sqrt((diff**2).sum(axis=2))
    return float(dists.min(axis=1).mean())


def hypervolume_2d(points: np.ndarray, ref: tuple[float, float]) -> float:
    """Exact area of the union of boxes [p, ref] for 2-D minimization points.

    Points weakly dominated by others, or not strictly below the reference
    point in both coordinates, contribute nothing.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.size == 0:
        return 0.0
    rx, ry = float(ref[0]), float(ref[1])
    order = np.lexsort((points[:, 1], points[:, 0]))
    area = 0.0
    prev_y = ry
    for x, y in points[order]:
        if x >= rx or y >= prev_y:
            continue
        area += (rx - x) * (prev_y - y)
        prev_y = y
    return float(area)


def ih(
    obtained: np.ndarray,
    reference: np.ndarray,
    ref_point: tuple[float, float] = DEFAULT_REFERENCE_POINT,
) -> float:
    """Hypervolume shortfall of the obtained front against the reference.

    Both fronts must be normalized by the reference bounds.  Lower is
    better; a front beating the reference yields a negative value, which is
    reported as-is.
    """
    obtained = np.atleast_2d(np.asarray(obtained, dtype=float))
    if obtained.size == 0:
        raise ValueError("ih needs a non-empty obtained set")
    return hypervolume_2d(reference, ref_point) - hypervolume_2d(obtained, ref_point)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ascending ranks starting at 1; ties share the average rank."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def rank_sum_test(a, b, alpha: float = 0.05) -> str:
    """Two-sided Mann-Whitney rank-sum comparison of two samples.

    Uses the normal approximation with tie correction (no continuity
    correction).  Returns "better" when the difference is significant at
    ``alpha`` and a has the lower median, "worse" for the higher median,
    and "equal" otherwise (including fully tied samples).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n1, n2 = len(a), len(b)
    if n1 < 2 or n2 < 2:
        raise ValueError("rank_sum_test needs at least two observations per sample")
    combined = np.concatenate([a, b])
    n = n1 + n2
    ranks = _average_ranks(combined)
    r1 = ranks[:n1].sum()
    u1 = r1 - n1 * (n1 + 1) / 2

    _, counts = np.unique(combined, return_counts=True)
    tie_term = float((counts**3 - counts).sum())
    var_u = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var_u <= 0:
        return "equal"
    z = (u1 - n1 * n2 / 2) / math.sqrt(var_u)
    p = math.erfc(abs(z) / math.sqrt(2))
    if p >= alpha:
        return "equal"
    med_a, med_b = float(np.median(a)), float(np.median(b))
    if med_a < med_b:
        return "better"
    if med_a > med_b:
        return "worse"
    return "equal"


def mean_rank(results: np.ndarray) -> np.ndarray:
    """Mean rank per algorithm from an algorithms x instances matrix of means.

    On each instance the algorithms are ranked ascending (ties share the
    average rank); the ranks are then averaged across instances.
    """
    results = np.asarray(results, dtype=float)
    if results.ndim != 2 or results.size == 0:
        raise ValueError("results must be a non-empty 2-d matrix")
    if np.any(np.isnan(results)):
        raise ValueError("results matrix has missing cells")
    ranks = np.column_stack(
        [_average_ranks(results[:, j]) for j in range(results.shape[1])]
    )
    return ranks.mean(axis=1)


def compare_samples(
    samples_a: list[np.ndarray],
    samples_b: list[np.ndarray],
    alpha: float = 0.05,
) -> tuple[int, int, int]:
    """Per-instance rank-sum verdicts aggregated to (better, worse, equal)
    counts for algorithm a against algorithm b."""
    if len(samples_a) != len(samples_b):
        raise ValueError("compare_samples needs equal numbers of per-instance samples")
    plus = minus = equal = 0
    for sa, sb in zip(samples_a, samples_b):
        verdict = rank_sum_test(sa, sb, alpha)
        if verdict == "better":
            plus += 1
        elif verdict == "worse":
            minus += 1
        else:
            equal += 1
    return plus, minus, equal


def format_counts(counts: tuple[int, int, int]) -> str:
    """Render (better, worse, equal) counts as the usual "+/-/=" pattern,
    e.g. (0, 4, 1) -> "0/4/1"."""
    return f"{counts[0]}/{counts[1]}/{counts[2]}"

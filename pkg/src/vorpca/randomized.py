"""Randomized Grassmannian-sampling solver and the gap diagnostics around it.

``randomized_solve`` draws subspaces from the Haar measure, keeps the one
with the smallest trimmed loss, declares its k farthest rows the outliers
and refits PCA on the rest.  ``alpha_gap`` measures the relative separation
between the farthest inlier and the nearest outlier under a given subspace;
``ordering_preservation_radius`` probes how far one can move on the
Grassmannian before that separation stops pinning down the outlier set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Subspace,
    _pca_on_rows,
    _trimmed_on_rows,
    as_matrix,
    squared_distances,
    trimmed_loss,
)
from .grassmann import SeededRng, _basis_stream, geodesic_neighbor, grassmann_distance
from .voronoi import SolveResult

# Below this farthest-inlier distance the gap ratio is a division by zero.
DEGENERATE_D1 = 1e-12

# Preservation diagnostic defaults: shell width on the distance axis and probe count.
SHELL_WIDTH = 0.02
DEFAULT_PROBES = 500


class DegenerateGap(Exception):
    """The farthest inlier sits on the subspace, so the gap ratio is undefined."""


@dataclass(frozen=True)
class GapReport:
    """Distances around the inlier/outlier boundary: alpha = (d2 - d1) / d1."""

    d1: float  # farthest inlier
    d2: float  # nearest outlier
    alpha: float


def alpha_gap(X, subspace: Subspace, k: int) -> GapReport:
    """Relative gap between the nearest outlier and the farthest inlier.

    Sorts the distances to ``subspace``; d2 is the k-th largest (nearest
    outlier), d1 the (k+1)-th largest (farthest inlier).  Raises
    DegenerateGap when d1 <= 1e-12, and rejects k = 0 (no outliers to
    separate).
    """
    x = as_matrix(X)
    n = x.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k must satisfy 1 <= k < n={n}, got {k}")
    dists = np.sort(np.sqrt(squared_distances(x, subspace)))[::-1]
    d2 = float(dists[k - 1])
    d1 = float(dists[k])
    if d1 <= DEGENERATE_D1:
        raise DegenerateGap(
            f"farthest inlier distance {d1:.3e} is (numerically) zero; alpha is undefined"
        )
    return GapReport(d1=d1, d2=d2, alpha=(d2 - d1) / d1)


def randomized_solve(X, r: int, k: int, samples: int, rng: SeededRng) -> SolveResult:
    """Uniform-sampling solver.

    Draws ``samples`` subspaces from the Haar measure on Gr(r, d), selects
    the one with minimal trimmed loss (ties by earliest sample index),
    declares its k farthest rows the outliers, then refits PCA on the
    remaining rows and reports the refit subspace and objective.
    Deterministic given (seed, stream).
    """
    x = as_matrix(X)
    n, d = x.shape
    if not 1 <= r < d:
        raise ValueError(f"rank must satisfy 1 <= r < d, got r={r}, d={d}")
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < n={n}, got {k}")
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    best_loss = np.inf
    best_outliers: tuple[int, ...] = ()
    for basis in _basis_stream(r, d, rng, samples):
        tl = _trimmed_on_rows(x, basis, k)
        if tl.loss < best_loss:
            best_loss, best_outliers = tl.loss, tl.outliers
    keep = np.ones(n, dtype=bool)
    if best_outliers:
        keep[list(best_outliers)] = False
    refit = _pca_on_rows(x[keep], r)
    return SolveResult(
        subspace=refit.subspace,
        outliers=best_outliers,
        loss=refit.loss,
        method="randomized",
        seed=rng.seed,
        samples_used=samples,
    )


def ordering_preservation_radius(
    X,
    subspace: Subspace,
    k: int,
    probes: int = DEFAULT_PROBES,
    rng: SeededRng | None = None,
    shell_width: float = SHELL_WIDTH,
) -> float:
    """Largest probed radius within which the k-farthest set never changes.

    Probe subspaces are placed into consecutive Grassmannian-distance shells
    of width ``shell_width`` (each probe is constructed at a target distance
    inside its shell and rejected/redrawn if it lands outside).  Walking
    shells outward from the center, the returned radius is the outer edge of
    the last shell in which every probe reproduces the k-farthest set of
    ``subspace``.  Compare against ``alpha_gap(X, subspace, k).alpha``; this
    is a diagnostic, not a bound.
    """
    if probes < 1:
        raise ValueError(f"probes must be >= 1, got {probes}")
    if rng is None:
        rng = SeededRng(0)
    x = as_matrix(X)
    alpha_gap(x, subspace, k)  # propagate DegenerateGap for unusable inputs
    baseline = trimmed_loss(x, subspace, k).outliers
    n_shells = max(1, round(1.0 / shell_width))
    per_shell = max(1, probes // n_shells)
    radius = 0.0
    for shell in range(n_shells):
        lo = shell * shell_width
        hi = min((shell + 1) * shell_width, 1.0)
        for j in range(per_shell):
            gen = rng.child(shell * per_shell + j)
            probe = None
            for _ in range(8):  # reject probes that drift outside the shell
                target = gen.uniform(lo, hi)
                candidate = geodesic_neighbor(subspace, target, gen)
                dist = grassmann_distance(candidate, subspace)
                if lo - 1e-9 <= dist <= hi + 1e-9:
                    probe = candidate
                    break
            if probe is None:
                probe = candidate
            if trimmed_loss(x, probe, k).outliers != baseline:
                return radius
        radius = hi
    return radius

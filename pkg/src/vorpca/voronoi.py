"""Exact solvers for PCA with outliers.

Three routes:

* ``brute_force_solve`` enumerates every k-subset of rows and defines ground
  truth.
* the planar arc arrangement (``arc_breakpoints_2d`` / ``build_arc_diagram_2d``
  / ``voronoi_solve_2d``) realizes the higher-degree Voronoi construction
  exactly on Gr(1, 2), where the cell boundaries have closed-form roots.
* ``enumerate_candidate_sets_sampled`` / ``voronoi_solve_sampled`` discover
  nonempty cells in any dimension by uniform subspace sampling.
"""

from __future__ import annotations

import colorsys
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import PcaSolution, Subspace, _pca_on_rows, _trimmed_on_rows, as_matrix
from .grassmann import SeededRng, _basis_stream

# Breakpoint dedup tolerance (absolute, in angle); arcs shorter than this are dropped.
ANGLE_TOL = 1e-12

# Default cap on C(n, k) for exact enumeration.
DEFAULT_SUBSET_BUDGET = 2_000_000


class BudgetExceededError(RuntimeError):
    """Exact enumeration would exceed the subset budget; use a sampled solver."""


@dataclass(frozen=True)
class SolveResult:
    """One solve: fitted subspace, declared outlier rows, objective, provenance."""

    subspace: Subspace
    outliers: tuple[int, ...]
    loss: float
    method: str
    seed: int | None = None
    samples_used: int | None = None


@dataclass(frozen=True)
class ArcCell:
    """Maximal arc of line angles sharing one k-farthest row set.

    Angles parameterize lines through the origin in the plane, so the domain
    is the half-open circle [0, pi).  ``theta_hi`` may exceed pi for cells
    merged across the wrap-around; ``theta_lo < theta_hi`` always holds after
    that unwrapping.
    """

    theta_lo: float
    theta_hi: float
    farthest_k: tuple[int, ...]
    representative: float


def _line_basis(theta: float) -> np.ndarray:
    return np.array([[math.cos(theta)], [math.sin(theta)]])


def _validate_rank_k(n: int, d: int, r: int, k: int) -> None:
    if not 1 <= r < d:
        raise ValueError(f"rank must satisfy 1 <= r < d, got r={r}, d={d}")
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < n={n}, got {k}")


def _best_refit(x: np.ndarray, r: int, subsets) -> tuple[tuple[float, tuple[int, ...]], PcaSolution]:
    # Minimum of (pca loss on complement, subset); the tuple order makes the
    # reduction deterministic regardless of evaluation order: equal losses
    # fall back to lexicographic subset order.
    n = x.shape[0]
    best_key = None
    best_fit = None
    for subset in subsets:
        keep = np.ones(n, dtype=bool)
        if subset:
            keep[list(subset)] = False
        fit = _pca_on_rows(x[keep], r)
        key = (fit.loss, tuple(subset))
        if best_key is None or key < best_key:
            best_key, best_fit = key, fit
    return best_key, best_fit


def brute_force_solve(X, r: int, k: int, budget: int = DEFAULT_SUBSET_BUDGET) -> SolveResult:
    """Global optimum by enumerating every k-subset of rows.

    For each subset, fits rank-r PCA to the remaining rows; returns the
    minimum objective.  Ties between subsets are broken by lexicographic
    order of the subset, so the result is deterministic.

    Raises BudgetExceededError when C(n, k) exceeds ``budget``.
    """
    x = as_matrix(X)
    n, d = x.shape
    _validate_rank_k(n, d, r, k)
    total = math.comb(n, k)
    if total > budget:
        raise BudgetExceededError(
            f"C({n},{k}) = {total} subsets exceeds the enumeration budget {budget}; "
            "use voronoi_solve_sampled or randomized_solve"
        )
    best_key, best_fit = _best_refit(x, r, itertools.combinations(range(n), k))
    return SolveResult(
        subspace=best_fit.subspace,
        outliers=best_key[1],
        loss=best_key[0],
        method="brute",
    )


def arc_breakpoints_2d(X) -> np.ndarray:
    """Angles in [0, pi) where two rows are equidistant from the line L_theta.

    With a = x1^2 - x2^2, b = 2 x1 x2 and the squared norm c, the equidistance
    condition for rows i, j reads C - (A cos 2theta + B sin 2theta) = 0 where
    A = a_i - a_j, B = b_i - b_j, C = c_i - c_j.  Pairs with A = B = 0
    contribute no breakpoints (their distances never cross or are identical).
    Roots are deduplicated at ANGLE_TOL, including across the wrap at pi.
    """
    x = as_matrix(X)
    n, d = x.shape
    if d != 2:
        raise ValueError(f"arc arrangement requires d=2, got d={d}")
    a = x[:, 0] ** 2 - x[:, 1] ** 2
    b = 2.0 * x[:, 0] * x[:, 1]
    c = x[:, 0] ** 2 + x[:, 1] ** 2
    roots: list[float] = []
    for i in range(n):
        for j in range(i + 1, n):
            am, bm, cm = a[i] - a[j], b[i] - b[j], c[i] - c[j]
            amp = math.hypot(am, bm)
            if amp == 0.0 or abs(cm) > amp:
                continue
            psi = math.acos(min(1.0, max(-1.0, cm / amp)))
            phi = math.atan2(bm, am)
            roots.append(((phi + psi) / 2.0) % math.pi)
            roots.append(((phi - psi) / 2.0) % math.pi)
    roots.sort()
    dedup: list[float] = []
    for t in roots:
        if not dedup or t - dedup[-1] > ANGLE_TOL:
            dedup.append(t)
    if len(dedup) >= 2 and dedup[0] + math.pi - dedup[-1] <= ANGLE_TOL:
        dedup.pop()
    return np.asarray(dedup)


def build_arc_diagram_2d(X, k: int) -> list[ArcCell]:
    """Degree-(n-k) Voronoi structure on the circle of planar lines.

    Splits [0, pi) at the pairwise breakpoints, reads the k-farthest row set
    off each arc midpoint, and merges adjacent arcs (including across the
    wrap) that share a set.  Every feasible outlier set appears as some
    cell's ``farthest_k``.
    """
    x = as_matrix(X)
    n, d = x.shape
    if d != 2:
        raise ValueError(f"arc diagram requires d=2, got d={d}")
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < n={n}, got {k}")
    bps = arc_breakpoints_2d(x)
    if len(bps) == 0:
        segments = [(0.0, math.pi)]
    else:
        segments = [(bps[i], bps[i + 1]) for i in range(len(bps) - 1)]
        segments.append((bps[-1], bps[0] + math.pi))
    pieces: list[tuple[float, float, tuple[int, ...]]] = []
    for lo, hi in segments:
        if hi - lo < ANGLE_TOL:
            continue
        mid = ((lo + hi) / 2.0) % math.pi
        farthest = _trimmed_on_rows(x, _line_basis(mid), k).outliers
        pieces.append((lo, hi, farthest))
    merged: list[list] = []
    for lo, hi, s in pieces:
        if merged and merged[-1][2] == s:
            merged[-1][1] = hi
        else:
            merged.append([lo, hi, s])
    if len(merged) > 1 and merged[0][2] == merged[-1][2]:
        lo, _, s = merged.pop()
        merged[0] = [lo, merged[0][1] + math.pi, s]
    return [
        ArcCell(lo, hi, s, ((lo + hi) / 2.0) % math.pi) for lo, hi, s in merged
    ]


def voronoi_solve_2d(X, k: int) -> SolveResult:
    """Exact planar solve (d=2, r=1) via the arc diagram.

    Fits a line to the complement of each distinct cell set and returns the
    minimum objective; agrees with ``brute_force_solve`` on every planar
    instance.
    """
    x = as_matrix(X)
    n, d = x.shape
    if d != 2:
        raise ValueError(f"voronoi_solve_2d requires d=2, got d={d}")
    cells = build_arc_diagram_2d(x, k)
    candidates = sorted({c.farthest_k for c in cells})
    best_key, best_fit = _best_refit(x, 1, candidates)
    return SolveResult(
        subspace=best_fit.subspace,
        outliers=best_key[1],
        loss=best_key[0],
        method="voronoi2d",
    )


def enumerate_candidate_sets_sampled(
    X, r: int, k: int, samples: int, rng: SeededRng
) -> set[tuple[int, ...]]:
    """Outlier sets witnessed by uniformly sampled subspaces.

    Each sampled subspace witnesses the nonempty Voronoi cell of its
    k-farthest row set.  Sample i depends only on (seed, stream, i), so the
    returned family is nondecreasing in ``samples`` for a fixed rng.
    """
    x = as_matrix(X)
    n, d = x.shape
    _validate_rank_k(n, d, r, k)
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    found: set[tuple[int, ...]] = set()
    for basis in _basis_stream(r, d, rng, samples):
        found.add(_trimmed_on_rows(x, basis, k).outliers)
    return found


def voronoi_solve_sampled(X, r: int, k: int, samples: int, rng: SeededRng) -> SolveResult:
    """Algorithm-1 style solve with sampled cell discovery.

    Refits PCA on the complement of every discovered candidate set and keeps
    the best.  The search space is a subset of the brute-force one, so the
    loss never beats the brute-force optimum.
    """
    x = as_matrix(X)
    candidates = sorted(enumerate_candidate_sets_sampled(x, r, k, samples, rng))
    best_key, best_fit = _best_refit(x, r, candidates)
    return SolveResult(
        subspace=best_fit.subspace,
        outliers=best_key[1],
        loss=best_key[0],
        method="voronoi-sampled",
        seed=rng.seed,
        samples_used=samples,
    )


def _cell_colors(count: int) -> list[str]:
    colors = []
    for i in range(count):
        rgb = colorsys.hls_to_rgb((i * 0.61803398875) % 1.0, 0.45, 0.85)
        colors.append("#" + "".join(f"{int(255 * v):02x}" for v in rgb))
    return colors


def arc_diagram_svg(X, k: int, path: str | None = None, size: int = 480) -> str:
    """Render the planar arc diagram as an SVG string (optionally written to ``path``).

    Each cell is drawn as two antipodal arcs on a circle (a line angle theta
    occupies circle positions theta and theta + pi), colored by candidate
    set; the data points are drawn inside, scaled to fit.
    """
    x = as_matrix(X)
    cells = build_arc_diagram_2d(x, k)
    sets = sorted({c.farthest_k for c in cells})
    color_of = dict(zip(sets, _cell_colors(len(sets))))
    cx = cy = size / 2.0
    ring = 0.40 * size
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]

    def arc_path(t0: float, t1: float) -> str:
        x0, y0 = cx + ring * math.cos(t0), cy - ring * math.sin(t0)
        x1, y1 = cx + ring * math.cos(t1), cy - ring * math.sin(t1)
        large = 1 if (t1 - t0) > math.pi else 0
        return f"M {x0:.3f} {y0:.3f} A {ring:.3f} {ring:.3f} 0 {large} 0 {x1:.3f} {y1:.3f}"

    for cell in cells:
        color = color_of[cell.farthest_k]
        label = ",".join(str(i) for i in cell.farthest_k) or "none"
        for offset in (0.0, math.pi):
            parts.append(
                f'<path d="{arc_path(cell.theta_lo + offset, cell.theta_hi + offset)}" '
                f'stroke="{color}" stroke-width="{0.03 * size:.1f}" fill="none">'
                f"<title>farthest: {label}</title></path>"
            )
    scale = 0.30 * size / max(1e-300, float(np.max(np.abs(x))) * math.sqrt(2.0))
    for i, (px, py) in enumerate(x):
        parts.append(
            f'<circle cx="{cx + scale * px:.3f}" cy="{cy - scale * py:.3f}" r="{0.008 * size:.2f}" '
            f'fill="black"><title>row {i}</title></circle>'
        )
    parts.append("</svg>")
    svg = "\n".join(parts)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(svg)
    return svg

"""Dense linear-algebra substrate shared by every solver.

Points are rows of an (n, d) array.  Subspaces pass through the origin and
are stored as orthonormal d x r bases.  All functions here are pure and the
values they return are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# Max absolute deviation of basis^T basis from the identity.
ORTHONORMAL_TOL = 1e-10

# Relative tolerance used when comparing losses between solvers.
LOSS_RTOL = 1e-9


def as_matrix(data) -> np.ndarray:
    """Validate and return a point set as an (n, d) float array.

    Requires at least one row and one column and all-finite entries.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-D array of row points, got ndim={x.ndim}")
    n, d = x.shape
    if n < 1 or d < 1:
        raise ValueError(f"point array must be at least 1x1, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point array contains non-finite values")
    return x


def as_outlier_set(indices, n: int) -> tuple[int, ...]:
    """Normalize row indices to a strictly increasing tuple, validating range."""
    idx = [int(i) for i in indices]
    for i in idx:
        if not 0 <= i < n:
            raise IndexError(f"outlier index {i} out of range for n={n}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"duplicate outlier indices in {idx}")
    return tuple(sorted(idx))


def canonicalize_signs(basis: np.ndarray) -> np.ndarray:
    """Flip basis columns so the first nonzero entry of each is nonnegative.

    Fixes the sign ambiguity of QR/SVD factors so equal seeds give
    bit-comparable bases.
    """
    q = np.array(basis, dtype=float)
    for j in range(q.shape[1]):
        col = q[:, j]
        nz = np.nonzero(col)[0]
        if nz.size and col[nz[0]] < 0:
            q[:, j] = -col
    return q


@dataclass(frozen=True)
class Subspace:
    """A point of Gr(r, d): an r-dimensional linear subspace of R^d.

    Stored as a d x r matrix with orthonormal columns.  The basis array is
    frozen after construction.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError(f"basis must be a d x r matrix, got ndim={b.ndim}")
        d, r = b.shape
        if not 1 <= r < d:
            raise ValueError(f"rank must satisfy 1 <= r < d, got r={r}, d={d}")
        gram = b.T @ b
        dev = np.max(np.abs(gram - np.eye(r)))
        if dev > ORTHONORMAL_TOL:
            raise ValueError(f"basis columns not orthonormal (max deviation {dev:.3e})")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim_ambient(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def project(self, points: np.ndarray) -> np.ndarray:
        """Orthogonal projection of row points (or a single vector) onto the subspace."""
        return (points @ self.basis) @ self.basis.T


def _row_squared_distances(x: np.ndarray, basis: np.ndarray) -> np.ndarray:
    # Hot path shared by the samplers; callers have already validated shapes.
    resid = x - (x @ basis) @ basis.T
    return np.einsum("ij,ij->i", resid, resid)


def squared_distances(X, subspace: Subspace) -> np.ndarray:
    """Squared Euclidean distance of every row of X to the subspace."""
    x = as_matrix(X)
    if x.shape[1] != subspace.dim_ambient:
        raise ValueError(
            f"ambient dimension mismatch: points have d={x.shape[1]}, "
            f"subspace has d={subspace.dim_ambient}"
        )
    return _row_squared_distances(x, subspace.basis)


def dist_point_subspace(x, subspace: Subspace) -> float:
    """Distance from a single point to a subspace: ||x - P_V(x)||."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got ndim={v.ndim}")
    if v.shape[0] != subspace.dim_ambient:
        raise ValueError(
            f"dimension mismatch: len(x)={v.shape[0]}, subspace d={subspace.dim_ambient}"
        )
    return float(np.linalg.norm(v - subspace.project(v)))


@dataclass(frozen=True)
class PcaSolution:
    """Best rank-r subspace for a point set and the squared residual it leaves."""

    subspace: Subspace
    loss: float


def _pca_on_rows(x: np.ndarray, r: int) -> PcaSolution:
    n, d = x.shape
    # full_matrices only when fewer rows than requested rank, so the right
    # factor still provides r orthonormal directions.
    _, s, vt = np.linalg.svd(x, full_matrices=r > min(n, d))
    basis = canonicalize_signs(vt[:r].T)
    tail = s[r:]
    return PcaSolution(Subspace(basis), float(tail @ tail))


def pca_fit(X, r: int) -> PcaSolution:
    """Rank-r PCA of the raw matrix (no mean centering).

    Returns the span of the top-r right singular vectors and
    loss = sum of the squared singular values beyond the r-th.  Centering,
    when wanted, is an explicit preprocessing step (see ``center_rows``).
    """
    x = as_matrix(X)
    if not 1 <= r < x.shape[1]:
        raise ValueError(f"rank must satisfy 1 <= r < d, got r={r}, d={x.shape[1]}")
    return _pca_on_rows(x, r)


class TrimmedLoss(NamedTuple):
    loss: float
    outliers: tuple[int, ...]


def _trimmed_on_rows(x: np.ndarray, basis: np.ndarray, k: int) -> TrimmedLoss:
    d2 = _row_squared_distances(x, basis)
    if k == 0:
        return TrimmedLoss(float(np.sum(d2)), ())
    n = x.shape[0]
    # Primary key: distance descending.  Secondary: row index ascending.
    order = np.lexsort((np.arange(n), -d2))
    out = np.sort(order[:k])
    keep = np.ones(n, dtype=bool)
    keep[out] = False
    return TrimmedLoss(float(np.sum(d2[keep])), tuple(int(i) for i in out))


def trimmed_loss(X, subspace: Subspace, k: int) -> TrimmedLoss:
    """Squared-residual sum after discarding the k rows farthest from the subspace.

    Ties in distance are broken toward the lower row index being discarded,
    so the result is deterministic.
    """
    x = as_matrix(X)
    n = x.shape[0]
    if not 0 <= k < n:
        raise ValueError(f"k must satisfy 0 <= k < n={n}, got {k}")
    if x.shape[1] != subspace.dim_ambient:
        raise ValueError(
            f"ambient dimension mismatch: points have d={x.shape[1]}, "
            f"subspace has d={subspace.dim_ambient}"
        )
    return _trimmed_on_rows(x, subspace.basis, k)


def objective_eq2(X, outliers, subspace: Subspace) -> float:
    """Row-sparse robust PCA objective: squared residual of the non-outlier rows.

    Outlier rows contribute nothing.  Equals ``trimmed_loss(X, subspace, k).loss``
    exactly when ``outliers`` is the k-farthest set.
    """
    x = as_matrix(X)
    n = x.shape[0]
    idx = as_outlier_set(outliers, n)
    keep = np.ones(n, dtype=bool)
    if idx:
        keep[list(idx)] = False
    d2 = squared_distances(x, subspace)
    return float(np.sum(d2[keep]))


def center_rows(X) -> np.ndarray:
    """Subtract the column means.  Explicit preprocessing; solvers never center."""
    x = as_matrix(X)
    return x - x.mean(axis=0)

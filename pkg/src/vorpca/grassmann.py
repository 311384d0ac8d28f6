"""Grassmannian manifold kit.

Haar-uniform sampling of rank-r subspaces, principal-angle distances, the
closed-form manifold volume, the ball-measure lower bound, and the sample
count estimate used by the randomized solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .core import Subspace, canonicalize_signs

_LOG_PI = math.log(math.pi)
_LOG_FLOAT_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class SeededRng:
    """Reproducible random source.

    Identical (seed, stream) pairs reproduce the identical draw sequence on
    every platform.  Independent work items should use disjoint substreams
    (``child``), which makes sampling order-independent and safe to
    parallelize.
    """

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if int(self.stream) < 0:
            raise ValueError(f"stream must be nonnegative, got {self.stream}")

    def generator(self) -> np.random.Generator:
        """Fresh generator for this (seed, stream); same pair, same sequence."""
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=(self.stream,)))

    def child(self, index: int) -> np.random.Generator:
        """Generator for the index-th substream of this stream."""
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=(self.stream, index))
        )


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng).__name__}")


def _check_rank(r: int, d: int) -> None:
    if not 1 <= r < d:
        raise ValueError(f"rank must satisfy 1 <= r < d, got r={r}, d={d}")


def _gaussian_basis(gen: np.random.Generator, r: int, d: int) -> np.ndarray:
    # Column span of a Gaussian d x r matrix is exactly Haar on Gr(r, d).
    if r == 1:
        v = gen.standard_normal((d, 1))
        q = v / np.linalg.norm(v)
    else:
        q, _ = np.linalg.qr(gen.standard_normal((d, r)))
    return canonicalize_signs(q)


def sample_uniform(r: int, d: int, rng) -> Subspace:
    """Draw a subspace from the normalized Haar measure on Gr(r, d).

    Realized by orthonormalizing a d x r matrix of independent standard
    normal entries.  ``rng`` may be a SeededRng (pure: the same handle
    always yields the same subspace) or a numpy Generator (stateful).
    """
    _check_rank(r, d)
    return Subspace(_gaussian_basis(_as_generator(rng), r, d))


def _basis_stream(r: int, d: int, rng: SeededRng, count: int) -> Iterator[np.ndarray]:
    # Raw bases for hot loops; sample i depends only on (seed, stream, i).
    if not isinstance(rng, SeededRng):
        raise TypeError("sampling requires a SeededRng")
    for i in range(count):
        yield _gaussian_basis(rng.child(i), r, d)


def sample_stream(r: int, d: int, rng: SeededRng, count: int) -> Iterator[Subspace]:
    """Yield ``count`` Haar draws, one per substream of ``rng``.

    Sample i depends only on (rng.seed, rng.stream, i), so prefixes are
    nested across different counts and evaluation may be parallelized.
    """
    _check_rank(r, d)
    for basis in _basis_stream(r, d, rng, count):
        yield Subspace(basis)


def principal_angles(u: Subspace, v: Subspace) -> np.ndarray:
    """Principal angles between two equal-rank subspaces, nondecreasing, in [0, pi/2].

    Computed as arccos of the singular values of U^T V, clamped into [0, 1]
    to guard against floating-point drift.
    """
    if u.dim_ambient != v.dim_ambient:
        raise ValueError(
            f"ambient dimension mismatch: {u.dim_ambient} vs {v.dim_ambient}"
        )
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} vs {v.rank}")
    sigma = np.linalg.svd(u.basis.T @ v.basis, compute_uv=False)
    return np.arccos(np.clip(sigma, 0.0, 1.0))  # descending sigma -> ascending angles


def _basis_distance(b1: np.ndarray, b2: np.ndarray) -> float:
    if b1.shape[1] == 1:
        c = min(1.0, abs(float(b1[:, 0] @ b2[:, 0])))
        return math.sqrt(max(0.0, 1.0 - c * c))
    sigma = np.linalg.svd(b1.T @ b2, compute_uv=False)
    smallest = min(1.0, float(sigma[-1]))
    return math.sin(math.acos(smallest))


def grassmann_distance(u: Subspace, v: Subspace) -> float:
    """sin of the largest principal angle; symmetric, in [0, 1], 0 iff U = V."""
    if u.dim_ambient != v.dim_ambient:
        raise ValueError(
            f"ambient dimension mismatch: {u.dim_ambient} vs {v.dim_ambient}"
        )
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} vs {v.rank}")
    return _basis_distance(u.basis, v.basis)


def grassmannian_dimension(r: int, d: int) -> int:
    """Manifold dimension of Gr(r, d): r * (d - r)."""
    _check_rank(r, d)
    return r * (d - r)


def grassmannian_volume(r: int, d: int) -> float:
    """Closed-form volume of Gr(r, d) as a product of pi powers and Gamma factors.

    Evaluated in log space for range; raises OverflowError when the value
    does not fit a double.  Note the formula is not symmetric under
    r <-> d - r (e.g. Gr(1,3) -> pi/2 but Gr(2,3) -> pi); it is evaluated
    as printed.
    """
    _check_rank(r, d)

    def log_term(e: int) -> float:
        # log of pi^{e/2} / Gamma(e/2 + 1)
        return 0.5 * e * _LOG_PI - math.lgamma(0.5 * e + 1.0)

    log_vol = sum(log_term(d - i) for i in range(1, r + 1))
    log_vol -= sum(log_term(r - i) for i in range(1, r + 1))
    log_vol -= sum(log_term(d - r - i) for i in range(1, d - r + 1))
    if log_vol > _LOG_FLOAT_MAX:
        raise OverflowError(f"volume of Gr({r},{d}) overflows a double")
    return math.exp(log_vol)


def ball_measure_lower_bound(alpha: float, r: int, d: int) -> float:
    """Lower bound on the Haar measure of a radius-alpha ball in Gr(r, d).

    Returns alpha^(r(d-r)) * (2e / (r(d-r)))^(r(d-r)/2), unclamped: the bound
    may exceed 1 (and exceeds the true measure for small alpha on Gr(1,2)).
    Clamping happens where it is consumed, in ``required_samples``.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    dim = grassmannian_dimension(r, d)
    return alpha**dim * (2.0 * math.e / dim) ** (dim / 2.0)


def required_samples(alpha: float, eps: float, r: int, d: int) -> int:
    """Number of uniform draws targeting success level ``eps`` at gap ``alpha``.

    delta = min(1, ball bound); T = max(1, ceil(eps / delta)).
    """
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    delta = min(1.0, ball_measure_lower_bound(alpha, r, d))
    if delta <= 0.0:
        raise OverflowError(
            f"ball measure bound underflows for alpha={alpha}, Gr({r},{d}); "
            "sample count does not fit an integer"
        )
    return max(1, math.ceil(eps / delta))


class BallMeasureEstimate(NamedTuple):
    estimate: float
    stderr: float


def mc_ball_measure(v: Subspace, alpha: float, samples: int, rng: SeededRng) -> BallMeasureEstimate:
    """Monte-Carlo estimate of mu{ U : dist(U, V) <= alpha } with its standard error."""
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    hits = 0
    for basis in _basis_stream(v.rank, v.dim_ambient, rng, samples):
        if _basis_distance(basis, v.basis) <= alpha:
            hits += 1
    p = hits / samples
    return BallMeasureEstimate(p, math.sqrt(p * (1.0 - p) / samples))


def geodesic_neighbor(v: Subspace, distance: float, gen: np.random.Generator) -> Subspace:
    """Subspace at a prescribed Grassmannian distance from ``v``.

    Moves along a random geodesic direction, scaling the principal angles so
    the largest satisfies sin(theta_max) = distance.
    """
    if not 0.0 <= distance <= 1.0:
        raise ValueError(f"distance must lie in [0, 1], got {distance}")
    d, r = v.dim_ambient, v.rank
    if distance == 0.0:
        return v
    q_full, _ = np.linalg.qr(np.hstack([v.basis, np.eye(d)]), mode="reduced")
    comp = q_full[:, r:d]  # orthonormal complement of the basis
    g = gen.standard_normal((d - r, r))
    while not np.any(g):  # zero direction has probability zero but would divide by zero
        g = gen.standard_normal((d - r, r))
    w, sig, vt = np.linalg.svd(g, full_matrices=False)
    thetas = math.asin(distance) * sig / sig[0]
    vr = vt.T  # r x m
    cos_part = vr @ np.diag(np.cos(thetas)) @ vr.T + (np.eye(r) - vr @ vr.T)
    sin_part = w @ np.diag(np.sin(thetas)) @ vr.T
    return Subspace(v.basis @ cos_part + comp @ sin_part)

"""Gaussian kernels, Gram matrices, and bandwidth selection.

The kernel convention throughout is

    k(u, v) = exp(-||u - v||^2 / bandwidth^2)

i.e. the squared Euclidean distance divided by the squared bandwidth, with no
extra factor of 2.  The default bandwidth is 1.0 and is meant to be applied to
standardized variables; the median pairwise distance rule is available as an
explicit opt-in.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DegenerateDataError

GAUSSIAN = "gaussian"

#: Bandwidth rules understood by :class:`KernelSpec`.
FIXED = "fixed"
MEDIAN = "median"

#: Accumulations over matrices at or beyond this order switch to extended precision.
_LONGDOUBLE_N = 1000


@dataclass(frozen=True)
class KernelSpec:
    """A Gaussian kernel with a fixed bandwidth or the median-distance rule.

    With ``rule="fixed"`` the bandwidth is used as given.  With
    ``rule="median"`` the bandwidth is resolved from the data at hand (the
    median of the pairwise distances) before any Gram matrix is formed; the
    ``bandwidth`` field is ignored until then.
    """

    bandwidth: float = 1.0
    rule: str = FIXED
    family: str = GAUSSIAN

    def __post_init__(self) -> None:
        if self.family != GAUSSIAN:
            raise ValueError(f"unknown kernel family {self.family!r}; only {GAUSSIAN!r} is supported")
        if self.rule not in (FIXED, MEDIAN):
            raise ValueError(f"unknown bandwidth rule {self.rule!r}; expected {FIXED!r} or {MEDIAN!r}")
        if self.rule == FIXED:
            bw = float(self.bandwidth)
            if not np.isfinite(bw) or bw <= 0.0:
                raise ValueError(f"bandwidth must be a positive finite number, got {self.bandwidth!r}")


def gaussian_kernel(u, v, bandwidth: float) -> float:
    """Evaluate exp(-||u - v||^2 / bandwidth^2) for a single pair of points."""
    bw = float(bandwidth)
    if not np.isfinite(bw) or bw <= 0.0:
        raise ValueError(f"bandwidth must be a positive finite number, got {bandwidth!r}")
    a = np.atleast_1d(np.asarray(u, dtype=float))
    b = np.atleast_1d(np.asarray(v, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"point shapes differ: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.exp(-float(d @ d) / (bw * bw)))


def as_points(points) -> np.ndarray:
    """Coerce input to an (n, p) float array; 1-D input becomes a column."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"expected a nonempty 1-D or 2-D point array, got shape {np.shape(points)}")
    if not np.isfinite(pts).all():
        raise ValueError("points contain non-finite values")
    return pts


def median_heuristic(points) -> float:
    """Median of the pairwise Euclidean distances over distinct unordered pairs.

    Tied points contribute their zero distances to the median like any other
    pair.  A sample whose pairwise distances are all zero (or whose median
    distance is zero) cannot yield a usable bandwidth and raises
    :class:`DegenerateDataError`.
    """
    pts = as_points(points)
    if pts.shape[0] < 2:
        raise DegenerateDataError("median heuristic needs at least two points")
    dists = pdist(pts, metric="euclidean")
    med = float(np.median(dists))
    if med <= 0.0:
        raise DegenerateDataError(
            "median pairwise distance is zero (all or most points identical); "
            "cannot derive a bandwidth"
        )
    return med


def resolve_bandwidth(spec: KernelSpec, points) -> KernelSpec:
    """Return a fixed-bandwidth copy of ``spec``, resolving the median rule on ``points``."""
    if spec.rule == FIXED:
        return spec
    return replace(spec, bandwidth=median_heuristic(points), rule=FIXED)


def gram_matrix(points, spec: KernelSpec) -> np.ndarray:
    """The n x n Gram matrix of ``points`` under ``spec``.

    Built from condensed pairwise distances, so the result is exactly
    symmetric with an exact unit diagonal.
    """
    pts = as_points(points)
    resolved = resolve_bandwidth(spec, pts)
    sq = squareform(pdist(pts, metric="sqeuclidean"))
    return np.exp(-sq / (resolved.bandwidth * resolved.bandwidth))


def center_gram(gram: np.ndarray) -> np.ndarray:
    """Doubly center a Gram matrix (subtract row and column means, add back the grand mean).

    Equivalent to H K H with H = I - (1/n) 11', without materializing H; row
    and column sums of the result vanish up to rounding.
    """
    K = np.asarray(gram, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {K.shape}")
    extended = K.shape[0] >= _LONGDOUBLE_N
    dt = np.longdouble if extended else np.float64
    row = K.mean(axis=1, dtype=dt)
    col = K.mean(axis=0, dtype=dt)
    grand = row.mean(dtype=dt)
    out = K - row[:, None] - col[None, :] + grand
    return out.astype(np.float64) if extended else out

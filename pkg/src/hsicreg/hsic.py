"""A biased (V-statistic) estimate of the Hilbert-Schmidt independence criterion.

Two algebraically independent routes to the same estimate are kept side by
side on purpose:

* :func:`hsic_vstat` — the production path, trace of the product of doubly
  centered Gram matrices, evaluated through row/column/grand means in O(n^2);
* :func:`hsic_sums` — the explicit three-sum form (pair, full-average, and
  row-linked averages), kept as a cross-check oracle.

Both are exercised against each other and against literal nested-loop sums in
the test suite; neither may be redefined in terms of the other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import _LONGDOUBLE_N, KernelSpec, as_points, center_gram, gram_matrix, resolve_bandwidth
from .linreg import Dataset, DesignSpec, FittedModel, build_design, fit_ols, standardize_dataset


@dataclass(frozen=True)
class HsicValue:
    """The statistic for one sample of size ``n``."""

    value: float
    n: int

    @property
    def scaled(self) -> float:
        """``n`` times the statistic — the scale on which the null calibration works."""
        return self.n * self.value


def _check_gram_pair(K, L) -> tuple[np.ndarray, np.ndarray, int]:
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"first Gram matrix is not square: shape {K.shape}")
    if L.shape != K.shape:
        raise ValueError(f"Gram shapes differ: {K.shape} vs {L.shape}")
    return K, L, K.shape[0]


def hsic_vstat(K, L) -> HsicValue:
    """The V-statistic from two Gram matrices, via double centering.

    Computes n^-2 sum_ij (HKH)_ij (HLH)_ij without materializing the
    centering matrix H.
    """
    K, L, n = _check_gram_pair(K, L)
    prod = center_gram(K) * center_gram(L)
    if n >= _LONGDOUBLE_N:
        total = prod.sum(dtype=np.longdouble)
    else:
        total = prod.sum()
    return HsicValue(float(total / n**2), n)


def hsic_sums(K, L) -> HsicValue:
    """The same estimate through the literal three-sum form.

    n^-2 sum_ij K_ij L_ij + n^-4 (sum_ij K_ij)(sum_qr L_qr)
    - 2 n^-3 sum_i (sum_j K_ij)(sum_q L_iq), with the double and triple sums
    folded through row sums.
    """
    K, L, n = _check_gram_pair(K, L)
    dt = np.longdouble if n >= _LONGDOUBLE_N else np.float64
    pair = (K * L).sum(dtype=dt)
    total_k = K.sum(dtype=dt)
    total_l = L.sum(dtype=dt)
    rows_k = K.sum(axis=1, dtype=dt)
    rows_l = L.sum(axis=1, dtype=dt)
    linked = (rows_k * rows_l).sum(dtype=dt)
    value = pair / n**2 + total_k * total_l / n**4 - 2.0 * linked / n**3
    return HsicValue(float(value), n)


def hsic_pairs_stat(u, v, kernel_u: KernelSpec, kernel_v: KernelSpec) -> HsicValue:
    """The statistic for raw paired samples (u_i, v_i)."""
    pu = as_points(u)
    pv = as_points(v)
    if pu.shape[0] != pv.shape[0]:
        raise ValueError(f"sample sizes differ: {pu.shape[0]} vs {pv.shape[0]}")
    K = gram_matrix(pu, resolve_bandwidth(kernel_u, pu))
    L = gram_matrix(pv, resolve_bandwidth(kernel_v, pv))
    return hsic_vstat(K, L)


@dataclass(frozen=True)
class PreparedStat:
    """Everything the observed statistic and its null calibration share."""

    data: Dataset
    design: np.ndarray
    model: FittedModel
    kernel_x: KernelSpec
    kernel_e: KernelSpec
    gram_x: np.ndarray
    gram_e: np.ndarray
    observed: HsicValue
    standardized: bool


def prepare_stat(
    data: Dataset,
    design: DesignSpec,
    kernel_x: KernelSpec,
    kernel_e: KernelSpec,
    standardize: bool = True,
) -> PreparedStat:
    """Standardize (optionally), fit, resolve bandwidths, and compute the statistic once."""
    if standardize:
        data = standardize_dataset(data)[0]
    G = build_design(data, design)
    model = fit_ols(G, data.response)
    kx = resolve_bandwidth(kernel_x, data.predictors)
    ke = resolve_bandwidth(kernel_e, model.residuals)
    K = gram_matrix(data.predictors, kx)
    L = gram_matrix(model.residuals, ke)
    return PreparedStat(
        data=data,
        design=G,
        model=model,
        kernel_x=kx,
        kernel_e=ke,
        gram_x=K,
        gram_e=L,
        observed=hsic_vstat(K, L),
        standardized=standardize,
    )


def residual_hsic_stat(
    data: Dataset,
    design: DesignSpec,
    kernel_x: KernelSpec,
    kernel_e: KernelSpec,
    standardize: bool = True,
) -> tuple[HsicValue, FittedModel]:
    """The statistic between predictor rows and least-squares residuals.

    Variables are standardized first by default (the bandwidth defaults are
    calibrated for that scale); the kernel over predictors sees the full raw
    predictor rows, not the design expansion.
    """
    prep = prepare_stat(data, design, kernel_x, kernel_e, standardize)
    return prep.observed, prep.model

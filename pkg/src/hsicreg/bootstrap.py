"""Null calibration for the residual-independence statistic.

The observed statistic is compared against draws produced under the null by a
residual resampling scheme with *product-measure* structure: predictor rows
and centered residuals are resampled through two independent index streams
(never as pairs), responses are regenerated from the original fitted
coefficients, and the model is refit on every replicate before its statistic
is computed.  Pairwise permutation of the residuals is deliberately not used
for calibration here — residuals are neither independent nor exchangeable
given the predictors — but a permutation p-value for raw i.i.d. pairs is
provided as a baseline for the no-regression setting.

Kernels and bandwidths are frozen from the original fit; replicates are never
re-standardized and never re-resolve a median bandwidth.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np
from scipy.stats import ks_2samp

from ._rng import substream
from .errors import BootstrapAbortError, SingularDesignError
from .hsic import hsic_vstat, prepare_stat
from .kernels import KernelSpec, as_points, gram_matrix, resolve_bandwidth
from .linreg import Dataset, DesignSpec, evaluate_design, fit_ols, standardize_dataset


@dataclass(frozen=True)
class BootstrapConfig:
    """How many null draws to generate, from which seed, on how many workers."""

    replicates: int = 1000
    seed: int = 0
    workers: int = 1  # 0 = one worker per CPU

    def __post_init__(self) -> None:
        if int(self.replicates) < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if int(self.workers) < 0:
            raise ValueError(f"workers must be >= 0, got {self.workers}")
        if int(self.seed) < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")


@dataclass(frozen=True)
class TestResult:
    """Outcome of the calibrated independence / lack-of-fit test."""

    statistic: float  # n times the observed statistic
    p_value: float
    alpha: float
    reject: bool
    null_draws: np.ndarray
    beta_hat: np.ndarray
    n: int
    replicates: int
    seed: int
    kernel_x: KernelSpec
    kernel_e: KernelSpec
    standardized: bool
    design_labels: tuple[str, ...]


def replicate_indices(seed: int, replicate: int, n: int, redraw: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """The two independent resampling index vectors for one replicate.

    Both vectors come from the stream keyed by ``(seed, replicate, redraw)``:
    first the predictor-row indices, then — independently, never paired — the
    residual indices.
    """
    rng = substream(seed, replicate, redraw)
    idx_x = rng.integers(0, n, size=n)
    idx_e = rng.integers(0, n, size=n)
    return idx_x, idx_e


@dataclass(frozen=True)
class _NullSnapshot:
    """Frozen state a null replicate needs: original design rows, Gram, fit, kernel."""

    design: np.ndarray
    gram_x: np.ndarray
    beta_hat: np.ndarray
    centered_residuals: np.ndarray
    kernel_e: KernelSpec
    seed: int


def _null_draw(snap: _NullSnapshot, replicate: int) -> float:
    n = snap.centered_residuals.shape[0]
    for redraw in (0, 1):
        idx_x, idx_e = replicate_indices(snap.seed, replicate, n, redraw)
        design = snap.design[idx_x]
        response = design @ snap.beta_hat + snap.centered_residuals[idx_e]
        try:
            refit = fit_ols(design, response)
        except SingularDesignError:
            continue
        gram_x = snap.gram_x[np.ix_(idx_x, idx_x)]
        gram_e = gram_matrix(refit.residuals, snap.kernel_e)
        return float(n * hsic_vstat(gram_x, gram_e).value)
    raise BootstrapAbortError(
        f"replicate {replicate}: singular refit on the draw and its one redraw; aborting"
    )


def _map_replicates(fn: Callable[[int], float], config: BootstrapConfig) -> np.ndarray:
    """Evaluate ``fn`` for replicates 0..B-1; values do not depend on worker count."""
    B = int(config.replicates)
    workers = int(config.workers) or os.cpu_count() or 1
    if workers == 1:
        values = [fn(b) for b in range(B)]
    else:
        chunk = max(1, -(-B // (workers * 4)))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(fn, range(B), chunksize=chunk))
    return np.asarray(values, dtype=float)


def bootstrap_null_draws(
    data: Dataset,
    design: DesignSpec,
    kernel_x: KernelSpec,
    kernel_e: KernelSpec,
    config: BootstrapConfig,
    standardize: bool = True,
) -> np.ndarray:
    """The length-B vector of scaled null statistics for the fitted model."""
    prep = prepare_stat(data, design, kernel_x, kernel_e, standardize)
    return _draws_for(prep, config)


def _draws_for(prep, config: BootstrapConfig) -> np.ndarray:
    snap = _NullSnapshot(
        design=prep.design,
        gram_x=prep.gram_x,
        beta_hat=prep.model.beta_hat,
        centered_residuals=prep.model.centered_residuals,
        kernel_e=prep.kernel_e,
        seed=config.seed,
    )
    return _map_replicates(partial(_null_draw, snap), config)


def pvalue_from_draws(draws: np.ndarray, statistic: float) -> float:
    """(1 + #{draws >= statistic}) / (B + 1)."""
    draws = np.asarray(draws, dtype=float)
    return (1 + int(np.count_nonzero(draws >= statistic))) / (draws.size + 1)


def run_test(
    data: Dataset,
    design: DesignSpec,
    kernel_x: KernelSpec,
    kernel_e: KernelSpec,
    config: BootstrapConfig,
    alpha: float = 0.05,
    standardize: bool = True,
) -> TestResult:
    """Observed scaled statistic, its null draws, and the calibrated decision."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    prep = prepare_stat(data, design, kernel_x, kernel_e, standardize)
    draws = _draws_for(prep, config)
    statistic = prep.observed.scaled
    p_value = pvalue_from_draws(draws, statistic)
    return TestResult(
        statistic=float(statistic),
        p_value=float(p_value),
        alpha=float(alpha),
        reject=bool(p_value <= alpha),
        null_draws=draws,
        beta_hat=prep.model.beta_hat,
        n=prep.observed.n,
        replicates=int(config.replicates),
        seed=int(config.seed),
        kernel_x=prep.kernel_x,
        kernel_e=prep.kernel_e,
        standardized=bool(standardize),
        design_labels=design.labels,
    )


@dataclass(frozen=True)
class _PermSnapshot:
    gram_u: np.ndarray
    gram_v: np.ndarray
    observed: float
    seed: int


def _perm_exceeds(snap: _PermSnapshot, replicate: int) -> bool:
    n = snap.gram_u.shape[0]
    perm = substream(snap.seed, replicate).permutation(n)
    permuted = snap.gram_v[np.ix_(perm, perm)]
    return bool(hsic_vstat(snap.gram_u, permuted).value >= snap.observed)


def permutation_pvalue(u, v, kernel_u: KernelSpec, kernel_v: KernelSpec, config: BootstrapConfig) -> float:
    """Permutation p-value for raw i.i.d. pairs (u_i, v_i).

    Valid when the pairs themselves are i.i.d. (no fitted model in the loop);
    not a substitute for the residual bootstrap.
    """
    pu = as_points(u)
    pv = as_points(v)
    if pu.shape[0] != pv.shape[0]:
        raise ValueError(f"sample sizes differ: {pu.shape[0]} vs {pv.shape[0]}")
    gram_u = gram_matrix(pu, resolve_bandwidth(kernel_u, pu))
    gram_v = gram_matrix(pv, resolve_bandwidth(kernel_v, pv))
    observed = hsic_vstat(gram_u, gram_v).value
    snap = _PermSnapshot(gram_u, gram_v, observed, config.seed)
    exceed = _map_replicates(partial(_perm_exceeds, snap), config)
    return (1 + int(exceed.sum())) / (int(config.replicates) + 1)


#: Below this many replications per arm the contrast's KS comparison is flagged.
_CONTRAST_MIN_REPS = 25


@dataclass(frozen=True)
class ContrastResult:
    """Null-scale statistics computed from residuals vs. from the true errors."""

    residual_stats: np.ndarray
    error_stats: np.ndarray
    ks_distance: float
    ks_pvalue: float
    n: int
    reps: int
    undersampled: bool


def null_distribution_contrast(
    sampler: Callable[[int, np.random.Generator], tuple[Dataset, np.ndarray]],
    design: DesignSpec,
    kernel_x: KernelSpec,
    kernel_e: KernelSpec,
    n: int,
    reps: int,
    config: BootstrapConfig,
    standardize: bool = True,
    both_arms_use_errors: bool = False,
) -> ContrastResult:
    """Compare the scaled statistic computed from residuals with the one from true errors.

    ``sampler(n, rng)`` must return a dataset *and* the true error vector it
    used.  Per replication both arms share the same draw and the same
    predictor Gram matrix; when standardizing, the error arm is scaled by the
    response's sample sd so both arms live in the same units.  With
    ``both_arms_use_errors`` the residual arm is replaced by the error arm —
    the distributions then coincide by construction (a self-check).
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    resid_stats = np.empty(reps)
    error_stats = np.empty(reps)
    for r in range(reps):
        rng = substream(config.seed, r)
        data, errors = sampler(n, rng)
        errors = np.asarray(errors, dtype=float)
        if data.n != n:
            raise ValueError(f"sampler returned {data.n} rows, expected {n}")
        if errors.shape != (data.n,):
            raise ValueError(f"sampler returned errors of shape {errors.shape} for n={data.n}")
        if standardize:
            data_s, info = standardize_dataset(data)
            errors_s = errors / info.response_sd
        else:
            data_s, errors_s = data, errors
        model = fit_ols(evaluate_design(data_s.predictors, design), data_s.response)
        kx = resolve_bandwidth(kernel_x, data_s.predictors)
        ke = resolve_bandwidth(kernel_e, model.residuals)
        gram_x = gram_matrix(data_s.predictors, kx)
        err_arm = n * hsic_vstat(gram_x, gram_matrix(errors_s, ke)).value
        if both_arms_use_errors:
            resid_arm = err_arm
        else:
            resid_arm = n * hsic_vstat(gram_x, gram_matrix(model.residuals, ke)).value
        resid_stats[r] = resid_arm
        error_stats[r] = err_arm
    ks = ks_2samp(resid_stats, error_stats, method="asymp")
    undersampled = reps < _CONTRAST_MIN_REPS
    if undersampled:
        warnings.warn(
            f"contrast ran with only {reps} replications per arm; "
            "the KS comparison is unreliable below "
            f"{_CONTRAST_MIN_REPS}",
            stacklevel=2,
        )
    return ContrastResult(
        residual_stats=resid_stats,
        error_stats=error_stats,
        ks_distance=float(ks.statistic),
        ks_pvalue=float(ks.pvalue),
        n=int(n),
        reps=int(reps),
        undersampled=undersampled,
    )

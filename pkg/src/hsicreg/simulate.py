"""Data generators and the Monte Carlo size/power harness.

Three built-in generators:

* ``model1`` — response ``2 + 5*x1 - x2 + a*x1*x2`` plus noise, predictors
  i.i.d. uniform on (0,1) in ``d0`` (default 4) dimensions; ``a`` scales an
  interaction the working linear fit omits.
* ``model2`` — response ``x1 + a*x2^2 + 2*x4`` plus noise; (x1, x2, x3) are
  equicorrelated standard normals (correlation 0.5, drawn through the explicit
  3x3 Cholesky factor) and x4 is Bernoulli(0.4); ``a`` scales the omitted
  quadratic.
* ``linear1d`` — response ``1 + x1`` plus noise with a single standard-normal
  predictor; the well-specified setting used to contrast residual-based and
  error-based null statistics.

The noise is conditionally normal given x1 with variance
``noise_sd^2 * (10 + lam*|x1|)/10``, so ``lam = 0`` gives homoscedastic noise
with standard deviation ``noise_sd``, and ``lam`` strengthens a dependence of
scale on x1 that the mean model cannot absorb.

The working (possibly misspecified) fit used by the harness for model1/model2
is the main-effects design {1, x1, x2, x3, x4}; lack of fit exists exactly
when ``a != 0``, error/predictor dependence exactly when ``lam != 0``.

Harness bandwidth protocol: the study runs on standardized data with fixed
bandwidths 2*sqrt(d0) for the predictor kernel and sqrt(2) for the residual
kernel (see :func:`study_kernels`).  On standardized predictors the squared
pairwise distances concentrate near 2*d0, so a bandwidth of order sqrt(d0)
is the smallest choice that keeps the predictor Gram matrix away from the
near-diagonal regime in which the statistic stops discriminating; the factor
2 was calibrated so the harness reproduces the reference rejection rates at
n in the low hundreds.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

import numpy as np

from ._rng import derive_seed, substream
from .bootstrap import BootstrapConfig, run_test
from .errors import BootstrapAbortError
from .kernels import KernelSpec
from .linreg import Dataset, DesignSpec

MODEL1 = "model1"
MODEL2 = "model2"
LINEAR1D = "linear1d"
CUSTOM = "custom"

_DEFAULT_D0 = {MODEL1: 4, MODEL2: 4, LINEAR1D: 1}

#: Reference rejection percentages (alpha = 0.05, n = 100) for the
#: lack-of-fit sweep over ``a``, for rough comparison when reading harness
#: output.  "kernel" is the residual-dependence statistic implemented here;
#: the rest are benchmark competitors that are *not* implemented in this
#: package: "ks_marked" / "cvm_marked" are Kolmogorov-Smirnov- and
#: Cramer-von-Mises-type tests built on the predictor empirical process
#: marked by residuals, and "fourier" is an adaptive Fourier-basis test
#: scored with the true noise variance.
REFERENCE_REJECTION_PERCENT = {
    MODEL1: {
        "a": (0, 1, 2, 3, 4, 5, 7, 10),
        "kernel": (4, 6, 11, 20, 34, 57, 89, 100),
        "ks_marked": (5, 5, 7, 8, 11, 16, 28, 48),
        "cvm_marked": (3, 5, 7, 10, 14, 21, 37, 60),
        "fourier": (7, 7, 7, 10, 16, 22, 46, 89),
    },
    MODEL2: {
        "a": (0, 0.05, 0.10, 0.15, 0.20, 0.25, 0.30, 0.35, 0.40, 0.50, 0.60),
        "kernel": (6, 7, 10, 14, 22, 31, 43, 57, 69, 81, 92),
        "ks_marked": (5, 5, 6, 8, 13, 15, 25, 31, 41, 51, 69),
        "cvm_marked": (5, 5, 8, 10, 16, 20, 31, 38, 49, 55, 68),
        "fourier": (8, 10, 8, 9, 10, 16, 23, 31, 42, 64, 84),
    },
}


@dataclass(frozen=True)
class ModelSpec:
    """One simulation cell: which generator, at what size, with which knobs."""

    model: str
    n: int
    a: float = 0.0
    lam: float = 0.0
    noise_sd: float = 1.0
    d0: int | None = None

    def __post_init__(self) -> None:
        if self.model not in (MODEL1, MODEL2, LINEAR1D, CUSTOM):
            raise ValueError(f"unknown model {self.model!r}")
        if int(self.n) < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if not self.noise_sd > 0:
            raise ValueError(f"noise_sd must be > 0, got {self.noise_sd}")
        if self.d0 is not None:
            if self.model == MODEL2 and self.d0 != 4:
                raise ValueError("model2 is defined for exactly 4 predictors")
            if self.model == LINEAR1D and self.d0 != 1:
                raise ValueError("linear1d has exactly 1 predictor")
            if self.model == MODEL1 and self.d0 < 2:
                raise ValueError("model1 needs at least 2 predictors")

    @property
    def dim(self) -> int:
        """Effective predictor dimension."""
        if self.d0 is not None:
            return int(self.d0)
        try:
            return _DEFAULT_D0[self.model]
        except KeyError:
            raise ValueError("custom models must set d0 explicitly") from None


@dataclass(frozen=True)
class SimulatedData:
    """A drawn dataset together with the true noise vector behind it."""

    data: Dataset
    errors: np.ndarray


def _noise(spec: ModelSpec, x1: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    sd = spec.noise_sd * np.sqrt((10.0 + spec.lam * np.abs(x1)) / 10.0)
    return sd * rng.standard_normal(x1.shape[0])


def simulate_model1(spec: ModelSpec, rng: np.random.Generator) -> SimulatedData:
    """Uniform predictors; mean 2 + 5*x1 - x2 + a*x1*x2."""
    X = rng.random((int(spec.n), spec.dim))
    errors = _noise(spec, X[:, 0], rng)
    mean = 2.0 + 5.0 * X[:, 0] - X[:, 1] + spec.a * X[:, 0] * X[:, 1]
    return SimulatedData(Dataset(X, mean + errors), errors)


#: Explicit Cholesky factor of the 3x3 equicorrelation(0.5) matrix.
_EQUICORR_CHOL = np.linalg.cholesky(
    np.array([[1.0, 0.5, 0.5], [0.5, 1.0, 0.5], [0.5, 0.5, 1.0]])
)


def simulate_model2(spec: ModelSpec, rng: np.random.Generator) -> SimulatedData:
    """Correlated normal + Bernoulli predictors; mean x1 + a*x2^2 + 2*x4."""
    n = int(spec.n)
    X123 = rng.standard_normal((n, 3)) @ _EQUICORR_CHOL.T
    x4 = (rng.random(n) < 0.4).astype(float)
    X = np.column_stack([X123, x4])
    errors = _noise(spec, X[:, 0], rng)
    mean = X[:, 0] + spec.a * X[:, 1] ** 2 + 2.0 * x4
    return SimulatedData(Dataset(X, mean + errors), errors)


def simulate_linear1d(spec: ModelSpec, rng: np.random.Generator) -> SimulatedData:
    """Single standard-normal predictor; mean 1 + x1."""
    X = rng.standard_normal((int(spec.n), 1))
    errors = _noise(spec, X[:, 0], rng)
    mean = 1.0 + X[:, 0]
    return SimulatedData(Dataset(X, mean + errors), errors)


_GENERATORS: dict[str, Callable[[ModelSpec, np.random.Generator], SimulatedData]] = {
    MODEL1: simulate_model1,
    MODEL2: simulate_model2,
    LINEAR1D: simulate_linear1d,
}


def draw_model(
    spec: ModelSpec,
    rng: np.random.Generator,
    sampler: Callable[[ModelSpec, np.random.Generator], SimulatedData] | None = None,
) -> SimulatedData:
    """Draw from a built-in generator, or from ``sampler`` for custom specs."""
    if spec.model == CUSTOM:
        if sampler is None:
            raise ValueError("a custom ModelSpec needs an explicit sampler")
        return sampler(spec, rng)
    return _GENERATORS[spec.model](spec, rng)


def working_design(spec: ModelSpec) -> DesignSpec:
    """The (misspecified when a != 0) main-effects fit the harness uses."""
    if spec.model == CUSTOM:
        raise ValueError("custom ModelSpec has no built-in working design")
    return DesignSpec.main_effects(spec.dim)


def study_kernels(dim: int) -> tuple[KernelSpec, KernelSpec]:
    """Fixed (predictor, residual) kernels used by the Monte Carlo harness.

    Bandwidths are 2*sqrt(dim) and sqrt(2), applied after standardization.
    Standardized predictor pairs sit at squared distance ~ 2*dim on average,
    so sub-sqrt(dim) bandwidths drive the predictor Gram matrix toward the
    identity, where the statistic loses nearly all discriminating power.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return (
        KernelSpec(bandwidth=2.0 * float(np.sqrt(dim))),
        KernelSpec(bandwidth=float(np.sqrt(2.0))),
    )


@dataclass(frozen=True)
class PowerCell:
    """Monte Carlo rejection summary for one grid cell."""

    model: str
    n: int
    a: float
    lam: float
    reps: int
    rejections: int
    aborts: int
    rate: float
    se: float


@dataclass(frozen=True)
class PowerTable:
    """All cells of a size/power study, in grid order."""

    cells: tuple[PowerCell, ...]
    alpha: float
    replicates: int
    seed: int


def _power_trial(
    task: tuple[int, int],
    grid: Sequence[ModelSpec],
    alpha: float,
    config: BootstrapConfig,
    sampler=None,
    design: DesignSpec | None = None,
) -> tuple[int, bool, bool]:
    """(cell index, rejected?, aborted?) for one Monte Carlo trial."""
    cell, trial = task
    spec = grid[cell]
    sim = draw_model(spec, substream(config.seed, cell, trial, 0), sampler)
    trial_config = BootstrapConfig(
        replicates=config.replicates,
        seed=derive_seed(config.seed, cell, trial, 1),
        workers=1,
    )
    fit_design = design if design is not None else working_design(spec)
    kernel_x, kernel_e = study_kernels(spec.dim)
    try:
        result = run_test(sim.data, fit_design, kernel_x, kernel_e, trial_config, alpha)
    except BootstrapAbortError:
        return cell, False, True
    return cell, bool(result.reject), False


def power_study(
    grid: Sequence[ModelSpec],
    alpha: float,
    config: BootstrapConfig,
    reps: int,
    sampler=None,
    design: DesignSpec | None = None,
) -> PowerTable:
    """Rejection rates over the grid, ``reps`` independent trials per cell.

    Every trial draws its data and its bootstrap seed from streams keyed by
    (seed, cell, trial), so the table is identical no matter how trials are
    scheduled across workers (``config.workers`` parallelizes trials; each
    trial's bootstrap runs serially).  Trials whose bootstrap aborts on a
    twice-singular refit are counted per cell, surfaced in the table, and
    excluded from the rate's denominator.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty simulation grid")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    tasks = [(c, t) for c in range(len(grid)) for t in range(reps)]
    runner = partial(_power_trial, grid=grid, alpha=alpha, config=config, sampler=sampler, design=design)
    outcomes = _run_trials(runner, tasks, config.workers)
    cells = []
    for c, spec in enumerate(grid):
        mine = [(rej, ab) for cell, rej, ab in outcomes if cell == c]
        aborts = sum(1 for _, ab in mine if ab)
        done = len(mine) - aborts
        rejections = sum(1 for rej, ab in mine if rej and not ab)
        rate = rejections / done if done else float("nan")
        se = float(np.sqrt(rate * (1.0 - rate) / done)) if done else float("nan")
        cells.append(
            PowerCell(
                model=spec.model,
                n=int(spec.n),
                a=float(spec.a),
                lam=float(spec.lam),
                reps=reps,
                rejections=rejections,
                aborts=aborts,
                rate=rate,
                se=se,
            )
        )
    return PowerTable(tuple(cells), float(alpha), int(config.replicates), int(config.seed))


def _run_trials(runner, tasks, workers: int):
    workers = int(workers) or os.cpu_count() or 1
    if workers == 1:
        return [runner(task) for task in tasks]
    chunk = max(1, -(-len(tasks) // (workers * 4)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(runner, tasks, chunksize=chunk))


def monotonicity_report(table: PowerTable) -> list["MonotonicityFlag"]:
    """Flag adjacent grid cells where power *drops* by more than two combined SEs.

    Cells are grouped into one-parameter slices (varying ``lam`` with ``a``
    held fixed, and varying ``a`` with ``lam`` held fixed, per model and n);
    within a slice sorted by the varying parameter, a decrease larger than
    twice the combined Monte Carlo standard error of the two cells is
    reported.  An empty list means the table is monotone up to noise.
    """
    flags: list[MonotonicityFlag] = []
    for varying, fixed_key in (("lam", lambda c: c.a), ("a", lambda c: c.lam)):
        groups: dict[tuple, list[PowerCell]] = {}
        for cell in table.cells:
            groups.setdefault((cell.model, cell.n, fixed_key(cell)), []).append(cell)
        for cells in groups.values():
            if len(cells) < 2:
                continue
            ordered = sorted(cells, key=lambda c: getattr(c, varying))
            for left, right in zip(ordered, ordered[1:]):
                drop = left.rate - right.rate
                threshold = 2.0 * float(np.hypot(left.se, right.se))
                if drop > threshold:
                    flags.append(
                        MonotonicityFlag(
                            model=left.model,
                            n=left.n,
                            varying=varying,
                            left_value=getattr(left, varying),
                            right_value=getattr(right, varying),
                            drop=float(drop),
                            threshold=float(threshold),
                        )
                    )
    return flags


@dataclass(frozen=True)
class MonotonicityFlag:
    """One adjacent-cell power decrease beyond Monte Carlo noise."""

    model: str
    n: int
    varying: str
    left_value: float
    right_value: float
    drop: float
    threshold: float

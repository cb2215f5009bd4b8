"""Kernel-based independence testing for regression errors and predictors.

The headline object is a scaled HSIC statistic between raw predictor rows and
least-squares residuals, calibrated by a product-measure residual bootstrap.
It is simultaneously an independence test (errors vs. predictors) and a
lack-of-fit test for the linear model, and comes with a Monte Carlo harness
for size/power studies plus a small CLI (``hsicreg test|simulate|power|contrast``).
"""

from .bootstrap import (
    BootstrapConfig,
    ContrastResult,
    TestResult,
    bootstrap_null_draws,
    null_distribution_contrast,
    permutation_pvalue,
    pvalue_from_draws,
    replicate_indices,
    run_test,
)
from .errors import BootstrapAbortError, DegenerateDataError, SingularDesignError
from .hsic import HsicValue, hsic_pairs_stat, hsic_sums, hsic_vstat, residual_hsic_stat
from .kernels import (
    KernelSpec,
    center_gram,
    gaussian_kernel,
    gram_matrix,
    median_heuristic,
    resolve_bandwidth,
)
from .linreg import (
    BasisTerm,
    Dataset,
    DesignSpec,
    FittedModel,
    StandardizeInfo,
    build_design,
    coordinate,
    custom,
    fit_ols,
    intercept,
    product,
    square,
    standardize,
    standardize_dataset,
)
from .simulate import (
    ModelSpec,
    MonotonicityFlag,
    PowerCell,
    PowerTable,
    SimulatedData,
    draw_model,
    monotonicity_report,
    power_study,
    simulate_linear1d,
    simulate_model1,
    simulate_model2,
    study_kernels,
    working_design,
)

__version__ = "0.1.0"

__all__ = [
    "BasisTerm",
    "BootstrapAbortError",
    "BootstrapConfig",
    "ContrastResult",
    "Dataset",
    "DegenerateDataError",
    "DesignSpec",
    "FittedModel",
    "HsicValue",
    "KernelSpec",
    "ModelSpec",
    "MonotonicityFlag",
    "PowerCell",
    "PowerTable",
    "SimulatedData",
    "SingularDesignError",
    "StandardizeInfo",
    "TestResult",
    "bootstrap_null_draws",
    "build_design",
    "center_gram",
    "coordinate",
    "custom",
    "draw_model",
    "fit_ols",
    "gaussian_kernel",
    "gram_matrix",
    "hsic_pairs_stat",
    "hsic_sums",
    "hsic_vstat",
    "intercept",
    "median_heuristic",
    "monotonicity_report",
    "null_distribution_contrast",
    "permutation_pvalue",
    "power_study",
    "product",
    "pvalue_from_draws",
    "replicate_indices",
    "residual_hsic_stat",
    "resolve_bandwidth",
    "run_test",
    "simulate_linear1d",
    "simulate_model1",
    "simulate_model2",
    "square",
    "standardize",
    "standardize_dataset",
    "study_kernels",
    "working_design",
]

"""Multi-form Bayesian optimization over coupled generative latent spaces.

The package optimizes an expensive black-box objective by running Bayesian
optimization simultaneously in a high-dimensional and a low-dimensional
latent space of one generative model, exchanging samples between the two
searches through a pair of generator/encoder maps and fusing them with a
two-fidelity Gaussian-process surrogate.
"""

from gmfoo.core import (
    Bounds,
    Dataset,
    Fidelity,
    Origin,
    RngSeed,
    Sample,
    lhs_sample,
    standardize_outputs,
)
from gmfoo.surrogate import (
    GpModel,
    KernelParams,
    MfgpModel,
    fit_gp,
    fit_mfgp,
    gp_predict,
    kernel,
    log_marginal_likelihood,
    mfgp_predict,
)
from gmfoo.acquisition import AcquisitionQuery, expected_improvement, maximize_ei
from gmfoo.latent import (
    LatentSpacePair,
    Layer,
    Network,
    PearsonReport,
    correlation_report,
    embed_low_to_high,
    forward,
    load_network,
    pearson_coefficient,
    project_high_to_low,
    save_network,
)
from gmfoo.problems import (
    CorbelConfig,
    CurveProfile,
    Problem,
    area_objective,
    corbel_design_problem,
    corbel_objective,
    fourier_pair,
    image_to_pgm,
)
from gmfoo.engine import (
    GmfooConfig,
    KnowledgeBase,
    RunAborted,
    RunLog,
    RunRecord,
    exchange_samples,
    narrowed_box,
    run_comparison,
    run_gmfoo,
    run_standard_bo,
    summarize_logs,
)
from gmfoo.errors import GeometryError, GmfooError, NetworkFormatError, NumericalError

__version__ = "0.1.0"

__all__ = [
    "AcquisitionQuery",
    "Bounds",
    "CorbelConfig",
    "CurveProfile",
    "Dataset",
    "Fidelity",
    "GeometryError",
    "GmfooConfig",
    "GmfooError",
    "GpModel",
    "KernelParams",
    "KnowledgeBase",
    "LatentSpacePair",
    "Layer",
    "MfgpModel",
    "Network",
    "NetworkFormatError",
    "NumericalError",
    "Origin",
    "PearsonReport",
    "Problem",
    "RngSeed",
    "RunAborted",
    "RunLog",
    "RunRecord",
    "Sample",
    "area_objective",
    "corbel_design_problem",
    "corbel_objective",
    "correlation_report",
    "embed_low_to_high",
    "exchange_samples",
    "expected_improvement",
    "fit_gp",
    "fit_mfgp",
    "forward",
    "fourier_pair",
    "gp_predict",
    "image_to_pgm",
    "kernel",
    "lhs_sample",
    "load_network",
    "log_marginal_likelihood",
    "maximize_ei",
    "mfgp_predict",
    "narrowed_box",
    "pearson_coefficient",
    "project_high_to_low",
    "run_comparison",
    "run_gmfoo",
    "run_standard_bo",
    "save_network",
    "standardize_outputs",
    "summarize_logs",
]

"""Homodyne quantum-state tomography by filtered back-projection and by
Zernike/Chebyshev polynomial series expansion, with synthetic data,
error studies and state distances."""

__version__ = "0.1.0"

from .analysis import (
    DistanceCurve,
    McStudyResult,
    bootstrap_study,
    density_from_wigner,
    distance_study,
    frobenius_distance,
    l2_distance,
    mc_study,
    reconstruct_grid,
    reconstruct_point,
)
from .fbp import FbpConfig, PointEstimate, fbp_grid, fbp_kernel, fbp_point
from .grid import GridSpec, PhaseSpaceGrid
from .identities import run_identity_suite
from .pse import (
    CoefficientTable,
    PseConfig,
    estimate_coefficients,
    pse_evaluate,
    pse_grid,
    pse_origin,
    pse_origin_sigma,
    pse_point,
    select_truncation,
)
from .sampling import QuadratureDataset, bootstrap_resample, mix_seed, sample_dataset
from .states import (
    BUNDLED_STATES,
    FockStateModel,
    StateSpec,
    make_state,
    marginal_of_state,
    radon_numeric,
    wigner_of_state,
    wigner_origin_parity,
)

__all__ = [
    "__version__",
    "BUNDLED_STATES",
    "CoefficientTable",
    "DistanceCurve",
    "FbpConfig",
    "FockStateModel",
    "GridSpec",
    "McStudyResult",
    "PhaseSpaceGrid",
    "PointEstimate",
    "PseConfig",
    "QuadratureDataset",
    "StateSpec",
    "bootstrap_resample",
    "bootstrap_study",
    "density_from_wigner",
    "distance_study",
    "estimate_coefficients",
    "fbp_grid",
    "fbp_kernel",
    "fbp_point",
    "frobenius_distance",
    "l2_distance",
    "make_state",
    "marginal_of_state",
    "mc_study",
    "mix_seed",
    "pse_evaluate",
    "pse_grid",
    "pse_origin",
    "pse_origin_sigma",
    "pse_point",
    "radon_numeric",
    "reconstruct_grid",
    "reconstruct_point",
    "run_identity_suite",
    "sample_dataset",
    "select_truncation",
    "wigner_of_state",
    "wigner_origin_parity",
]

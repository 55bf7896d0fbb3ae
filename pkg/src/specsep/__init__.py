"""Spectral support, limiting density, and exact eigenvalue separation for
noncentral sample covariance matrices."""

from .exceptions import (
    BracketError,
    CoarseGridError,
    ContinuationError,
    ConvergenceError,
    GapTrackingError,
    NotInGapError,
    PoleError,
    SignConstancyError,
    SingularTransformError,
    SolverError,
    SpecsepError,
    SpectrumError,
)
from .separation import SeparationPrediction, h_values, predict_counts
from .simulate import (
    SimConfig,
    TrialResult,
    VerifyReport,
    build_deterministic,
    count_eigs,
    eigenvalues,
    extreme_bound_check,
    perturbation_check,
    run_trials,
    sample_B,
)
from .solver import (
    SolveSettings,
    StieltjesPair,
    boundary_value,
    constraint_residual,
    from_companion,
    residual_712,
    residual_713,
    solve_at,
    to_companion,
)
from .spectrum import (
    JointSpectrum,
    ModelConfig,
    SpectrumAtom,
    materialize_pairs,
    moments,
    validate,
)
from .support import (
    DensityCurve,
    RealBranch,
    SpectralGap,
    density,
    find_gaps,
    gap_vs_y,
    solve_s_given_g,
    x_of_g,
)

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "CoarseGridError",
    "ContinuationError",
    "ConvergenceError",
    "DensityCurve",
    "GapTrackingError",
    "JointSpectrum",
    "ModelConfig",
    "NotInGapError",
    "PoleError",
    "RealBranch",
    "SeparationPrediction",
    "SignConstancyError",
    "SimConfig",
    "SingularTransformError",
    "SolveSettings",
    "SolverError",
    "SpecsepError",
    "SpectralGap",
    "SpectrumAtom",
    "SpectrumError",
    "StieltjesPair",
    "TrialResult",
    "VerifyReport",
    "boundary_value",
    "build_deterministic",
    "constraint_residual",
    "count_eigs",
    "density",
    "eigenvalues",
    "extreme_bound_check",
    "find_gaps",
    "from_companion",
    "gap_vs_y",
    "h_values",
    "materialize_pairs",
    "moments",
    "perturbation_check",
    "predict_counts",
    "residual_712",
    "residual_713",
    "run_trials",
    "sample_B",
    "solve_at",
    "solve_s_given_g",
    "to_companion",
    "validate",
    "x_of_g",
]

"""Uniformity and box norms on finite abelian groups and tensors, with
pseudorandom majorants, constructive decompositions, and interval transfer.
"""
from __future__ import annotations

__version__ = "0.1.0"

from .boxnorms import (
    DualFamily,
    TensorFunction,
    box_norm,
    box_norm_ell,
    cut_norm,
    dump_tensor,
    evaluate_cut_objective,
    lift_to_tensor,
    load_tensor,
    multi_box_correlation,
    tensor_from_payload,
    tensor_to_payload,
)
from .decompose import (
    DecompositionResult,
    dense_model,
    dense_model_tensor,
    kvn_group,
    kvn_tensor,
)
from .duals import DualFunction, best_dual, realize_dual
from .errors import (
    BudgetExceededError,
    CubeNormsError,
    IntervalTooSmallError,
    InvalidInputError,
    InvalidMajorantError,
    InvalidParameterError,
    PreconditionError,
    PrimeSearchError,
)
from .experiments import ExperimentReport, emit_report, render_csv, run_experiment
from .groups import (
    FiniteAbelianGroup,
    GroupFunction,
    dump_function,
    function_from_payload,
    function_to_payload,
    load_function,
    lp_norm,
)
from .interval import (
    CutoffProfile,
    IntervalFunction,
    TransferResult,
    build_cutoff,
    cutoff_fourier_bound,
    embed_interval,
    interval_from_payload,
    interval_norm,
    interval_to_payload,
    transfer_kvn,
)
from .majorants import (
    GeneratedMajorant,
    MajorantCertificate,
    MajorantSpec,
    PsiReference,
    attenuate,
    attenuate_to_deviation,
    certify,
    default_psi,
    ell_for_group,
    ell_for_tensor,
    generate_majorant,
)
from .results import NormResult, WeakNormEstimate
from .uniformity import (
    additive_cut_norm,
    cube_correlation,
    cube_marginal,
    gowers_norm,
    moment_estimate,
    uniformity_norm_ell,
    weak_norm,
)

__all__ = [
    "__version__",
    "FiniteAbelianGroup",
    "GroupFunction",
    "TensorFunction",
    "IntervalFunction",
    "DualFamily",
    "DualFunction",
    "NormResult",
    "WeakNormEstimate",
    "gowers_norm",
    "weak_norm",
    "uniformity_norm_ell",
    "additive_cut_norm",
    "cube_correlation",
    "cube_marginal",
    "moment_estimate",
    "box_norm",
    "box_norm_ell",
    "cut_norm",
    "multi_box_correlation",
    "evaluate_cut_objective",
    "lift_to_tensor",
    "MajorantSpec",
    "GeneratedMajorant",
    "MajorantCertificate",
    "PsiReference",
    "generate_majorant",
    "certify",
    "attenuate",
    "attenuate_to_deviation",
    "default_psi",
    "ell_for_group",
    "ell_for_tensor",
    "best_dual",
    "realize_dual",
    "DecompositionResult",
    "dense_model",
    "dense_model_tensor",
    "kvn_group",
    "kvn_tensor",
    "build_cutoff",
    "cutoff_fourier_bound",
    "embed_interval",
    "interval_norm",
    "transfer_kvn",
    "CutoffProfile",
    "TransferResult",
    "ExperimentReport",
    "run_experiment",
    "render_csv",
    "emit_report",
    "function_to_payload",
    "function_from_payload",
    "load_function",
    "dump_function",
    "tensor_to_payload",
    "tensor_from_payload",
    "load_tensor",
    "dump_tensor",
    "interval_to_payload",
    "interval_from_payload",
    "lp_norm",
    "CubeNormsError",
    "InvalidInputError",
    "InvalidParameterError",
    "InvalidMajorantError",
    "PreconditionError",
    "BudgetExceededError",
    "IntervalTooSmallError",
    "PrimeSearchError",
]

"""Correlation Impact Ratio (CIR) feature attribution.

Single-pass, correlation-aware global scores for features and feature sets,
a row-subsampling transfer harness, and agreement metrics for comparing
score vectors.
"""

from ._backend import BACKEND
from .agreement import (AgreementReport, agreement, jaccard_at_k, kendall_tau,
                        procrustes_residual, spearman_rho, symmetric_kl)
from .centering import CenteredData, center_table, robust_center
from .core import (Accumulator, Score, ScoreReport, accumulate, block_cir, cir_scores,
                   class_conditioned_cir, merge_accumulators)
from .data import CenteringSpec, DataTable, GroupFamily
from .errors import ExcirError
from .sketch import GKSketch, sketch_midmean
from .transfer import (TransferConfig, TransferCurve, pareto_knee, run_transfer,
                       subsample_rows)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "Accumulator", "AgreementReport", "CenteredData", "CenteringSpec",
    "DataTable", "ExcirError", "GKSketch", "GroupFamily", "Score", "ScoreReport",
    "TransferConfig", "TransferCurve", "accumulate", "agreement", "block_cir",
    "center_table", "cir_scores", "class_conditioned_cir", "jaccard_at_k", "kendall_tau",
    "merge_accumulators", "pareto_knee", "procrustes_residual", "robust_center",
    "run_transfer", "sketch_midmean", "spearman_rho", "subsample_rows", "symmetric_kl",
]

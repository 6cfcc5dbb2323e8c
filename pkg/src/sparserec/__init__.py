"""Iterative hard thresholding and CoSaMP with exact-RIC certification tools."""
from .algorithms import Algorithm, RecoveryTrace, StoppingRule, cosamp_step, iht_step, run
from .core import BoundCheck, MeasurementModel, norm2
from .rip import RicEstimate, ric_exact
from .thresholding import hard_threshold, restrict, support, top_k_indices

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BoundCheck",
    "MeasurementModel",
    "RecoveryTrace",
    "RicEstimate",
    "StoppingRule",
    "cosamp_step",
    "hard_threshold",
    "iht_step",
    "norm2",
    "restrict",
    "ric_exact",
    "run",
    "support",
    "top_k_indices",
]

"""Latent process-state annotation for univariate and multivariate time series."""

from .core import (
    LabelProfile,
    RngSeed,
    Segmentation,
    StateSequence,
    TimeSeries,
    TsError,
    WindowDataset,
    canonicalize_labels,
    validate_series,
)
from .classifier import cross_val_predict, generate_kernels, macro_f1, transform
from .metrics import ScoreReport, ami, cgain, covering, f1_rand
from .segmentation import ClaspProfile, clasp_profile, extract_cps
from .statedetect import (
    ClapResult,
    calc_confused_labels,
    clap,
    confused_merging,
    create_dataset,
    expand_to_state_sequence,
    merge_labels,
)
from .windowing import WidthEstimate, suss_width

__all__ = [
    "ClapResult",
    "ClaspProfile",
    "LabelProfile",
    "RngSeed",
    "ScoreReport",
    "Segmentation",
    "StateSequence",
    "TimeSeries",
    "TsError",
    "WidthEstimate",
    "WindowDataset",
    "ami",
    "calc_confused_labels",
    "canonicalize_labels",
    "cgain",
    "clap",
    "clasp_profile",
    "confused_merging",
    "covering",
    "create_dataset",
    "cross_val_predict",
    "expand_to_state_sequence",
    "extract_cps",
    "f1_rand",
    "generate_kernels",
    "macro_f1",
    "merge_labels",
    "suss_width",
    "transform",
    "validate_series",
]

__version__ = "0.1.0"

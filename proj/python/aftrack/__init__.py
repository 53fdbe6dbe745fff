"""Correlation filter and color model fusion tracker."""

from ._aftrack import (
    Tracker,
    TrackerConfig,
    adaptive_alpha,
    apce,
    center_error,
    gaussian_label,
    hog_features,
    iou,
    load_config,
    locate_peak,
    parse_config,
    precision_curve,
    run_ope,
    success_curve,
    synth_sequence,
)

__all__ = [
    "Tracker",
    "TrackerConfig",
    "adaptive_alpha",
    "apce",
    "center_error",
    "gaussian_label",
    "hog_features",
    "iou",
    "load_config",
    "locate_peak",
    "parse_config",
    "precision_curve",
    "run_ope",
    "success_curve",
    "synth_sequence",
]

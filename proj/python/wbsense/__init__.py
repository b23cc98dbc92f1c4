"""Wideband spectrum sensing with edge detection, reference isolation and GED."""

from ._core import (
    CampaignResult,
    ExperimentConfig,
    chi2_quantile,
    edge_frame_count,
    erfc_inv,
    experiment_ids,
    ged_pd,
    ged_pf,
    marcum_q,
    optimal_sensing_time,
    ged_statistic,
    run_experiment,
    threshold_for_target_pd,
    threshold_for_target_pf,
    tw_min,
    required_tw,
    centered_psd,
)

__all__ = [
    "CampaignResult",
    "ExperimentConfig",
    "centered_psd",
    "chi2_quantile",
    "edge_frame_count",
    "erfc_inv",
    "experiment_ids",
    "ged_pd",
    "ged_pf",
    "ged_statistic",
    "marcum_q",
    "optimal_sensing_time",
    "required_tw",
    "run_experiment",
    "threshold_for_target_pd",
    "threshold_for_target_pf",
    "tw_min",
]

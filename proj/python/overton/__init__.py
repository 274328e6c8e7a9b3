"""Bounded-confidence opinion dynamics with a scheduled manipulative group.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from overton._core import (
    Cluster,
    ManipulatorGroup,
    PrimaryClusterReport,
    SmoothedDensity,
    SplitMix64,
    Trajectory,
    TwoGroupSystem,
    WeightMatrix,
    arwhk_step,
    awhk_step,
    confidence_set,
    derive_seed,
    detachment_time,
    detect_clusters,
    dw_step,
    effective_weights,
    equispaced_opinions,
    extended_opinions,
    find_local_maxima,
    gap_closed_form,
    hk_step,
    holds_forever,
    influence_bound,
    mean_std,
    merge_groups,
    primary_interval,
    run_simulation,
    run_sweep,
    sample_weight_matrix,
    schedule_opinion,
    smooth_density,
    uniform_random_opinions,
)

__all__ = [
    "Cluster",
    "ManipulatorGroup",
    "PrimaryClusterReport",
    "SmoothedDensity",
    "SplitMix64",
    "Trajectory",
    "TwoGroupSystem",
    "WeightMatrix",
    "arwhk_step",
    "awhk_step",
    "confidence_set",
    "derive_seed",
    "detachment_time",
    "detect_clusters",
    "dw_step",
    "effective_weights",
    "equispaced_opinions",
    "extended_opinions",
    "find_local_maxima",
    "gap_closed_form",
    "hk_step",
    "holds_forever",
    "influence_bound",
    "mean_std",
    "merge_groups",
    "primary_interval",
    "run_simulation",
    "run_sweep",
    "sample_weight_matrix",
    "schedule_opinion",
    "smooth_density",
    "uniform_random_opinions",
]

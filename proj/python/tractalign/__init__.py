"""Fiber bundle registration via Karcher means, tangent codes and parallel transport."""

from ._core import (
    Bundle,
    BundleCode,
    Diffeo,
    HardAlignment,
    MeanResult,
    SoftAlignment,
    TractalignError,
    align_pair,
    apply_gamma,
    bundle_distance,
    bundle_points,
    encode_bundle,
    from_srvf,
    hard_align,
    hausdorff,
    inner,
    kabsch_rotation,
    karcher_mean,
    load_bundle,
    optimal_gamma,
    perturb_bundle,
    place_fibers,
    procrustes_rotation,
    read_tck,
    resample,
    rigid_align,
    run_cli,
    save_bundle,
    soft_align,
    srvf_distance,
    synth_bundle,
    to_srvf,
    transport_exact,
    warp_profile,
    profile_variability,
    write_tck,
)

__all__ = [
    "Bundle",
    "BundleCode",
    "Diffeo",
    "HardAlignment",
    "MeanResult",
    "SoftAlignment",
    "TractalignError",
    "align_pair",
    "apply_gamma",
    "bundle_distance",
    "bundle_points",
    "encode_bundle",
    "from_srvf",
    "hard_align",
    "hausdorff",
    "inner",
    "kabsch_rotation",
    "karcher_mean",
    "load_bundle",
    "optimal_gamma",
    "perturb_bundle",
    "place_fibers",
    "procrustes_rotation",
    "read_tck",
    "resample",
    "rigid_align",
    "run_cli",
    "save_bundle",
    "soft_align",
    "srvf_distance",
    "synth_bundle",
    "to_srvf",
    "transport_exact",
    "warp_profile",
    "profile_variability",
    "write_tck",
]

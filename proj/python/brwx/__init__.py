"""Branching random walks on infinite-mean Galton-Watson trees.

Thin re-export of the compiled `_brwx` module: distribution laws, population
dynamics, frontier simulation, limit-constant recursions, goodness-of-fit
statistics, and the experiment runner.
"""

from _brwx import (  # noqa: F401
    DisplacementLaw,
    ExtremeRecord,
    PathMode,
    PointSample,
    PopulationPath,
    ProgenyLaw,
    RngStream,
    RunResult,
    TailRegime,
    WEstimate,
    __version__,
    cloud_speed_stat,
    estimate_w,
    experiment,
    fit_stable_calibration,
    heavy_sum_log_ratio,
    mass_concentration_stat,
    run_brw,
    sample_positive_stable,
    scale_positions,
    scaled_max_ratio,
    simulate_exact_sizes,
    simulate_surrogate_sizes,
    stats,
    theory,
)

__all__ = [
    "DisplacementLaw",
    "ExtremeRecord",
    "PathMode",
    "PointSample",
    "PopulationPath",
    "ProgenyLaw",
    "RngStream",
    "RunResult",
    "TailRegime",
    "WEstimate",
    "__version__",
    "cloud_speed_stat",
    "estimate_w",
    "experiment",
    "fit_stable_calibration",
    "heavy_sum_log_ratio",
    "mass_concentration_stat",
    "run_brw",
    "sample_positive_stable",
    "scale_positions",
    "scaled_max_ratio",
    "simulate_exact_sizes",
    "simulate_surrogate_sizes",
    "stats",
    "theory",
]

"""Citation-curve performance indices, dual checks and cohort calibration."""

from ._core import (
    CalibrationFit,
    CitationCurve,
    CohortProfile,
    DualDensity,
    PerformanceFamily,
    SrmValue,
    calibrate_cohort,
    compute_index,
    construct_curve,
    dual_value,
    expected_value,
    fit_author,
    gamma,
    h_plus,
    minimizer_gap,
    mix,
    phi_index,
    rank_authors,
    run_cli,
    shift_citations,
    append_publication,
    srm_generic,
    standard_catalog,
    weak_duality_margin,
    REPORTED_BETA_BAR,
)

__all__ = [name for name in dir() if not name.startswith("_")]

"""Difference-in-differences panel econometrics for the intervention."""

from .diagnostics import (
    DiagnosticsBundle,
    TrendRow,
    diagnostics,
    qq_points,
    trend_series,
    write_qq_csv,
    write_trend_csv,
)
from .panel import (
    DiDEstimate,
    EventRecord,
    PANEL_COLUMNS,
    PanelObservation,
    build_panel,
    describe_overdispersion,
    diff_in_means,
    load_panel,
    save_panel,
)
from .regression import (
    DEFAULT_COVARIATES,
    RegressionFit,
    cox_snell,
    design_matrix,
    fit_negbin,
    fit_negbin_xy,
    fit_ols,
    fit_ols_xy,
    format_fit_report,
    write_fit_report,
)

__all__ = [
    "DEFAULT_COVARIATES",
    "DiDEstimate",
    "DiagnosticsBundle",
    "EventRecord",
    "PANEL_COLUMNS",
    "PanelObservation",
    "RegressionFit",
    "TrendRow",
    "build_panel",
    "cox_snell",
    "describe_overdispersion",
    "design_matrix",
    "diagnostics",
    "diff_in_means",
    "fit_negbin",
    "fit_negbin_xy",
    "fit_ols",
    "fit_ols_xy",
    "format_fit_report",
    "load_panel",
    "qq_points",
    "save_panel",
    "trend_series",
    "write_fit_report",
    "write_qq_csv",
    "write_trend_csv",
]

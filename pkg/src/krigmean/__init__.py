"""Ordinary-kriging estimation of the unknown constant mean of a stationary series."""

from .correlation import CorrelationModel, EmpiricalAcf, eval_correlation, fit_model, sample_acf
from .data_io import ReportRow, TimeSeries, load_series, write_outputs
from .estimator import KrigingMeanEstimator
from .exceptions import (
    CorrelationNotPD,
    DegenerateSeries,
    EmptyInput,
    KrigingError,
    MalformedCsv,
    NoRootInRange,
    SingularSystem,
)
from .kriging import (
    KrigingSolution,
    KrigingSystem,
    SeriesStats,
    assemble_lambda,
    assemble_rhs,
    classic_ls_weights,
    constraint_residual,
    estimate_mean,
    kriging_variance,
    series_stats,
    solve_kriging,
    weighted_variance,
)
from .scan import RootResult, ScanPoint, asymptotic_xi, find_root_j, scan_residuals
from .synthetic import Ar1Spec, generate_ar1, mc_asymptotics

__version__ = "0.1.0"

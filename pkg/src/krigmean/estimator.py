"""scikit-learn style front end for the full fit -> scan -> root pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .correlation import DEFAULT_FAMILY, CorrelationModel, fit_model, sample_acf
from .data_io import ReportRow
from .kriging import assemble_lambda, assemble_rhs, classic_ls_weights, series_stats, solve_many
from .scan import DEFAULT_J_FACTOR, DEFAULT_TOLERANCE, find_root_j, scan_residuals
from .validation import check_family, check_int, check_series, check_tolerance, check_units


def default_max_lag(n: int) -> int:
    return max(1, min(n - 1, n // 4))


class KrigingMeanEstimator(BaseEstimator):
    """Ordinary-kriging estimate of the constant mean of a stationary series.

    A correlation model is fitted to the first ``n_window`` observations (or
    taken as given through ``model``) and held fixed. Target indices
    ``j = n+1 .. j_max`` are scanned for the root of ``w . rho + mu``; the
    weighted mean at that index is the numerical estimate of the mean.

    Parameters
    ----------
    n_window : int, optional
        Number of leading observations used. Defaults to the whole series.
    family : str, default="exponential"
        Correlation family fitted to the sample ACF.
    model : CorrelationModel, optional
        Fixed correlation model; skips fitting when given.
    nugget : float, default=0.0
        Nugget held fixed during fitting.
    fit_nugget : bool, default=False
    max_lag : int, optional
        Largest ACF lag entering the fit. Defaults to ``n // 4``.
    j_max : int, optional
        Last scanned index. Defaults to ``10 * n``.
    tolerance : float, default=1e-3
        Accepted ``|w . rho + mu|`` when the scan has no sign change.
    units : {"normalized", "absolute"}, default="normalized"
        ``min_sq_error_`` with unit variance, or scaled by the window variance.
    threads : int, default=1

    Attributes
    ----------
    model_ : CorrelationModel
    system_ : KrigingSystem
    scan_ : list of ScanPoint
    root_ : RootResult
    mean_ : float
        Numerical estimate ``w . v`` at the root index.
    classic_mean_ : float
        Classic least-squares estimate.
    j_star_ : int
    weights_ : ndarray of shape (n_window_,)
    classic_weights_ : ndarray of shape (n_window_,)
    sigma2_ : float
        Biased window variance around ``classic_mean_``.
    min_sq_error_ : float
    residual_ : float

    Raises
    ------
    NoRootInRange
        From ``fit`` when no root is found up to ``j_max``.
    """

    def __init__(
        self,
        n_window=None,
        family=DEFAULT_FAMILY,
        model=None,
        nugget=0.0,
        fit_nugget=False,
        max_lag=None,
        j_max=None,
        tolerance=DEFAULT_TOLERANCE,
        units="normalized",
        threads=1,
    ):
        self.n_window = n_window
        self.family = family
        self.model = model
        self.nugget = nugget
        self.fit_nugget = fit_nugget
        self.max_lag = max_lag
        self.j_max = j_max
        self.tolerance = tolerance
        self.units = units
        self.threads = threads

    def fit_correlation_model(self, window):
        """The fixed ``model`` if given, otherwise a fit to the window's sample ACF."""
        if self.model is not None:
            if not isinstance(self.model, CorrelationModel):
                raise TypeError("model must be a CorrelationModel")
            return self.model
        n = window.size
        max_lag = default_max_lag(n) if self.max_lag is None else check_int(self.max_lag, "max_lag", minimum=1)
        acf = sample_acf(window, max_lag)
        return fit_model(acf, check_family(self.family), nugget=self.nugget, fit_nugget=self.fit_nugget)

    def fit(self, X, y=None):
        v = check_series(X)
        n = v.size if self.n_window is None else check_int(self.n_window, "n_window", minimum=1)
        if n > v.size:
            raise ValueError(f"n_window={n} exceeds series length {v.size}")
        j_max = DEFAULT_J_FACTOR * n if self.j_max is None else check_int(self.j_max, "j_max", minimum=n + 1)
        if j_max <= n:
            raise ValueError(f"j_max must exceed n_window, got {j_max}")
        units = check_units(self.units)
        tolerance = check_tolerance(self.tolerance)

        window = v[:n]
        self.n_window_ = n
        self.model_ = self.fit_correlation_model(window)
        self.system_ = assemble_lambda(self.model_, n)
        self.classic_weights_ = classic_ls_weights(self.system_)
        stats = series_stats(self.system_, window)
        self.classic_mean_ = stats.classic_mean
        self.sigma2_ = stats.sigma2
        self.window_ = window

        scale = 1.0 if units == "normalized" else stats.sigma2
        self.scan_ = scan_residuals(self.system_, self.model_, window, n + 1, j_max, sigma2=scale, threads=self.threads)
        self.root_ = find_root_j(self.scan_, tolerance)

        point = self.root_.point
        self.j_star_ = self.root_.j_star
        self.mean_ = point.estimate
        self.min_sq_error_ = point.min_sq_error
        self.residual_ = point.residual
        self.weights_ = self.kriging_weights([self.j_star_])[:, 0]
        return self

    def kriging_weights(self, j) -> np.ndarray:
        """Weights ``(n_window_, len(j))`` for target indices ``j > n_window_``."""
        check_is_fitted(self, "system_")
        rhs = assemble_rhs(self.model_, self.n_window_, np.atleast_1d(np.asarray(j, dtype=int)))
        weights, _ = solve_many(self.system_, rhs)
        return weights

    def predict(self, j) -> np.ndarray:
        """Kriging predictions ``w_j . v`` at the given indices (1-based, beyond the window)."""
        check_is_fitted(self, "system_")
        return self.window_ @ self.kriging_weights(j)

    def report_row(self, index_name: str = "series") -> ReportRow:
        check_is_fitted(self, "root_")
        return ReportRow(index_name, self.n_window_, self.j_star_, self.mean_, self.min_sq_error_, self.residual_)

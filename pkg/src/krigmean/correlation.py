"""Stationary correlation families, the empirical ACF and least-squares model fitting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import minimize

from .exceptions import DegenerateSeries

FAMILIES = ("exponential", "gaussian", "spherical", "damped-cosine")
DEFAULT_FAMILY = "exponential"

RANGE_BOUNDS = (0.1, 1.0e4)
DAMPING_BOUNDS = (1.0e-3, np.pi)
NUGGET_BOUNDS = (0.0, 0.95)


@dataclass(frozen=True)
class CorrelationModel:
    """Parametric stationary correlation function rho(h).

    Parameters
    ----------
    family : str
        One of ``exponential``, ``gaussian``, ``spherical`` or ``damped-cosine``.
    range : float
        Correlation length in lag units (the support radius for ``spherical``).
    nugget : float
        Drop of the correlation just off lag zero, in ``[0, 1)``.
    damping : float, optional
        Angular frequency (radians per lag) of the cosine factor. Required for
        ``damped-cosine`` and ignored otherwise.

    Notes
    -----
    For ``h > 0`` the model is ``(1 - nugget) * base(h)`` and ``rho(0) == 1``.
    """

    family: str = DEFAULT_FAMILY
    range: float = 1.0
    nugget: float = 0.0
    damping: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown correlation family {self.family!r}; expected one of {FAMILIES}")
        if not np.isfinite(self.range) or self.range <= 0:
            raise ValueError(f"range must be positive, got {self.range}")
        if not 0.0 <= self.nugget < 1.0:
            raise ValueError(f"nugget must lie in [0, 1), got {self.nugget}")
        if self.family == "damped-cosine":
            if self.damping is None or not np.isfinite(self.damping) or self.damping <= 0:
                raise ValueError("damped-cosine requires a positive damping")
        elif self.damping is not None:
            object.__setattr__(self, "damping", None)

    def __call__(self, lag: ArrayLike) -> NDArray | float:
        return eval_correlation(self, lag)

    def to_dict(self) -> dict:
        return {"family": self.family, "range": self.range, "nugget": self.nugget, "damping": self.damping}


@dataclass(frozen=True)
class EmpiricalAcf:
    lags: NDArray
    values: NDArray
    n_used: int = field(default=0)

    def __post_init__(self):
        lags = np.asarray(self.lags, dtype=int)
        values = np.asarray(self.values, dtype=float)
        if lags.ndim != 1 or values.shape != lags.shape:
            raise ValueError("lags and values must be 1-D arrays of equal length")
        if lags.size == 0 or not np.array_equal(lags, np.arange(lags.size)):
            raise ValueError("lags must be 0, 1, ..., L")
        if values[0] != 1.0:
            raise ValueError("acf value at lag 0 must be 1")
        if lags.size - 1 >= self.n_used:
            raise ValueError("maximum lag must be smaller than the sample size")
        object.__setattr__(self, "lags", lags)
        object.__setattr__(self, "values", values)

    @property
    def max_lag(self) -> int:
        return int(self.lags[-1])


def _base(family: str, h: NDArray, range_: float, damping: float | None) -> NDArray:
    if family == "exponential":
        return np.exp(-h / range_)
    if family == "gaussian":
        return np.exp(-((h / range_) ** 2))
    if family == "spherical":
        r = np.minimum(h / range_, 1.0)
        return 1.0 - 1.5 * r + 0.5 * r**3
    return np.exp(-h / range_) * np.cos(damping * h)


def eval_correlation(model: CorrelationModel, lag: ArrayLike) -> NDArray | float:
    """Evaluate ``rho`` at one or more nonnegative lags."""
    h = np.asarray(lag, dtype=float)
    if np.any(h < 0) or np.any(np.isnan(h)):
        raise ValueError("lags must be nonnegative")
    out = (1.0 - model.nugget) * _base(model.family, h, model.range, model.damping)
    out = np.where(h == 0, 1.0, out)
    return float(out) if out.ndim == 0 else out


def sample_acf(series: ArrayLike, max_lag: int) -> EmpiricalAcf:
    """Biased (1/N) sample autocorrelation for lags ``0..max_lag``.

    The 1/N denominator keeps the sequence positive semidefinite.
    """
    v = np.asarray(series, dtype=float).ravel()
    n = v.size
    if n < 4:
        raise ValueError(f"need at least 4 observations, got {n}")
    if not 0 <= max_lag < n:
        raise ValueError(f"max_lag must lie in [0, {n - 1}], got {max_lag}")
    x = v - v.mean()
    denom = x @ x
    if denom <= np.finfo(float).tiny or np.ptp(v) == 0:
        raise DegenerateSeries("series has zero variance")
    values = np.array([x[: n - h] @ x[h:] for h in range(max_lag + 1)]) / denom
    values[0] = 1.0
    return EmpiricalAcf(np.arange(max_lag + 1), values, n)


def _loss_grid(family, lags, target, ranges, dampings, nuggets):
    # broadcast over (range, damping, nugget, lag)
    r = ranges[:, None, None, None]
    d = dampings[None, :, None, None]
    g = nuggets[None, None, :, None]
    h = lags[None, None, None, :]
    model = (1.0 - g) * _base(family, h, r, d)
    return ((model - target) ** 2).sum(axis=-1)


def fit_model(
    acf: EmpiricalAcf,
    family: str = DEFAULT_FAMILY,
    *,
    nugget: float = 0.0,
    fit_nugget: bool = False,
    n_grid: int = 200,
) -> CorrelationModel:
    """Least-squares fit of a correlation family to an empirical ACF.

    A bounded grid search over log-range (and damping / nugget where they are
    free) is followed by an L-BFGS-B refinement started from the best grid
    point. The refined point is kept only if it lowers the loss, so the result
    is deterministic and never worse than the grid.

    Parameters
    ----------
    acf : EmpiricalAcf
        Target values; lags ``1..L`` enter the loss, lag 0 is fixed at 1.
    family : str
        Correlation family to fit.
    nugget : float
        Fixed nugget used when ``fit_nugget`` is false.
    fit_nugget : bool
        Treat the nugget as a free parameter in ``NUGGET_BOUNDS``.
    n_grid : int
        Number of log-spaced range grid points.

    Returns
    -------
    CorrelationModel
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown correlation family {family!r}")
    lags = acf.lags[1:].astype(float)
    target = acf.values[1:]
    if lags.size == 0:
        return CorrelationModel(family, RANGE_BOUNDS[0], nugget, 1.0 if family == "damped-cosine" else None)

    oscillating = family == "damped-cosine"
    ranges = np.geomspace(*RANGE_BOUNDS, n_grid)
    dampings = np.linspace(*DAMPING_BOUNDS, 64) if oscillating else np.array([1.0])
    nuggets = np.linspace(*NUGGET_BOUNDS, 20) if fit_nugget else np.array([nugget])

    grid = _loss_grid(family, lags, target, ranges, dampings, nuggets)
    i, k, m = np.unravel_index(np.argmin(grid), grid.shape)
    best = np.array([np.log(ranges[i]), dampings[k], nuggets[m]])
    best_loss = grid[i, k, m]

    free = [True, oscillating, fit_nugget]
    bounds = [np.log(RANGE_BOUNDS), DAMPING_BOUNDS, NUGGET_BOUNDS]

    def unpack(z):
        p = best.copy()
        p[np.flatnonzero(free)] = z
        return p

    def loss(z):
        log_r, d, g = unpack(z)
        model = (1.0 - g) * _base(family, lags, np.exp(log_r), d)
        return float(((model - target) ** 2).sum())

    res = minimize(
        loss,
        best[free],
        method="L-BFGS-B",
        bounds=[b for b, f in zip(bounds, free) if f],
    )
    if np.isfinite(res.fun) and res.fun < best_loss:
        best = unpack(res.x)

    log_r, d, g = best
    return CorrelationModel(
        family=family,
        range=float(np.clip(np.exp(log_r), *RANGE_BOUNDS)),
        nugget=float(g),
        damping=float(d) if oscillating else None,
    )

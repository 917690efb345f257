"""Ordinary-kriging system for the constant mean of a stationary series.

The augmented system

    [ Lambda  F ] [ w  ]   [ r ]
    [ F'      0 ] [ mu ] = [ 1 ]

is solved by bordering a Cholesky factorization of ``Lambda``. ``Lambda``
depends only on the model and the window size, so it is factored once and
every target index reuses the factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .correlation import CorrelationModel, eval_correlation
from .exceptions import CorrelationNotPD, SingularSystem

SUM_TOL = 1e-8


@dataclass(frozen=True)
class KrigingSystem:
    """Factored correlation matrix of an ``n``-point window.

    Attributes
    ----------
    n : int
        Window size.
    lam : ndarray of shape (n, n)
        Symmetric Toeplitz correlation matrix with unit diagonal.
    ones : ndarray of shape (n,)
    factor : tuple
        ``scipy.linalg.cho_factor`` output for ``lam``.
    lam_inv_ones : ndarray of shape (n,)
        ``Lambda^{-1} F``.
    ones_lam_inv_ones : float
        ``F' Lambda^{-1} F``.
    """

    n: int
    lam: NDArray
    ones: NDArray
    factor: tuple | None
    lam_inv_ones: NDArray
    ones_lam_inv_ones: float

    def __post_init__(self):
        for arr in (self.lam, self.ones, self.lam_inv_ones):
            arr.setflags(write=False)

    @classmethod
    def from_matrix(cls, lam: ArrayLike) -> KrigingSystem:
        lam = np.array(lam, dtype=float)
        n = lam.shape[0]
        if lam.ndim != 2 or lam.shape != (n, n) or n < 1:
            raise ValueError("correlation matrix must be square and nonempty")
        if not np.allclose(lam, lam.T, rtol=0, atol=1e-14) or not np.all(np.diag(lam) == 1.0):
            raise ValueError("correlation matrix must be symmetric with unit diagonal")
        try:
            factor = scipy.linalg.cho_factor(lam, lower=True, check_finite=True)
        except np.linalg.LinAlgError as exc:
            raise CorrelationNotPD(f"correlation matrix of size {n} is not positive definite") from exc
        pivots = np.diag(factor[0])
        if pivots.min() ** 2 <= n * np.finfo(float).eps:
            raise CorrelationNotPD(f"correlation matrix of size {n} is numerically singular")
        ones = np.ones(n)
        lam_inv_ones = scipy.linalg.cho_solve(factor, ones)
        return cls(n, lam, ones, factor, lam_inv_ones, float(ones @ lam_inv_ones))

    def solve(self, b: NDArray) -> NDArray:
        """Apply ``Lambda^{-1}`` to a vector or to the columns of a matrix."""
        if self.factor is None:
            raise SingularSystem("kriging system has no factorization")
        return scipy.linalg.cho_solve(self.factor, b, check_finite=False)


@dataclass(frozen=True)
class KrigingSolution:
    j: int
    weights: NDArray
    multiplier: float

    def augmented_residual(self, system: KrigingSystem, rhs: ArrayLike) -> float:
        """Max-norm residual of the full ``(n+1) x (n+1)`` system."""
        r = np.asarray(rhs, dtype=float)
        top = system.lam @ self.weights + self.multiplier - r
        bottom = self.weights.sum() - 1.0
        return float(max(np.abs(top).max(), abs(bottom)))


@dataclass(frozen=True)
class SeriesStats:
    sigma2: float
    classic_mean: float

    def __post_init__(self):
        if not self.sigma2 >= 0:
            raise ValueError(f"sigma2 must be nonnegative, got {self.sigma2}")


def assemble_lambda(model: CorrelationModel, n: int) -> KrigingSystem:
    """Build and factor the ``n x n`` correlation matrix ``rho(|i - k|)``."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    column = np.asarray(eval_correlation(model, np.arange(n, dtype=float)), dtype=float).reshape(n)
    return KrigingSystem.from_matrix(scipy.linalg.toeplitz(column))


def assemble_rhs(model: CorrelationModel, n: int, j: int | ArrayLike) -> NDArray:
    """Correlations ``rho(j - i)`` between observations ``1..n`` and target ``j``.

    A vector of targets returns an ``(n, len(j))`` matrix, one column per target.
    """
    js = np.asarray(j)
    if np.any(js < n + 1):
        raise ValueError(f"target index must be at least n + 1 = {n + 1}")
    i = np.arange(1, n + 1, dtype=float)
    if js.ndim == 0:
        return np.asarray(eval_correlation(model, float(js) - i), dtype=float)
    return np.asarray(eval_correlation(model, js[None, :].astype(float) - i[:, None]), dtype=float)


def solve_many(system: KrigingSystem, rhs: NDArray) -> tuple[NDArray, NDArray]:
    """Weights ``(n, m)`` and multipliers ``(m,)`` for each column of ``rhs``."""
    rhs = np.asarray(rhs, dtype=float).reshape(system.n, -1)
    if system.n == 1:
        return np.ones_like(rhs), rhs[0] - 1.0
    x = system.solve(rhs)
    mu = (system.ones @ x - 1.0) / system.ones_lam_inv_ones
    weights = x - np.outer(system.lam_inv_ones, mu)
    return weights, mu


def solve_kriging(system: KrigingSystem, rhs: ArrayLike, j: int) -> KrigingSolution:
    """Solve the augmented system for one target index using the cached factor."""
    r = np.asarray(rhs, dtype=float)
    if r.shape != (system.n,):
        raise ValueError(f"rhs must have length {system.n}, got shape {r.shape}")
    weights, mu = solve_many(system, r[:, None])
    return KrigingSolution(int(j), weights[:, 0], float(mu[0]))


def classic_ls_weights(system: KrigingSystem) -> NDArray:
    """Weights ``Lambda^{-1} F / (F' Lambda^{-1} F)``, independent of any target."""
    if system.factor is None:
        raise SingularSystem("kriging system has no factorization")
    w = system.lam_inv_ones / system.ones_lam_inv_ones
    return w / w.sum()


def estimate_mean(weights: ArrayLike, values: ArrayLike) -> float:
    w = np.asarray(weights, dtype=float)
    v = np.asarray(values, dtype=float).ravel()
    if w.shape != v.shape:
        raise ValueError(f"weights ({w.size}) and values ({v.size}) differ in length")
    if abs(w.sum() - 1.0) > SUM_TOL:
        raise ValueError("weights must sum to one")
    return float(w @ v)


def series_stats(system: KrigingSystem, values: ArrayLike) -> SeriesStats:
    """Classic least-squares mean and the biased variance around it."""
    v = np.asarray(values, dtype=float).ravel()
    center = estimate_mean(classic_ls_weights(system), v)
    return SeriesStats(float(np.mean((v - center) ** 2)), center)


def constraint_residual(solution: KrigingSolution, rhs: ArrayLike) -> float:
    """``w . rho + mu``; the numerical estimator sits where this vanishes."""
    return float(solution.weights @ np.asarray(rhs, dtype=float) + solution.multiplier)


def weighted_variance(solution: KrigingSolution, rhs: ArrayLike, stats: SeriesStats) -> float:
    """Mean-square error of the weighted mean, ``sigma2 * (w . rho - mu)``.

    Equals ``sigma2 * w' Lambda w`` for an exact solve.
    """
    return stats.sigma2 * float(solution.weights @ np.asarray(rhs, dtype=float) - solution.multiplier)


def kriging_variance(solution: KrigingSolution, rhs: ArrayLike, stats: SeriesStats) -> float:
    """Prediction error variance at the target, ``sigma2 * (1 - (w . rho + mu))``."""
    return stats.sigma2 * (1.0 - constraint_residual(solution, rhs))

"""AR(1) series with known mean and correlation, and a Monte Carlo check of the estimator."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .correlation import CorrelationModel
from .data_io import CONVERGENCE_HEADER, TimeSeries, format_number
from .exceptions import NoRootInRange
from .kriging import assemble_lambda, assemble_rhs, solve_kriging
from .scan import DEFAULT_J_FACTOR, DEFAULT_TOLERANCE, find_root_j, scan_residuals


@dataclass(frozen=True)
class Ar1Spec:
    phi: float
    mean: float = 0.0
    sigma: float = 1.0
    length: int = 240
    seed: int = 0

    def __post_init__(self):
        if not -1.0 < self.phi < 1.0:
            raise ValueError(f"phi must lie in (-1, 1), got {self.phi}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.length < 2:
            raise ValueError(f"length must be at least 2, got {self.length}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def ar1_model(phi: float) -> CorrelationModel:
    """Correlation model whose integer-lag values are exactly ``phi ** h``."""
    if phi > 0:
        return CorrelationModel("exponential", -1.0 / np.log(phi))
    if phi == 0:
        # exp(-h / 1e-3) underflows to 0 for every h >= 1
        return CorrelationModel("exponential", 1e-3)
    return CorrelationModel("damped-cosine", -1.0 / np.log(-phi), damping=np.pi)


def _ar1_paths(phi, sigma, innovations):
    # first column is the stationary start, the rest are scaled innovations
    e = innovations * sigma
    e[:, 1:] *= np.sqrt(1.0 - phi**2)
    return lfilter([1.0], [1.0, -phi], e, axis=1)


def generate_ar1(spec: Ar1Spec) -> TimeSeries:
    """``v_t = mean + x_t`` with a stationary Gaussian AR(1) ``x``; deterministic per seed."""
    rng = np.random.default_rng(spec.seed)
    z = rng.standard_normal((1, spec.length))
    return TimeSeries(spec.mean + _ar1_paths(spec.phi, spec.sigma, z)[0])


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    mse_mean_estimator: float
    se: float
    var_prediction_error: float
    se2: float
    j_star: int
    root_bracketed: bool
    mse_predicted: float
    var_predicted: float
    mean_estimate: float
    sd_estimate: float


@dataclass(frozen=True)
class ConvergenceTable:
    spec: Ar1Spec
    replicates: int
    rows: list[ConvergenceRow] = field(default_factory=list)

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(CONVERGENCE_HEADER) + "\n")
            for r in self.rows:
                fields = [str(r.n)] + [
                    format_number(x) for x in (r.mse_mean_estimator, r.se, r.var_prediction_error, r.se2)
                ]
                fh.write(",".join(fields) + "\n")


def mc_asymptotics(
    spec: Ar1Spec,
    n_grid: list[int],
    replicates: int = 500,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    j_factor: int = DEFAULT_J_FACTOR,
) -> ConvergenceTable:
    """Monte Carlo error of the numerical estimator over a grid of window sizes.

    The correlation model is the true AR(1) one, so the root index and the
    weights for each ``n`` are fixed; replicates only vary the data. Every
    window size sees the same replicate paths (common random numbers), each
    drawn from its own stream spawned from ``spec.seed``.

    For each ``n`` the table holds the mean-square error of ``w . v`` around
    the true mean and the mean square of the prediction error
    ``V_j - w . v`` at the root ``j``, each with its Monte Carlo standard error,
    next to the model predictions ``sigma^2 w' Lambda w`` and the kriging
    variance.
    """
    if replicates < 100:
        raise ValueError(f"need at least 100 replicates, got {replicates}")
    model = ar1_model(spec.phi)
    sigma2 = spec.sigma**2

    plans = []
    for n in n_grid:
        system = assemble_lambda(model, n)
        scan = scan_residuals(system, model, np.zeros(n), n + 1, j_factor * n)
        try:
            root = find_root_j(scan, tolerance)
            j_star, bracketed = root.j_star, root.bracketed
        except NoRootInRange:
            # residual never vanishes (e.g. white noise); the weights do not depend on j then
            j_star = min(scan, key=lambda p: (abs(p.residual), p.j)).j
            bracketed = False
        rhs = assemble_rhs(model, n, j_star)
        sol = solve_kriging(system, rhs, j_star)
        var_pred = sigma2 * (1.0 - (sol.weights @ rhs + sol.multiplier))
        plans.append((n, j_star, bracketed, sol.weights, sigma2 * float(sol.weights @ system.lam @ sol.weights), var_pred))

    length = max(max(n_grid), max(p[1] for p in plans))
    streams = np.random.SeedSequence(spec.seed).spawn(replicates)
    z = np.stack([np.random.default_rng(s).standard_normal(length) for s in streams])
    paths = spec.mean + _ar1_paths(spec.phi, spec.sigma, z)

    rows = []
    sqrt_r = np.sqrt(replicates)
    for n, j_star, bracketed, w, mse_pred, var_pred in plans:
        est = paths[:, :n] @ w
        err2 = (est - spec.mean) ** 2
        pred2 = (paths[:, j_star - 1] - est) ** 2
        rows.append(
            ConvergenceRow(
                n=n,
                mse_mean_estimator=float(err2.mean()),
                se=float(err2.std(ddof=1) / sqrt_r),
                var_prediction_error=float(pred2.mean()),
                se2=float(pred2.std(ddof=1) / sqrt_r),
                j_star=j_star,
                root_bracketed=bracketed,
                mse_predicted=mse_pred,
                var_predicted=float(var_pred),
                mean_estimate=float(est.mean()),
                sd_estimate=float(est.std(ddof=1)),
            )
        )
    return ConvergenceTable(spec, replicates, rows)

"""Scan target indices beyond the window for the root of ``w . rho + mu``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from .correlation import CorrelationModel
from .exceptions import NoRootInRange
from .kriging import KrigingSystem, assemble_rhs, solve_many

DEFAULT_TOLERANCE = 1e-3
DEFAULT_J_FACTOR = 10
CHUNK = 256


@dataclass(frozen=True)
class ScanPoint:
    j: int
    residual: float
    estimate: float
    multiplier: float
    xi_hat: float
    min_sq_error: float


@dataclass(frozen=True)
class RootResult:
    j_star: int
    point: ScanPoint
    bracketed: bool


def asymptotic_xi(system: KrigingSystem) -> float:
    """Constant cross-correlation ``1 / (2 F' Lambda^{-1} F)`` at which the residual vanishes."""
    return 0.5 / system.ones_lam_inv_ones


def _scan_chunk(system, model, values, sigma2, js):
    rhs = assemble_rhs(model, system.n, js)
    weights, mu = solve_many(system, rhs)
    w_dot_r = np.einsum("ij,ij->j", weights, rhs)
    return [
        ScanPoint(
            j=int(j),
            residual=float(wr + m),
            estimate=float(w @ values),
            multiplier=float(m),
            xi_hat=float(r.mean()),
            min_sq_error=float(sigma2 * (wr - m)),
        )
        for j, wr, m, w, r in zip(js, w_dot_r, mu, weights.T, rhs.T)
    ]


def scan_residuals(
    system: KrigingSystem,
    model: CorrelationModel,
    values: ArrayLike,
    j_from: int,
    j_to: int,
    *,
    sigma2: float = 1.0,
    threads: int = 1,
) -> list[ScanPoint]:
    """Evaluate the kriging solution at every ``j`` in ``[j_from, j_to]``.

    Parameters
    ----------
    system : KrigingSystem
        Factored window of size ``n``; never refactored here.
    model : CorrelationModel
        Model that produced ``system``; supplies the right-hand sides.
    values : array_like of shape (n,)
        Observed window used for the estimates ``w . v``.
    j_from, j_to : int
        Inclusive scan range, ``n + 1 <= j_from <= j_to``.
    sigma2 : float
        Variance scale for ``min_sq_error``; 1 gives normalized units.
    threads : int
        Worker threads over chunks of ``j``. Output does not depend on it.

    Returns
    -------
    list of ScanPoint
        Ordered by ``j``.
    """
    n = system.n
    v = np.asarray(values, dtype=float).ravel()
    if v.size != n:
        raise ValueError(f"window has {v.size} values, system expects {n}")
    if not n + 1 <= j_from <= j_to:
        raise ValueError(f"scan range must satisfy {n + 1} <= j_from <= j_to, got [{j_from}, {j_to}]")
    js = np.arange(j_from, j_to + 1)
    chunks = [js[k : k + CHUNK] for k in range(0, js.size, CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda c: _scan_chunk(system, model, v, sigma2, c), chunks))
    else:
        parts = [_scan_chunk(system, model, v, sigma2, c) for c in chunks]
    return [p for part in parts for p in part]


def find_root_j(scan: list[ScanPoint], tolerance: float = DEFAULT_TOLERANCE) -> RootResult:
    """Pick the integer index where the residual is closest to zero.

    The first sign change between consecutive points wins, taking whichever
    end has the smaller ``|residual|`` (ties to the smaller ``j``). Without a
    sign change the global argmin is returned if it is within ``tolerance``.

    Raises
    ------
    NoRootInRange
        No sign change and ``min |residual| > tolerance``.
    """
    if not scan:
        raise ValueError("scan is empty")
    res = np.array([p.residual for p in scan])
    signs = np.sign(res)
    flips = np.flatnonzero((signs[:-1] * signs[1:] < 0) | (signs[:-1] == 0))
    if signs[-1] == 0:
        flips = np.append(flips, len(scan) - 1)
    if flips.size:
        k = int(flips[0])
        if k + 1 < len(scan) and abs(res[k + 1]) < abs(res[k]):
            k += 1
        return RootResult(scan[k].j, scan[k], True)
    k = int(np.argmin(np.abs(res)))
    if abs(res[k]) > tolerance:
        raise NoRootInRange(
            f"no sign change over j = {scan[0].j}..{scan[-1].j}; "
            f"smallest |residual| {abs(res[k]):.3g} at j = {scan[k].j} exceeds tolerance {tolerance:g}"
        )
    return RootResult(scan[k].j, scan[k], False)

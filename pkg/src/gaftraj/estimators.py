"""Classical MSD/taMSD estimators and log-log exponent fitting.

These are the non-ML baseline for alpha inference and the independent check
used to validate every trajectory generator.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .simulators import Trajectory

__all__ = [
    "MsdCurve",
    "ta_msd",
    "ensemble_msd",
    "fit_alpha",
    "loglog_fit",
    "estimate_alpha_single",
]


@dataclass
class MsdCurve:
    lags: np.ndarray  # strictly increasing positive integers
    values: np.ndarray  # squared length units, >= 0


def _positions(traj) -> np.ndarray:
    if isinstance(traj, Trajectory):
        return np.asarray(traj.positions, dtype=np.float64)
    return np.asarray(traj, dtype=np.float64)


def ta_msd(traj, max_lag: int) -> MsdCurve:
    """Time-averaged MSD along one trajectory.

    taMSD(tau) = (1/(L-tau)) * sum_t (x(t+tau) - x(t))^2 for tau = 1..max_lag.
    """
    x = _positions(traj)
    n = len(x)
    if not 1 <= max_lag < n:
        raise ValueError(f"max_lag must satisfy 1 <= max_lag < {n}, got {max_lag}")
    lags = np.arange(1, max_lag + 1)
    values = np.empty(max_lag, dtype=np.float64)
    for i, tau in enumerate(lags):
        d = x[tau:] - x[:-tau]
        values[i] = np.mean(d * d)
    return MsdCurve(lags, values)


def ensemble_msd(trajs: Iterable, max_lag: int) -> MsdCurve:
    """Ensemble MSD(t) = mean over trajectories of (x(t) - x(0))^2, t = 1..max_lag."""
    arrays = [_positions(t) for t in trajs]
    if not arrays:
        raise ValueError("ensemble_msd needs at least one trajectory")
    for a in arrays:
        if len(a) < max_lag + 1:
            raise ValueError(
                f"trajectory of length {len(a)} too short for max_lag={max_lag}"
            )
    disp = np.stack([a[1 : max_lag + 1] - a[0] for a in arrays])
    values = np.mean(disp * disp, axis=0)
    return MsdCurve(np.arange(1, max_lag + 1), values)


def loglog_fit(lags: np.ndarray, values: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line through (log lag, log value).

    Returns (slope, intercept, rms residual); raises if any value is <= 0
    (degenerate/immobile input has no defined exponent).
    """
    lags = np.asarray(lags, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    if len(lags) < 2:
        raise ValueError("need at least two points for a log-log fit")
    if np.any(values <= 0.0):
        raise ValueError("log-log fit undefined: non-positive MSD value in range")
    lx = np.log(lags)
    ly = np.log(values)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return float(slope), float(intercept), float(np.sqrt(np.mean(resid * resid)))


def fit_alpha(
    curve: MsdCurve, fit_range: Sequence[int] | None = None
) -> tuple[float, float]:
    """Fitted exponent of an MSD curve over lags in [fit_range[0], fit_range[1]].

    Returns (alpha_hat, intercept); alpha_hat is the log-log slope.
    """
    if fit_range is None:
        lo, hi = int(curve.lags[0]), int(curve.lags[-1])
    else:
        lo, hi = int(fit_range[0]), int(fit_range[1])
    if hi > curve.lags[-1]:
        raise ValueError(f"fit range [{lo}, {hi}] exceeds max lag {curve.lags[-1]}")
    mask = (curve.lags >= lo) & (curve.lags <= hi)
    slope, intercept, _ = loglog_fit(curve.lags[mask], curve.values[mask])
    return slope, intercept


def estimate_alpha_single(traj) -> float:
    """Per-trajectory exponent estimate from the short-lag taMSD.

    Fits tau in [1, L//4] (the least biased region for finite trajectories);
    returns NaN for degenerate (immobile) trajectories.
    """
    x = _positions(traj)
    if len(x) < 8:
        raise ValueError(f"need length >= 8 for a single-trajectory fit, got {len(x)}")
    curve = ta_msd(x, max_lag=len(x) // 4)
    if np.any(curve.values <= 0.0):
        return math.nan
    slope, _ = fit_alpha(curve)
    return slope

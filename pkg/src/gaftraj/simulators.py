"""One-dimensional anomalous-diffusion trajectory generators.

Five canonical regimes, each parameterized by the anomalous exponent alpha
(ensemble MSD grows as t**alpha) and driven by an explicit RngStream:

    ATTM  piecewise Brownian motion, diffusivity-dependent segment durations
    CTRW  Gaussian jumps separated by power-law waiting times
    FBM   fractional Brownian motion, Hurst index H = alpha/2
    LW    Levy walk: constant-speed ballistic flights with power-law durations
    SBM   scaled Brownian motion: independent increments, time-dependent
          diffusivity

All paths are sampled at unit time steps t = 0..length-1, start at the
origin, and carry an exact event construction internally: CTRW, LW and ATTM
draw continuous event times (Pareto durations floored at EVENT_TIME_SCALE)
and read positions at integer clock ticks. Event draws come in doubling
blocks until the sampling window is covered, so the consumed draw count is
itself a function of the draws and generation stays deterministic for a
fixed (master_seed, stream_index).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from . import _backend
from .rng import RngStream

__all__ = [
    "DiffusionModelKind",
    "Trajectory",
    "alpha_domain",
    "check_alpha",
    "simulate",
    "simulate_attm",
    "simulate_ctrw",
    "simulate_fbm",
    "simulate_lw",
    "simulate_sbm",
]

ATTM_GAMMA_RANGE = (1.5, 2.5)
LW_SPEED = 1.0

# Event-time unit for CTRW/LW/ATTM relative to the sampling interval: waits,
# flights and segments have Pareto floor EVENT_TIME_SCALE. A floor of one
# full sampling step would leave the whole observable window (t <= 50) inside
# the first-event transient, where the ensemble MSD has not yet reached its
# t**alpha regime; sub-step events aggregate into the tick reads.
EVENT_TIME_SCALE = 0.01


class DiffusionModelKind(IntEnum):
    """The five regimes, with fixed label codes (alphabetical order)."""

    ATTM = 0
    CTRW = 1
    FBM = 2
    LW = 3
    SBM = 4

    @classmethod
    def from_name(cls, name: str) -> "DiffusionModelKind":
        try:
            return cls[name.upper()]
        except KeyError:
            raise ValueError(f"unknown diffusion model {name!r}") from None


# Closed/open alpha interval per model: (lo, hi, lo_open, hi_open).
_ALPHA_DOMAINS = {
    DiffusionModelKind.ATTM: (0.0, 1.0, True, False),
    DiffusionModelKind.CTRW: (0.0, 1.0, True, False),
    DiffusionModelKind.FBM: (0.0, 2.0, True, True),
    DiffusionModelKind.LW: (1.0, 2.0, False, True),
    DiffusionModelKind.SBM: (0.0, 2.0, True, True),
}


@dataclass
class Trajectory:
    """A sampled path plus its generation provenance."""

    positions: np.ndarray
    model: DiffusionModelKind
    alpha: float
    seed: int = 0
    snr: float = np.inf  # inf until localization noise is applied

    @property
    def length(self) -> int:
        return len(self.positions)


def alpha_domain(model: DiffusionModelKind) -> tuple[float, float, bool, bool]:
    """(lo, hi, lo_open, hi_open) for the model's admissible alpha."""
    return _ALPHA_DOMAINS[DiffusionModelKind(model)]


def check_alpha(model: DiffusionModelKind, alpha: float) -> None:
    lo, hi, lo_open, hi_open = alpha_domain(model)
    ok = (alpha > lo if lo_open else alpha >= lo) and (
        alpha < hi if hi_open else alpha <= hi
    )
    if not ok:
        lb, rb = "(" if lo_open else "[", ")" if hi_open else "]"
        raise ValueError(
            f"alpha outside model domain: {model.name} requires alpha in "
            f"{lb}{lo}, {hi}{rb}, got {alpha}"
        )


def _check_length(length: int) -> int:
    length = int(length)
    if length < 2:
        raise ValueError(f"trajectory length must be >= 2, got {length}")
    return length


def _pareto_events(
    g: np.random.Generator, tail: float, scale: float, horizon: float, block: int
) -> np.ndarray:
    """Durations scale*(1-U)**(-1/tail), drawn in doubling blocks until their
    cumulative sum passes the horizon. The consumed draw count is a function
    of the draws themselves, so generation stays deterministic."""
    chunks = []
    total = 0.0
    while total <= horizon:
        w = scale * (1.0 - g.random(block)) ** (-1.0 / tail)
        chunks.append(w)
        total += w.sum()
        block *= 2
    return np.concatenate(chunks)


def simulate_ctrw(alpha: float, length: int, rng: RngStream) -> Trajectory:
    """Continuous-time random walk.

    Waiting times are Pareto with tail exponent alpha (w = (1-U)**(-1/alpha),
    minimum 1 time unit); each renewal jumps by a standard-normal
    displacement; the position is constant between renewals.
    """
    check_alpha(DiffusionModelKind.CTRW, alpha)
    length = _check_length(length)
    g = rng.generator()
    waits = _pareto_events(g, alpha, EVENT_TIME_SCALE, length - 1.0, length)
    jumps = g.standard_normal(len(waits))
    renewal_times = np.cumsum(waits)
    positions = _backend.step_sample(renewal_times, np.cumsum(jumps), length)
    return Trajectory(positions, DiffusionModelKind.CTRW, alpha, rng.stream_index)


def simulate_lw(alpha: float, length: int, rng: RngStream) -> Trajectory:
    """Levy walk: alternating ballistic flights at speed 1.

    Flight durations are Pareto with tail exponent sigma = 3 - alpha
    (minimum 1), directions +-1 equiprobable, and each flight displaces by
    exactly speed*duration, so displacement length is tied to flight time.
    """
    check_alpha(DiffusionModelKind.LW, alpha)
    length = _check_length(length)
    sigma = 3.0 - alpha
    g = rng.generator()
    durations = _pareto_events(g, sigma, EVENT_TIME_SCALE, length - 1.0, length)
    directions = g.integers(0, 2, size=len(durations)) * 2.0 - 1.0
    ends = np.cumsum(durations)
    starts = np.concatenate(([0.0], ends[:-1]))
    disp_at_start = np.concatenate(([0.0], np.cumsum(directions * durations)[:-1]))
    positions = _backend.ramp_sample(
        ends, starts, disp_at_start, directions * LW_SPEED, length
    )
    return Trajectory(positions, DiffusionModelKind.LW, alpha, rng.stream_index)


def simulate_attm(alpha: float, length: int, rng: RngStream) -> Trajectory:
    """Annealed transient time motion.

    Brownian segments with diffusivity D_i ~ P(D) prop. D**(sigma-1) on (0,1]
    and deterministic duration t_i = D_i**(-gamma) (sigma = alpha*gamma, gamma
    drawn uniformly per trajectory). Integer-time increments are Gaussian
    with variance 2 * integral of D(s) over the unit interval, which is exact
    for Brownian motion with piecewise-constant diffusivity.
    """
    check_alpha(DiffusionModelKind.ATTM, alpha)
    length = _check_length(length)
    g = rng.generator()
    gamma = g.uniform(*_attm_gamma_bounds(alpha))
    sigma = alpha * gamma
    chunks = []
    total = 0.0
    block = length
    while total <= length - 1.0:
        d = g.random(block) ** (1.0 / sigma)
        chunks.append(d)
        total += (EVENT_TIME_SCALE * d ** (-gamma)).sum()
        block *= 2
    diffusivities = np.concatenate(chunks)
    durations = EVENT_TIME_SCALE * diffusivities ** (-gamma)
    ends = np.cumsum(durations)
    starts = np.concatenate(([0.0], ends[:-1]))
    cum_integral = np.concatenate(([0.0], np.cumsum(diffusivities * durations)[:-1]))
    integral = _backend.ramp_sample(ends, starts, cum_integral, diffusivities, length)
    increments = np.sqrt(2.0 * np.diff(integral)) * g.standard_normal(length - 1)
    positions = np.concatenate(([0.0], np.cumsum(increments)))
    return Trajectory(positions, DiffusionModelKind.ATTM, alpha, rng.stream_index)


def _attm_gamma_bounds(alpha: float) -> tuple[float, float]:
    # The alpha = sigma/gamma scaling holds in the Massignan regime
    # sigma < gamma < sigma + 1; the right inequality means gamma < 1/(1-alpha),
    # so the sampling range is capped for small alpha (otherwise the process
    # crosses into the alpha = sigma/(sigma+1) regime).
    lo, hi = ATTM_GAMMA_RANGE
    if alpha < 1.0:
        hi = min(hi, 0.95 / (1.0 - alpha))
        lo = min(lo, 0.75 * hi)
    return lo, hi


@functools.lru_cache(maxsize=64)
def _fgn_spectrum(n: int, hurst: float) -> np.ndarray | None:
    """Circulant-embedding eigenvalues for n steps of fGn, or None if the
    embedding is not nonnegative-definite (triggers the Cholesky fallback)."""
    k = np.arange(n, dtype=np.float64)
    rho = 0.5 * (
        np.abs(k + 1.0) ** (2.0 * hurst)
        - 2.0 * np.abs(k) ** (2.0 * hurst)
        + np.abs(k - 1.0) ** (2.0 * hurst)
    )
    circ = np.concatenate([rho, [0.0], rho[:0:-1]])
    eig = np.fft.fft(circ).real
    if eig.min() < -1e-8 * eig.max():
        return None
    eig = np.maximum(eig, 0.0)
    eig.setflags(write=False)
    return eig


@functools.lru_cache(maxsize=64)
def _fgn_cholesky(n: int, hurst: float) -> np.ndarray:
    k = np.arange(n, dtype=np.float64)
    rho = 0.5 * (
        np.abs(k + 1.0) ** (2.0 * hurst)
        - 2.0 * np.abs(k) ** (2.0 * hurst)
        + np.abs(k - 1.0) ** (2.0 * hurst)
    )
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    chol = np.linalg.cholesky(rho[idx])
    chol.setflags(write=False)
    return chol


def _sample_fgn(n: int, hurst: float, g: np.random.Generator) -> np.ndarray:
    """Exact fractional Gaussian noise, unit variance per step.

    Davies-Harte circulant embedding, O(n log n); falls back to a dense
    Cholesky factor when the embedding has negative eigenvalues.
    """
    eig = _fgn_spectrum(n, hurst)
    if eig is None:
        return _fgn_cholesky(n, hurst) @ g.standard_normal(n)
    z = np.zeros(2 * n, dtype=np.complex128)
    z[0] = g.standard_normal()
    z[n] = g.standard_normal()
    if n > 1:
        v = g.standard_normal((n - 1, 2))
        z[1:n] = (v[:, 0] + 1j * v[:, 1]) / np.sqrt(2.0)
        z[n + 1 :] = np.conj(z[1:n][::-1])
    return np.sqrt(2.0 * n) * np.fft.ifft(np.sqrt(eig) * z).real[:n]


def simulate_fbm(alpha: float, length: int, rng: RngStream) -> Trajectory:
    """Fractional Brownian motion with Hurst index H = alpha/2.

    Increments are exact fGn with autocovariance
    rho(k) = 0.5*(|k+1|**(2H) - 2|k|**(2H) + |k-1|**(2H)).
    """
    check_alpha(DiffusionModelKind.FBM, alpha)
    length = _check_length(length)
    fgn = _sample_fgn(length - 1, alpha / 2.0, rng.generator())
    positions = np.concatenate(([0.0], np.cumsum(fgn)))
    return Trajectory(positions, DiffusionModelKind.FBM, alpha, rng.stream_index)


def simulate_sbm(alpha: float, length: int, rng: RngStream) -> Trajectory:
    """Scaled Brownian motion: independent Gaussian increments with
    Var[x(t+1) - x(t)] = (t+1)**alpha - t**alpha, so MSD(t) = t**alpha
    exactly (diffusivity constant D = 1/2)."""
    check_alpha(DiffusionModelKind.SBM, alpha)
    length = _check_length(length)
    g = rng.generator()
    t = np.arange(length, dtype=np.float64)
    variances = np.diff(t**alpha)
    increments = np.sqrt(variances) * g.standard_normal(length - 1)
    positions = np.concatenate(([0.0], np.cumsum(increments)))
    return Trajectory(positions, DiffusionModelKind.SBM, alpha, rng.stream_index)


_SIMULATORS = {
    DiffusionModelKind.ATTM: simulate_attm,
    DiffusionModelKind.CTRW: simulate_ctrw,
    DiffusionModelKind.FBM: simulate_fbm,
    DiffusionModelKind.LW: simulate_lw,
    DiffusionModelKind.SBM: simulate_sbm,
}


def simulate(
    model: DiffusionModelKind | int | str,
    alpha: float,
    length: int,
    rng: RngStream,
) -> Trajectory:
    """Dispatch to the model-specific simulator (validates the alpha domain)."""
    if isinstance(model, str):
        model = DiffusionModelKind.from_name(model)
    else:
        model = DiffusionModelKind(model)
    check_alpha(model, alpha)
    return _SIMULATORS[model](alpha, length, rng)

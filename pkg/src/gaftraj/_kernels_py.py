"""Pure-numpy implementations of the hot per-record kernels.

These are the fallback for the compiled extension in _kernels.pyx; both
backends must produce bit-identical outputs (same IEEE operation sequence,
no FMA contraction on the compiled side).
"""

from __future__ import annotations

import numpy as np

GAF_SUMMATION = 0
GAF_DIFFERENCE = 1


def step_sample(event_times: np.ndarray, cum_values: np.ndarray, n_out: int) -> np.ndarray:
    """Sample a piecewise-constant cadlag path at t = 0..n_out-1.

    The path sits at 0 before the first event and at cum_values[k-1] from
    event_times[k-1] (inclusive) onward.
    """
    t = np.arange(n_out, dtype=np.float64)
    idx = np.searchsorted(event_times, t, side="right")
    padded = np.concatenate(([0.0], cum_values))
    return padded[idx]


def ramp_sample(
    ends: np.ndarray,
    starts: np.ndarray,
    base: np.ndarray,
    slope: np.ndarray,
    n_out: int,
) -> np.ndarray:
    """Sample a piecewise-linear path at t = 0..n_out-1.

    Segment k spans [starts[k], ends[k]) with value base[k] + slope[k]*(t -
    starts[k]); times at or past the last end are read from the last segment.
    """
    t = np.arange(n_out, dtype=np.float64)
    k = np.searchsorted(ends, t, side="right")
    np.minimum(k, len(ends) - 1, out=k)
    return base[k] + slope[k] * (t - starts[k])


def gaf_batch(cos_phi: np.ndarray, sin_phi: np.ndarray, kind: int) -> np.ndarray:
    """Pairwise angular fields for a batch of polar-encoded series.

    cos_phi/sin_phi are [n, N] float64; returns [n, N, N] float32, entries
    clipped to [-1, 1] (rounding can overshoot by an ulp at the extremes).
    """
    c_i = cos_phi[:, :, None]
    c_j = cos_phi[:, None, :]
    s_i = sin_phi[:, :, None]
    s_j = sin_phi[:, None, :]
    if kind == GAF_SUMMATION:
        m = c_i * c_j - s_i * s_j
    elif kind == GAF_DIFFERENCE:
        m = s_i * c_j - c_i * s_j
    else:
        raise ValueError(f"unknown field kind code {kind}")
    m += 0.0  # canonicalize -0.0 (keeps backends bit-identical at the extremes)
    np.clip(m, -1.0, 1.0, out=m)
    return m.astype(np.float32)

"""Gramian Angular Field encoding of one-dimensional series.

A series is min-max normalized to [-1, 1], mapped to polar angles
phi = arccos(x) with the time index stored in the radius, and expanded into
pairwise angular matrices:

    GASF[i, j] = cos(phi_i + phi_j)      (symmetric)
    GADF[i, j] = sin(phi_i - phi_j)      (antisymmetric, zero diagonal)

Both fields are computed from cached cos/sin vectors instead of per-entry
trig of sums, which is algebraically identical and halves the trig work.
Reversing the series rotates both fields by 180 degrees, so time is encoded
along the main diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from PIL import Image

from . import _backend

__all__ = [
    "GafKind",
    "PolarEncoding",
    "GafImage",
    "normalize",
    "polar_encode",
    "gasf",
    "gadf",
    "encode",
    "encode_batch",
    "to_png",
]


class GafKind(Enum):
    GASF = "gasf"
    GADF = "gadf"

    @classmethod
    def from_name(cls, name: str) -> "GafKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown GAF kind {name!r} (expected gasf or gadf)") from None


@dataclass
class PolarEncoding:
    """Angles phi in [0, pi] plus the time radius r_i = i/N, i = 1..N.

    cos_phi/sin_phi are the cached vectors the field products consume;
    they equal cos(phi)/sin(phi) exactly (cos(arccos(x)) = x on [-1, 1],
    sin = sqrt(1 - x^2) on [0, pi]).
    """

    phi: np.ndarray
    r: np.ndarray
    cos_phi: np.ndarray
    sin_phi: np.ndarray


@dataclass
class GafImage:
    matrix: np.ndarray  # N x N float64 in [-1, 1]
    kind: GafKind


def normalize(series) -> np.ndarray:
    """Min-max rescale to [-1, 1]: ((x - max) + (x - min)) / (max - min).

    The minimum maps to -1 and the maximum to +1 exactly. A constant series
    divides 0 by 0 in the formula; it is defined here as all zeros, the
    continuous limit of a vanishing-amplitude series.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or len(x) == 0:
        raise ValueError("normalize expects a nonempty one-dimensional series")
    if not np.all(np.isfinite(x)):
        raise ValueError("normalize expects finite values")
    hi = x.max()
    lo = x.min()
    if hi == lo:
        return np.zeros_like(x)
    return ((x - hi) + (x - lo)) / (hi - lo)


def polar_encode(x_norm) -> PolarEncoding:
    """Angular/radial encoding of a normalized series.

    phi_i = arccos(x_i) (input clamped to [-1, 1] to absorb rounding),
    r_i = i/N for i = 1..N. Bijective: cos(phi_i) recovers x_i.
    """
    x = np.asarray(x_norm, dtype=np.float64)
    c = np.clip(x, -1.0, 1.0)
    phi = np.arccos(c)
    n = len(x)
    r = np.arange(1, n + 1, dtype=np.float64) / n
    s = np.sqrt(1.0 - c * c)
    return PolarEncoding(phi=phi, r=r, cos_phi=c, sin_phi=s)


def _pairwise(pe: PolarEncoding, kind: GafKind) -> np.ndarray:
    c, s = pe.cos_phi, pe.sin_phi
    if kind is GafKind.GASF:
        m = np.multiply.outer(c, c) - np.multiply.outer(s, s)
    else:
        m = np.multiply.outer(s, c) - np.multiply.outer(c, s)
    m += 0.0  # canonicalize -0.0 (matches the batch kernels bit for bit)
    # products of rounded cos/sin can overshoot the unit range by an ulp
    np.clip(m, -1.0, 1.0, out=m)
    return m


def gasf(pe: PolarEncoding) -> GafImage:
    """Summation field cos(phi_i + phi_j); diagonal is 2*x_i^2 - 1."""
    return GafImage(_pairwise(pe, GafKind.GASF), GafKind.GASF)


def gadf(pe: PolarEncoding) -> GafImage:
    """Difference field sin(phi_i - phi_j); diagonal is exactly zero."""
    return GafImage(_pairwise(pe, GafKind.GADF), GafKind.GADF)


def encode(series, kind: GafKind | str) -> GafImage:
    """normalize -> polar_encode -> gasf/gadf for a single series."""
    kind = GafKind.from_name(kind) if isinstance(kind, str) else kind
    pe = polar_encode(normalize(series))
    return gasf(pe) if kind is GafKind.GASF else gadf(pe)


def encode_batch(series_2d: np.ndarray, kind: GafKind | str) -> np.ndarray:
    """Encode [n, N] series rows into [n, N, N] float32 field images.

    Row-wise identical to encode(); float32 is the shard emission precision.
    Runs on the compiled kernel backend when available.
    """
    kind = GafKind.from_name(kind) if isinstance(kind, str) else kind
    x = np.ascontiguousarray(series_2d, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"expected a 2-d [records, length] array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("encode_batch expects finite values")
    hi = x.max(axis=1, keepdims=True)
    lo = x.min(axis=1, keepdims=True)
    span = hi - lo
    flat = (span == 0.0).ravel()
    span[flat] = 1.0  # constant rows normalize to zero
    xn = ((x - hi) + (x - lo)) / span
    xn[flat] = 0.0
    c = np.clip(xn, -1.0, 1.0)
    s = np.sqrt(1.0 - c * c)
    code = _backend.GAF_SUMMATION if kind is GafKind.GASF else _backend.GAF_DIFFERENCE
    return _backend.gaf_batch(c, s, code)


def to_png(image: GafImage | np.ndarray, path) -> None:
    """Write a field matrix as a grayscale PNG.

    Fixed linear mapping [-1, 1] -> [0, 255]: v -> rint((v + 1) * 127.5)
    (so -1 -> 0, 0 -> 128, 1 -> 255), one pixel per matrix entry.
    """
    m = image.matrix if isinstance(image, GafImage) else np.asarray(image)
    if m.ndim != 2:
        raise ValueError(f"expected a single N x N matrix, got shape {m.shape}")
    gray = np.rint((m.astype(np.float64) + 1.0) * 127.5)
    gray = np.clip(gray, 0, 255).astype(np.uint8)
    Image.fromarray(gray, mode="L").save(path, format="PNG")

"""Anomalous-diffusion trajectory synthesis and Gramian Angular Field encoding.

Simulates five diffusive regimes (ATTM, CTRW, FBM, LW, SBM), encodes short
trajectories as GASF/GADF images, and provides the estimation oracles,
dataset pipeline, and evaluation metrics for training and scoring
vision-based regime classifiers and exponent regressors.
"""

from ._backend import backend_name
from .rng import RngStream
from .simulators import (
    DiffusionModelKind,
    Trajectory,
    simulate,
    simulate_attm,
    simulate_ctrw,
    simulate_fbm,
    simulate_lw,
    simulate_sbm,
)

__version__ = "0.1.0"

__all__ = [
    "DiffusionModelKind",
    "RngStream",
    "Trajectory",
    "backend_name",
    "simulate",
    "simulate_attm",
    "simulate_ctrw",
    "simulate_fbm",
    "simulate_lw",
    "simulate_sbm",
    "__version__",
]

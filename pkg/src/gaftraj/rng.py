"""Seedable, forkable random streams for reproducible parallel generation.

Every stochastic routine in the package draws from an explicit RngStream
instead of global state, so results depend only on (master_seed,
stream_index) and never on scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["RngStream"]

_U64 = 2**64


@dataclass(frozen=True)
class RngStream:
    """Addressable random stream.

    Streams with equal (master_seed, stream_index, subkey) produce identical
    draw sequences; streams differing in any component are statistically
    independent (PCG64 seeded through numpy's SeedSequence).
    """

    master_seed: int
    stream_index: int = 0
    subkey: tuple[int, ...] = ()

    def __post_init__(self):
        for word in (self.master_seed, self.stream_index, *self.subkey):
            if not 0 <= int(word) < _U64:
                raise ValueError(f"seed word {word} outside unsigned 64-bit range")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence([self.master_seed, self.stream_index, *self.subkey])
        return np.random.default_rng(seq)

    def child(self, tag: int) -> "RngStream":
        """Independent substream addressed by an integer tag."""
        return RngStream(self.master_seed, self.stream_index, self.subkey + (int(tag),))

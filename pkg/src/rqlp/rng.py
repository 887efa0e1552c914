"""Seeded standard-normal matrices with a fixed, documented byte stream.

The generator is numpy's Philox-4x64 counter-based bit generator keyed by
the seed.  Each normal draw consumes exactly two raw 64-bit words (u1, u2)
and applies the cosine branch of Box-Muller:

    U1 = ((u1 >> 11) + 1) * 2**-53        in (0, 1]
    U2 = (u2 >> 11) * 2**-53              in [0, 1)
    x  = sqrt(-2 log U1) * cos(2 pi U2)

Only one output per pair is kept so the stream position is always an exact
number of draws.  Matrices are filled in column-major order.
"""
import numpy as np

_TWO_POW_M53 = 2.0 ** -53


class SeededGaussianSource:
    """Single-owner stream of standard normal draws.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit seed.
    stream : int, optional
        Independent sub-stream index; ``split`` hands these out.
    """

    def __init__(self, seed, stream=0):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = seed
        self.stream = int(stream)
        key = np.random.SeedSequence([seed & 0xFFFFFFFF, seed >> 32, self.stream]).generate_state(2, np.uint64)
        self._bitgen = np.random.Philox(key=key)
        self.draws = 0

    def split(self, stream):
        """Fresh source on an independent stream with the same seed."""
        return SeededGaussianSource(self.seed, stream)

    def normals(self, count):
        raw = self._bitgen.random_raw(2 * count).reshape(count, 2)
        u1 = ((raw[:, 0] >> np.uint64(11)).astype(np.float64) + 1.0) * _TWO_POW_M53
        u2 = (raw[:, 1] >> np.uint64(11)).astype(np.float64) * _TWO_POW_M53
        self.draws += count
        return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def gaussian_matrix(source, rows, cols):
    """``rows x cols`` matrix of i.i.d. N(0, 1) entries, column-major fill."""
    if rows < 1 or cols < 1:
        raise ValueError(f"dimensions must be positive, got {rows}x{cols}")
    return source.normals(rows * cols).reshape((rows, cols), order="F")

"""Deterministic random streams.

Every randomized construction in the package takes an explicit integer seed
and derives all of its randomness from `seeded_rng`, so builds are pure
functions of (input, seed).
"""

from __future__ import annotations

import numpy as np


def seeded_rng(*key: int) -> np.random.Generator:
    """Return a Generator determined entirely by the integer key sequence.

    Sub-streams are derived by appending indices, e.g. seeded_rng(seed, k)
    for the k-th independent sample of a Monte-Carlo run. Negative seeds
    are reduced to their unsigned 64-bit representation.
    """
    words = [int(k) & 0xFFFFFFFFFFFFFFFF for k in key]
    return np.random.default_rng(np.random.SeedSequence(words))

"""Seeded random streams.

Every random draw in the package goes through :func:`generator`, which keys a
Philox counter-based generator on ``(seed, stream)``.  Distinct stream names
give statistically independent draws for the same integer seed, so a trial
seed can drive the diagonal, the signal and the noise without correlation.
"""

import zlib

import numpy as np

_SEED_MOD = 2**64


def generator(seed, stream=""):
    seed = int(seed) % _SEED_MOD
    key = zlib.crc32(stream.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(key,))
    return np.random.Generator(np.random.Philox(ss))

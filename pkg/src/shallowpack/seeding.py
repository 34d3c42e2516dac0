"""Deterministic seed derivation.

All randomness in the package flows from a single 64-bit master seed through
``spawn(seed, label, *indices)``: the label is hashed with CRC-32 and fed,
together with the integer indices, into numpy's SeedSequence.  Identical
(seed, label, indices) triples yield identical streams, independent of call
order, which is what makes per-trial parallelism deterministic.
"""

import zlib

import numpy as np


def spawn(seed: int, label: str, *indices: int) -> np.random.Generator:
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, zlib.crc32(label.encode("utf-8"))]
    entropy.extend(int(i) for i in indices)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))

"""Independent random streams derived from one 64-bit seed.

Each stream is keyed by a fixed (stream id, index) pair passed as the
``spawn_key`` of a :class:`numpy.random.SeedSequence`, so the values drawn for
one tensor never depend on how many values another tensor consumed.
"""

import numpy as np

STREAM_IDS = {
    "W_embed": 0,
    "W_gcn": 1,
    "W_proj": 2,
    "shuffle": 3,
    "synthetic": 4,
}


def stream(seed: int, name: str, index: int = 0) -> np.random.Generator:
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    sequence = np.random.SeedSequence(
        entropy=seed, spawn_key=(STREAM_IDS[name], index)
    )
    return np.random.default_rng(sequence)


def glorot_uniform(
    rng: np.random.Generator, fan_in: int, fan_out: int
) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))

"""Deterministic labeled random streams.

Every random decision in the pipeline draws from a stream addressed by a
key path rooted at a single master seed, e.g.::

    rng = substream(master_seed, "iteration", 3, "smote")

The key path is mixed into a ``numpy.random.SeedSequence`` spawn key, so
streams are independent of the order in which they are created and stable
across processes.  String labels are hashed with CRC-32, which is stable
across Python versions (unlike ``hash``).
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["seed_sequence", "substream", "stream_seed"]


def _key_to_ints(key: tuple) -> tuple[int, ...]:
    parts = []
    for item in key:
        if isinstance(item, str):
            parts.append(zlib.crc32(item.encode("utf-8")))
        elif isinstance(item, (int, np.integer)):
            parts.append(int(item) & 0xFFFFFFFF)
        else:
            raise TypeError(f"stream labels must be str or int, got {type(item)!r}")
    return tuple(parts)


def seed_sequence(master_seed: int, *key: int | str) -> np.random.SeedSequence:
    """SeedSequence for the stream addressed by ``key`` under ``master_seed``."""
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=_key_to_ints(key))


def substream(master_seed: int, *key: int | str) -> np.random.Generator:
    """Generator for the stream addressed by ``key`` under ``master_seed``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(master_seed, *key)))


def stream_seed(master_seed: int, *key: int | str) -> int:
    """A 64-bit integer seed derived from the addressed stream.

    Used to hand deterministic seeds to compiled kernels that keep their
    own lightweight generator state.
    """
    state = seed_sequence(master_seed, *key).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 32 | int(state[1])

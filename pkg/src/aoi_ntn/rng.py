"""Deterministic per-purpose random streams derived from one root seed."""
import zlib

import numpy as np


def _key(part):
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    return int(part)


def stream(seed, *keys):
    """Return a ``Generator`` keyed by ``(seed, *keys)``.

    Keys may be ints or strings. Streams with different keys are
    statistically independent, so one consumer drawing more numbers never
    shifts another consumer's draws.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, *keys):
    """Collapse ``(seed, *keys)`` into a fresh 63-bit integer seed."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key(k) for k in keys))
    hi, lo = ss.generate_state(2, dtype=np.uint32)
    return (int(hi) << 31) ^ int(lo)

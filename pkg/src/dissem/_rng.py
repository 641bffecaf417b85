"""Splittable deterministic randomness.

Every random stream in the package is derived from one integer seed plus a
path of integer keys, so independent consumers never share state and results
do not depend on call order or thread scheduling.
"""

import random

import numpy as np


def spawn(seed: int, *keys: int) -> random.Random:
    """Return a ``random.Random`` for the child stream ``seed/keys``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    state = ss.generate_state(4, dtype=np.uint32)
    return random.Random(int.from_bytes(state.tobytes(), "little"))


def child_seed(seed: int, *keys: int) -> int:
    """Derive a plain integer seed for the child stream ``seed/keys``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0])

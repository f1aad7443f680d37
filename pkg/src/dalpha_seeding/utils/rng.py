"""
Seedable, counter-based random streams.

Every random draw in the package comes from a ``numpy.random.Generator``
backed by the Philox counter-based bit generator. Independent streams are
derived from a 64-bit seed plus an integer key path through
``SeedSequence(seed, spawn_key=key)``, so the stream for
``(seed, key)`` is the same no matter which process or in which order it is
created.

Key conventions used across the package:

- instance generation: ``(seed, 0)`` drives component choice, ``(seed, 1 + j)``
  drives component ``j``;
- experiment trials: ``(base_seed, trial)`` drives seeding for that trial and
  is shared by every (alpha, method) pair, so sweeps use common random numbers;
- per-trial instance regeneration: the instance seed is
  ``derive_seed(instance_seed, trial)``.
"""

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """
    Build the random stream identified by ``seed`` and an integer key path.

    Args:
        seed: Non-negative base seed
        *key: Child indices identifying the stream

    Returns:
        A Philox-backed generator
    """
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *key: int) -> int:
    """Derive a 64-bit integer seed for the child stream ``(seed, *key)``."""
    sequence = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])

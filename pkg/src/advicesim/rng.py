"""Seed derivation and generator construction.

Every random draw in the package goes through :func:`make_rng`, which wraps
numpy's counter-based Philox bit generator.  Per-trial seeds come from
:func:`derive_seed`, a keyed hash of the base seed and the trial key, so a
trial's stream does not depend on which worker runs it or in what order.
"""

import hashlib
import os

import numpy as np

SEED_ENV = "ADVICESIM_SEED"


def default_seed() -> int:
    """Seed used when none is given: ``$ADVICESIM_SEED`` or 0."""
    value = os.environ.get(SEED_ENV)
    return int(value) if value not in (None, "") else 0


def derive_seed(base_seed: int, *keys) -> int:
    """Hash ``(base_seed, *keys)`` to a 63-bit non-negative integer."""
    h = hashlib.blake2b(digest_size=8)
    h.update(repr((int(base_seed),) + tuple(keys)).encode())
    return int.from_bytes(h.digest(), "big") >> 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))

"""Deterministic random-stream derivation for experiment runners.

Every Monte Carlo loop in this package draws from a generator derived as

    derive_rng(master_seed, *key)

where ``key`` identifies the trial (for example ``(cell_index, trial_index)``).
Streams for distinct keys are statistically independent and do not depend on
the order in which they are created, so parallel and serial runs of the same
experiment produce byte-identical output.
"""

from __future__ import annotations

import numpy as np

__all__ = ["derive_rng"]


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Return a Generator for the stream identified by ``(master_seed, *key)``."""
    if master_seed < 0:
        raise ValueError("master_seed must be a nonnegative integer")
    seq = np.random.SeedSequence([int(master_seed), *[int(k) for k in key]])
    return np.random.default_rng(seq)

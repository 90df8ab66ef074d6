"""
Seed derivation for Monte-Carlo runs.

Every run gets its own generator derived from the master seed and the run
counter, so adding runs never changes the draws of earlier runs and runs can
execute in any order or process.
"""

import numpy as np


def run_seed_sequence(master_seed: int, run_index: int) -> np.random.SeedSequence:
    """Seed sequence of run ``run_index``."""
    if master_seed < 0 or run_index < 0:
        raise ValueError("Seeds and run indices must be non-negative")
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(run_index,))


def run_generator(master_seed: int, run_index: int) -> np.random.Generator:
    """Independent generator of run ``run_index``."""
    return np.random.default_rng(run_seed_sequence(master_seed, run_index))

"""Seeded random streams, one independent Philox stream per run component."""

import numpy as np

COMPONENTS = {"environment": 0, "sampling": 1}


def stream(seed: int, component: str) -> np.random.Generator:
    key = np.random.SeedSequence(int(seed), spawn_key=(COMPONENTS[component],))
    return np.random.Generator(np.random.Philox(key))

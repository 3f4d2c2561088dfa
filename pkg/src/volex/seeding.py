"""Deterministic seed derivation.

Every random draw in the package flows from a master seed through
``SeedSequence`` spawn keys, so independent components (environment
generation, start placement, per-robot planning, Monte-Carlo sampling)
get decorrelated streams that are reproducible and order-independent.
"""

import numpy as np

# Fixed domain tags so different consumers of the same master seed never
# collide even with equal numeric subkeys.
DOMAIN_ENVIRONMENT = 1
DOMAIN_START = 2
DOMAIN_PLAN = 3
DOMAIN_VIEWS = 4
DOMAIN_ROUNDS = 5
DOMAIN_SAMPLES = 6


def seed_sequence(master, *key):
    return np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in key))


def derive_seed(master, *key):
    """A single 64-bit seed derived from the master seed and a key path."""
    state = seed_sequence(master, *key).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


def derive_rng(master, *key):
    return np.random.default_rng(seed_sequence(master, *key))

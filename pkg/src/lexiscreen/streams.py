"""Deterministic random stream derivation.

All stochastic behaviour in the package flows through named streams derived
from a single user seed.  Derivation uses numpy's SeedSequence over the tuple
(seed, family, index) so that independent consumers (trees of a forest,
bootstrap repeats, folds, synthetic records) draw from non-overlapping
streams, and so that the work one consumer does never shifts the stream of
another.  That property is what makes results independent of thread count
and of the order in which units of work are scheduled.
"""

from __future__ import annotations

import numpy as np

# Stream family tags.  Values are arbitrary but frozen: changing one changes
# every downstream result.
TREES = 1
BOOTSTRAP = 2
FOLDS = 3
SYNTH = 4
SEARCH = 5


def generator(seed: int, family: int, index: int = 0) -> np.random.Generator:
    """Return the PCG64 generator for stream (seed, family, index)."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, family, index))))


def derive_seed(seed: int, family: int, index: int = 0) -> int:
    """Collapse a stream identity into a plain integer seed, for handing to
    components that take a single seed (for example per-fold forest fits)."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return int(np.random.SeedSequence((seed, family, index)).generate_state(1)[0])

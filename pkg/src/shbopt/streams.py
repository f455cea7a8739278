"""Counter-based random streams.

Every random draw an experiment makes is taken from a Philox generator
keyed by the triple (run seed, iteration, purpose).  Distinct triples give
disjoint, statistically independent streams, and any triple can be replayed
in isolation.  That is what lets the direct and reformulated momentum
recursions consume byte-identical randomness, and it makes runs reproducible
across platforms (Philox is a counter-based generator with a fixed stream).
"""

from __future__ import annotations

import numpy as np

# purpose tags; must stay < 256 so they pack into the low byte of the key
GRAD_NOISE = 1
FUNC_NOISE = 2
MASK = 3
PERTURB = 4
INIT = 5
TRIAL = 6


def stream(seed: int, t: int = 0, purpose: int = 0) -> np.random.Generator:
    """Fresh generator for the (seed, iteration, purpose) triple."""
    if t < 0 or purpose < 0 or purpose > 255:
        raise ValueError(f"bad stream coordinates t={t}, purpose={purpose}")
    key = np.empty(2, dtype=np.uint64)
    key[0] = np.uint64(seed % (1 << 64))
    key[1] = (np.uint64(t) << np.uint64(8)) | np.uint64(purpose)
    return np.random.Generator(np.random.Philox(key=key))

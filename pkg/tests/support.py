"""Helpers shared across test modules."""
import numpy as np

from fluxpair.reduction import CircuitSpec

#: (criterion, passed, detail) tuples filled in by the acceptance suite.
ACCEPTANCE_RESULTS = []


def random_circuit(seed, max_ratio=0.1):
    """Positive-element circuit with L_M / min(L_A, L_B) in [1e-4, max_ratio]."""
    rng = np.random.default_rng(seed)
    L_A, L_B = rng.uniform(30.0, 200.0, 2)
    ratio = 10 ** rng.uniform(-4, np.log10(max_ratio))
    caps = rng.uniform(1.0, 25.0, 8)
    return CircuitSpec(L_A, L_B, ratio * min(L_A, L_B), *caps, *rng.uniform(3.0, 8.0, 2))

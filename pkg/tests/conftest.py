import json
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for `oracles` imports in tests

from metric_pairs import MetricPair, validate_metric

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def derived():
    return json.loads((FIXTURES / "derived_examples.json").read_text())


def closure_of(weights):
    d = np.asarray(weights, dtype=float).copy()
    np.fill_diagonal(d, 0.0)
    n = len(d)
    changed = True
    while changed:
        changed = False
        for k in range(n):
            via = d[:, k][:, None] + d[k, :][None, :]
            better = via < d
            if better.any():
                d[better] = via[better]
                changed = True
    return d


def random_space(rng, n, lo=0.1, hi=10.0, tol=None):
    w = rng.uniform(lo, hi, size=(n, n))
    w = (w + w.T) / 2.0
    return validate_metric(closure_of(w), tol=tol)


def random_subset(rng, n, k=None):
    if k is None:
        k = int(rng.integers(1, n + 1))
    return sorted(rng.choice(n, size=k, replace=False).tolist())


def random_pair(rng, n_lo=3, n_hi=5, lo=0.1, hi=10.0):
    n = int(rng.integers(n_lo, n_hi + 1))
    space = random_space(rng, n, lo, hi)
    return MetricPair(space, space.subset(random_subset(rng, n)))


def jittered_copy(space, rng, scale):
    """A second space whose distances differ from the first by less than scale."""
    n = len(space)
    jit = rng.uniform(-scale / 2, scale / 2, size=(n, n))
    jit = (jit + jit.T) / 2.0
    np.fill_diagonal(jit, 0.0)
    return validate_metric(closure_of(space.dist + jit))


def line_space(coords, tol=None):
    coords = np.asarray(coords, dtype=float)
    return validate_metric(np.abs(coords[:, None] - coords[None, :]), tol=tol)

import numpy as np
import pytest

from puamo import build_walk, walk_params

# golden-mean convergents used throughout: denominator -> numerator
FIB = {3: 2, 5: 3, 8: 5, 13: 8, 21: 13, 34: 21, 55: 34, 89: 55,
       144: 89, 233: 144, 377: 233, 610: 377}


def fib_params(l1, l2, n_cells, **kw):
    """Walk parameters with phi snapped to the golden approximant p/N."""
    return walk_params(l1, l2, phi=FIB[n_cells] / n_cells, **kw)


def ring_eigenvalues(params, n_cells):
    return np.linalg.eigvals(build_walk(params, n_cells, warn=False).matrix)


def median_ring_eigenvalue(params, n_cells):
    """Deterministic on-spectrum sample: eigenvalue of median modulus."""
    eigs = ring_eigenvalues(params, n_cells)
    radii = np.abs(eigs)
    return complex(eigs[int(np.argmin(np.abs(radii - np.median(radii))))])


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)

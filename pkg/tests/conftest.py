import numpy as np
import pytest

from grushinlab.lti import StateSpaceSystem


@pytest.fixture
def s2():
    """Rotation generator with scalar input in the second coordinate."""
    return StateSpaceSystem(a=[[0, 1], [-1, 0]], b=[[0], [1]], skew_adjoint=True)


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_system(rng, n, m, p=None, feedthrough=False, scale=1.0):
    p = m if p is None else p
    a = scale * crandn(rng, n, n) / np.sqrt(n)
    b = crandn(rng, n, m)
    c = crandn(rng, p, n)
    d = crandn(rng, p, m) if feedthrough else None
    return StateSpaceSystem(a=a, b=b, c=c, d=d)


def random_skew(rng, freqs):
    """Skew-adjoint matrix with eigenvalues i*freqs and a random unitary basis."""
    n = len(freqs)
    q, _ = np.linalg.qr(crandn(rng, n, n))
    return q @ np.diag(1j * np.asarray(freqs)) @ q.conj().T, q

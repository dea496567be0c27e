import numpy as np
import pytest

from dyadlab import model


def _mixed_ab():
    # (a, b) -> (b, 1-a)
    return model.Tpm2([model.DyadState(s.b, 1 - s.a).index for s in model.ALL_STATES])


def _mixed_ba():
    # (a, b) -> (1-b, a)
    return model.Tpm2([model.DyadState(1 - s.b, s.a).index for s in model.ALL_STATES])


@pytest.fixture
def cross_coupled_tpms():
    """All four deterministic rules where each unit reads the other."""
    return [model.swap(), model.not_swap(), _mixed_ab(), _mixed_ba()]


@pytest.fixture
def rng():
    return np.random.default_rng(20240816)


def random_density(rng, dim, rank=None):
    """Random mixed state from a rank-limited ensemble of Haar-ish vectors."""
    rank = dim if rank is None else rank
    weights = rng.random(rank)
    weights /= weights.sum()
    rho = np.zeros((dim, dim), dtype=complex)
    for w in weights:
        v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        v /= np.linalg.norm(v)
        rho += w * np.outer(v, v.conj())
    return 0.5 * (rho + rho.conj().T)


def random_pure(rng, dim):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)

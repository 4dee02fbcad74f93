import numpy as np
import pytest

from protmeas import OscillatorBasis, StateVector


@pytest.fixture
def basis():
    return OscillatorBasis(dim=64)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_state(rng, basis) -> StateVector:
    amps = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
    return StateVector(amps, basis)


def random_hermitian(rng, dim) -> np.ndarray:
    M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (M + M.conj().T)

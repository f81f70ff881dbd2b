from __future__ import annotations

import numpy as np
import pytest

from murel.linalg import PureState, herm_eig


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (z + z.conj().T) / 2.0


def random_state_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def random_pure(dim: int, rng: np.random.Generator) -> PureState:
    return PureState(random_state_vector(dim, rng))


def random_integer_spectrum_observable(
    dim: int, rng: np.random.Generator, low: int = 0, high: int = 2
):
    """Hermitian with integer eigenvalues in [low, high] and a Haar-ish eigenbasis."""
    values = np.sort(rng.integers(low, high + 1, size=dim)).astype(float)
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    q = q * np.where(np.abs(d) > 0, d / np.abs(np.where(np.abs(d) > 0, d, 1)), 1.0)
    return herm_eig((q * values) @ q.conj().T)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260817)

import numpy as np
import pytest

from hwsteer import PhaseSet


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_phase_set(d: int, rng: np.random.Generator) -> PhaseSet:
    """Random zero-column-sum phase table (not necessarily admissible)."""
    return PhaseSet.from_free(d, rng.uniform(-np.pi, np.pi, (d - 1, d)))


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260821)

import numpy as np
import pytest


def series_expm(M: np.ndarray, terms: int = 30) -> np.ndarray:
    """Independent scaling-and-squaring Taylor exponential (test oracle)."""
    M = np.asarray(M, dtype=float)
    norm = np.linalg.norm(M)
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-300)))) + 2) if norm > 0.5 else 0
    S = M / (2.0**squarings)
    out = np.eye(M.shape[0])
    term = np.eye(M.shape[0])
    for k in range(1, terms + 1):
        term = term @ S / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240813)


@pytest.fixture
def series_exp():
    return series_expm

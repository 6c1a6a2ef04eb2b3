"""Shared test oracles, independent of the library's internals.

Dense matrices here are built by explicit Kronecker products so they can
cross-check the library's matrix-free kernels and column-fill assembly.
"""

import numpy as np
import pytest

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_word(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word via Kronecker products (leftmost = qubit 0)."""
    matrix = np.array([[1.0 + 0j]])
    for label in word:
        matrix = np.kron(matrix, PAULI_MATRICES[label])
    return matrix


def kron_operator(terms, n: int) -> np.ndarray:
    """Dense matrix of sum_i c_i P_i from (coefficient, word) pairs."""
    matrix = np.zeros((2**n, 2**n), dtype=complex)
    for coeff, word in terms:
        matrix += coeff * kron_word(word)
    return matrix


def random_state(n: int, rng) -> np.ndarray:
    state = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return state / np.linalg.norm(state)


@pytest.fixture
def rng():
    return np.random.default_rng(20240901)

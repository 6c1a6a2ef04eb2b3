"""Exact spectral oracle: dense eigendecomposition and exact dynamics.

Everything here is ground truth.  Time evolution goes through the full
Hermitian eigendecomposition (no iteration tolerance), which doubles as the
desk-scale substitute for hardware state preparation: exact evolution also
produces the Krylov basis columns and the transition-probability sampling
distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .operators import (
    DEFAULT_DENSE_LIMIT,
    PauliSumOperator,
    operator_hash,
    to_dense_matrix,
)
from .series import CorrelationSeries, TimeGrid


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    qubit_count: int

    @property
    def dim(self) -> int:
        return 1 << self.qubit_count


class GroundState(NamedTuple):
    energy: float
    state: np.ndarray
    degenerate: bool


def basis_state(bits: str) -> np.ndarray:
    """Computational basis state for a bitstring (leftmost bit = qubit 0)."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValueError(f"invalid bitstring {bits!r}")
    state = np.zeros(1 << len(bits), dtype=complex)
    state[int(bits, 2)] = 1.0
    return state


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # Deterministic gauge: largest-magnitude component of each column made
    # real positive (first such component on exact ties).
    lead_rows = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[lead_rows, np.arange(vectors.shape[1])]
    return vectors * (lead.conj() / np.abs(lead))


def eig_decompose(
    op: PauliSumOperator, max_qubits: int = DEFAULT_DENSE_LIMIT
) -> SpectralDecomposition:
    """Full Hermitian eigendecomposition with a reproducible gauge."""
    matrix = to_dense_matrix(op, max_qubits=max_qubits)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    return SpectralDecomposition(
        eigenvalues=eigenvalues,
        eigenvectors=_fix_phases(eigenvectors),
        qubit_count=op.qubit_count,
    )


def _check_state(decomp: SpectralDecomposition, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (decomp.dim,):
        raise ValueError(f"state has shape {state.shape}, expected ({decomp.dim},)")
    return state


def evolve_exact(decomp: SpectralDecomposition, state: np.ndarray, t) -> np.ndarray:
    """exp(-iHt)|v> via the eigenbasis; t may be a scalar or a 1-D array.

    Returns shape (dim,) for scalar t and (dim, len(t)) for an array.
    Negative times are allowed.
    """
    state = _check_state(decomp, state)
    proj = decomp.eigenvectors.conj().T @ state
    t_arr = np.asarray(t, dtype=float)
    phases = np.exp(-1j * np.outer(decomp.eigenvalues, t_arr.reshape(-1)))
    out = decomp.eigenvectors @ (phases * proj[:, None])
    return out[:, 0] if t_arr.ndim == 0 else out


def ground_state(decomp: SpectralDecomposition, gap_tol: float = 1e-10) -> GroundState:
    """Lowest eigenpair; flags degeneracy when the first gap is below gap_tol."""
    eigenvalues = decomp.eigenvalues
    degenerate = len(eigenvalues) > 1 and (eigenvalues[1] - eigenvalues[0]) < gap_tol
    return GroundState(
        energy=float(eigenvalues[0]),
        state=decomp.eigenvectors[:, 0].copy(),
        degenerate=degenerate,
    )


def exact_autocorrelation(
    decomp: SpectralDecomposition, v0: np.ndarray, grid: TimeGrid
) -> CorrelationSeries:
    """C(t) = <v0|exp(-iHt)|v0> = sum_f |<E_f|v0>|^2 exp(-i E_f t)."""
    v0 = _check_state(decomp, v0)
    weights = np.abs(decomp.eigenvectors.conj().T @ v0) ** 2
    phases = np.exp(-1j * np.outer(grid.times, decomp.eigenvalues))
    return CorrelationSeries(grid, phases @ weights)


def transition_probabilities(
    decomp: SpectralDecomposition, v0: np.ndarray, t: float
) -> np.ndarray:
    """p(x) = |<x|exp(-iHt)|v0>|^2 over all basis bitstrings (sums to 1)."""
    evolved = evolve_exact(decomp, v0, float(t))
    return np.abs(evolved) ** 2


def fidelity(exact_state: np.ndarray, approx_state: np.ndarray) -> float:
    """|<exact|approx>|^2 in [0, 1], invariant under global phases.

    Both arguments are renormalized internally; a (near-)zero-norm input is
    an error.
    """
    exact_state = np.asarray(exact_state, dtype=complex)
    approx_state = np.asarray(approx_state, dtype=complex)
    if exact_state.shape != approx_state.shape:
        raise ValueError(
            f"state shapes differ: {exact_state.shape} vs {approx_state.shape}"
        )
    norm_exact = np.linalg.norm(exact_state)
    norm_approx = np.linalg.norm(approx_state)
    if norm_approx < 1e-12 or norm_exact < 1e-12:
        raise ValueError("zero-norm state in fidelity")
    overlap = np.vdot(exact_state, approx_state) / (norm_exact * norm_approx)
    return float(np.abs(overlap) ** 2)


def decomposition_cache_key(op: PauliSumOperator) -> str:
    """Key for caching a decomposition, derived from the operator content."""
    return operator_hash(op)


def save_decomposition(path, decomp: SpectralDecomposition) -> None:
    np.savez(
        path,
        eigenvalues=decomp.eigenvalues,
        eigenvectors=decomp.eigenvectors,
        qubit_count=decomp.qubit_count,
    )


def load_decomposition(path) -> SpectralDecomposition:
    data = np.load(path)
    return SpectralDecomposition(
        eigenvalues=data["eigenvalues"],
        eigenvectors=data["eigenvectors"],
        qubit_count=int(data["qubit_count"]),
    )

"""Deterministic spin-model Hamiltonians for tests, demos, and bundled runs."""

from __future__ import annotations

import numpy as np

from .operators import PAULI_LABELS, PauliString, PauliSumOperator


def _chain_word(n: int, placements: dict[int, str]) -> PauliString:
    labels = ["I"] * n
    for site, label in placements.items():
        labels[site] = label
    return PauliString("".join(labels))


def heisenberg_chain(n: int) -> PauliSumOperator:
    """Open chain sum_j (X_j X_{j+1} + Y_j Y_{j+1} + Z_j Z_{j+1})."""
    if n < 2:
        raise ValueError(f"chain needs n >= 2, got {n}")
    terms = []
    for j in range(n - 1):
        for label in "XYZ":
            terms.append((1.0, _chain_word(n, {j: label, j + 1: label})))
    return PauliSumOperator(terms)


def tfim_chain(n: int, g: float = 1.0) -> PauliSumOperator:
    """Transverse-field Ising chain -sum_j Z_j Z_{j+1} - g sum_j X_j."""
    if n < 2:
        raise ValueError(f"chain needs n >= 2, got {n}")
    terms = [(-1.0, _chain_word(n, {j: "Z", j + 1: "Z"})) for j in range(n - 1)]
    if g != 0.0:
        terms += [(-float(g), _chain_word(n, {j: "X"})) for j in range(n)]
    return PauliSumOperator(terms)


def random_pauli_operator(n: int, terms: int = 5, seed: int = 0) -> PauliSumOperator:
    """Distinct non-identity Pauli words with coefficients uniform in [-1, 1]."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not 1 <= terms <= 4**n - 1:
        raise ValueError(f"terms must be in [1, {4**n - 1}] for {n} qubits, got {terms}")
    rng = np.random.default_rng(seed)
    words: list[str] = []
    seen = set()
    while len(words) < terms:
        word = "".join(PAULI_LABELS[k] for k in rng.integers(0, 4, size=n))
        if word in seen or word == "I" * n:
            continue
        seen.add(word)
        words.append(word)
    coefficients = rng.uniform(-1.0, 1.0, size=terms)
    return PauliSumOperator([(c, PauliString(w)) for c, w in zip(coefficients, words)])


def generate_test_hamiltonian(
    kind: str, n: int, params: dict | None = None, seed: int = 0
) -> PauliSumOperator:
    """Dispatch on kind in {heisenberg, tfim, random_pauli}."""
    params = params or {}
    if kind == "heisenberg":
        return heisenberg_chain(n)
    if kind == "tfim":
        return tfim_chain(n, g=params.get("g", 1.0))
    if kind == "random_pauli":
        return random_pauli_operator(n, terms=params.get("terms", 5), seed=seed)
    raise ValueError(f"unknown model kind {kind!r}")

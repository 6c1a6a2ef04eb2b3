"""N-qubit Pauli strings and real-weighted Pauli-sum operators.

Bit ordering convention used throughout the package: the leftmost character
of a Pauli word acts on qubit 0, and qubit 0 is the most significant bit of
the computational-basis index.  A bitstring x = x_0 x_1 ... x_{N-1} labels
the basis index sum_k x_k * 2**(N-1-k).

State vectors are plain complex numpy arrays of length 2**N; the qubit count
is implied by the length.
"""

from __future__ import annotations

import hashlib

import numpy as np

PAULI_LABELS = "IXYZ"

#: Largest qubit count for which dense 2^N x 2^N matrices are built by default.
DEFAULT_DENSE_LIMIT = 14


class PauliParseError(ValueError):
    """Malformed Pauli-sum text (bad coefficient, bad label, empty input)."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class PauliString:
    """Tensor product of single-qubit Pauli operators, e.g. ``"XZI"``.

    A Pauli word acts on a state vector as a permutation of basis indices
    (one XOR mask, from the X/Y positions) times a per-index phase in
    {+1, -1, +i, -i} (sign from the Y/Z positions, overall i**n_Y).  Both
    are precomputed so application never materializes a matrix.
    """

    __slots__ = ("labels", "qubit_count", "_flip_mask", "_sign_mask", "_y_count")

    def __init__(self, labels: str):
        if not labels:
            raise ValueError("empty Pauli word")
        bad = set(labels) - set(PAULI_LABELS)
        if bad:
            raise ValueError(f"invalid Pauli labels {sorted(bad)} in {labels!r}")
        self.labels = labels
        self.qubit_count = len(labels)
        flip = 0
        sign = 0
        y_count = 0
        for k, ch in enumerate(labels):
            bit = 1 << (self.qubit_count - 1 - k)
            if ch in "XY":
                flip |= bit
            if ch in "YZ":
                sign |= bit
            if ch == "Y":
                y_count += 1
        self._flip_mask = flip
        self._sign_mask = sign
        self._y_count = y_count

    def phases(self, indices: np.ndarray) -> np.ndarray:
        """Phase picked up by each input basis index under this word."""
        parity = np.bitwise_count(indices & self._sign_mask) & 1
        return (1j ** self._y_count) * (1.0 - 2.0 * parity)

    @property
    def flip_mask(self) -> int:
        return self._flip_mask

    def __eq__(self, other) -> bool:
        return isinstance(other, PauliString) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        return f"PauliString({self.labels!r})"


class PauliSumOperator:
    """Hermitian operator sum_i h_i P_i with real coefficients h_i.

    Terms are kept in canonical deduplicated form: no two terms share a
    Pauli word, duplicates being merged by coefficient addition.  Since the
    coefficients are real and Pauli words are Hermitian, Hermiticity holds
    by construction.
    """

    __slots__ = ("qubit_count", "terms")

    def __init__(self, terms):
        merged: dict[str, float] = {}
        strings: dict[str, PauliString] = {}
        qubit_count = None
        for coeff, string in terms:
            try:
                coeff = float(coeff)
            except (TypeError, ValueError):
                raise ValueError(f"coefficient {coeff!r} is not a real number") from None
            if not np.isfinite(coeff):
                raise ValueError(f"non-finite coefficient {coeff!r}")
            if not isinstance(string, PauliString):
                string = PauliString(string)
            if qubit_count is None:
                qubit_count = string.qubit_count
            elif string.qubit_count != qubit_count:
                raise ValueError(
                    f"inconsistent Pauli word lengths: {string.qubit_count} vs {qubit_count}"
                )
            if string.labels in merged:
                merged[string.labels] += coeff
            else:
                merged[string.labels] = coeff
                strings[string.labels] = string
        if qubit_count is None:
            raise ValueError("empty operator")
        self.qubit_count = qubit_count
        self.terms = [(merged[w], strings[w]) for w in merged]

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PauliSumOperator)
            and self.qubit_count == other.qubit_count
            and self.terms == other.terms
        )

    def __repr__(self) -> str:
        parts = " + ".join(f"{c:g}*{s.labels}" for c, s in self.terms[:4])
        more = "" if len(self.terms) <= 4 else f" + ... ({len(self.terms)} terms)"
        return f"PauliSumOperator({parts}{more})"


def parse_pauli_sum(text: str, expected_qubits: int | None = None) -> PauliSumOperator:
    """Parse the Pauli-sum text format into a canonical operator.

    One term per line, ``<coefficient> <pauli-word>``; the coefficient is a
    decimal real (scientific notation allowed), the word a string over
    {I, X, Y, Z}.  ``#`` starts a comment; blank lines are ignored.
    Duplicate words are merged by coefficient addition.
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 2:
            raise PauliParseError("expected '<coefficient> <pauli-word>'", lineno)
        try:
            coeff = float(fields[0])
        except ValueError:
            raise PauliParseError(f"bad coefficient {fields[0]!r}", lineno) from None
        if not np.isfinite(coeff):
            raise PauliParseError(f"non-finite coefficient {fields[0]!r}", lineno)
        try:
            string = PauliString(fields[1])
        except ValueError as exc:
            raise PauliParseError(str(exc), lineno) from None
        if expected_qubits is not None and string.qubit_count != expected_qubits:
            raise PauliParseError(
                f"word {fields[1]!r} has {string.qubit_count} qubits, expected {expected_qubits}",
                lineno,
            )
        terms.append((coeff, string))
    if not terms:
        raise PauliParseError("empty operator")
    try:
        return PauliSumOperator(terms)
    except ValueError as exc:
        raise PauliParseError(str(exc)) from None


def serialize_pauli_sum(op: PauliSumOperator) -> str:
    """Inverse of :func:`parse_pauli_sum` on canonical operators."""
    return "\n".join(f"{c:.17g} {s.labels}" for c, s in op.terms) + "\n"


def operator_hash(op: PauliSumOperator) -> str:
    """Content hash, invariant under term reordering (for oracle caches)."""
    canon = "\n".join(sorted(f"{c:.17g} {s.labels}" for c, s in op.terms))
    return hashlib.sha256(canon.encode()).hexdigest()


def _check_dimension(qubit_count: int, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    dim = 1 << qubit_count
    if state.shape != (dim,):
        raise ValueError(
            f"state has shape {state.shape}, expected ({dim},) for {qubit_count} qubits"
        )
    return state


def apply_pauli_string(string: PauliString, state: np.ndarray) -> np.ndarray:
    """Apply a Pauli word to a state vector without building a matrix."""
    state = _check_dimension(string.qubit_count, state)
    dim = state.shape[0]
    indices = np.arange(dim)
    out = np.empty(dim, dtype=complex)
    out[indices ^ string.flip_mask] = string.phases(indices) * state
    return out


def apply_operator(op: PauliSumOperator, state: np.ndarray) -> np.ndarray:
    """Apply sum_i h_i P_i to a state vector, term by term."""
    state = _check_dimension(op.qubit_count, state)
    dim = state.shape[0]
    indices = np.arange(dim)
    out = np.zeros(dim, dtype=complex)
    for coeff, string in op.terms:
        out[indices ^ string.flip_mask] += coeff * string.phases(indices) * state
    return out


def to_dense_matrix(op: PauliSumOperator, max_qubits: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Dense 2^N x 2^N Hermitian matrix of the operator.

    Each Pauli word contributes exactly one entry per column, so assembly is
    O(L * 2^N) rather than a chain of Kronecker products.
    """
    if op.qubit_count > max_qubits:
        raise ValueError(
            f"{op.qubit_count} qubits exceeds dense limit {max_qubits}"
        )
    dim = 1 << op.qubit_count
    indices = np.arange(dim)
    out = np.zeros((dim, dim), dtype=complex)
    for coeff, string in op.terms:
        out[indices ^ string.flip_mask, indices] += coeff * string.phases(indices)
    return out


def expectation(op: PauliSumOperator, state: np.ndarray) -> float:
    """Real expectation value <v|H|v> of a Hermitian Pauli sum.

    Requires a normalized state; the imaginary residual (rounding only, by
    Hermiticity) is checked against 1e-10 and discarded.
    """
    state = _check_dimension(op.qubit_count, state)
    norm = np.linalg.norm(state)
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state is not normalized (norm {norm!r})")
    value = np.vdot(state, apply_operator(op, state))
    if abs(value.imag) >= 1e-10:
        raise ValueError(f"expectation has non-negligible imaginary part {value.imag!r}")
    return float(value.real)

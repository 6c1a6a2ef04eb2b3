"""Outer reference-selection loop.

Round 1 runs with the initial state as the only reference.  Transition
bitstrings are sampled once from p(x) = |<x|exp(-iH (M-1) tau)|psi0>|^2 and
ranked; each later round adds the highest-ranked unused bitstrings to the
pool (either as basis states or as symmetry-adapted superpositions),
rebuilds the subspace, fast-forwards the monitored series on a fixed grid,
and stops once the sup-norm change of |C(t)| drops below eps_stop or the
pool hits its cap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exact import (
    SpectralDecomposition,
    basis_state,
    eig_decompose,
    evolve_exact,
    transition_probabilities,
)
from .krylov import (
    KrylovBasis,
    KrylovConfig,
    SubspaceModel,
    assemble_subspace_matrices,
    build_krylov_basis,
    fast_forward_coefficients,
    perturb_matrices,
    threshold_and_whiten,
)
from .operators import PauliSumOperator, apply_operator
from .series import CorrelationSeries, TimeGrid

SELECTION_MODES = ("bitstring", "symmetry_eigvec")

STOP_CONVERGED = "converged"
STOP_MAX_REFERENCES = "max_references"
STOP_SUBSPACE_EXHAUSTED = "subspace_exhausted"


class PoolExhaustedError(RuntimeError):
    """No unused sampled bitstrings remain to extend the pool."""


@dataclass(frozen=True)
class SelectionConfig:
    """Knobs of the selection loop.

    ``eval_grid`` (defaults to 201 points on [0, t_max]) is the grid on
    which convergence of |C(t)| is judged.
    """

    t_max: float = 20.0
    eps_stop: float = 1e-4
    max_references: int = 1
    references_per_round: int = 1
    mode: str = "bitstring"
    shots: int = 1000
    exact_sampling: bool = False
    seed: int = 0
    eval_grid: TimeGrid | None = None

    def __post_init__(self):
        if self.t_max <= 0:
            raise ValueError(f"t_max must be > 0, got {self.t_max}")
        if self.eps_stop <= 0:
            raise ValueError(f"eps_stop must be > 0, got {self.eps_stop}")
        if self.max_references < 1:
            raise ValueError(f"max_references must be >= 1, got {self.max_references}")
        if not 1 <= self.references_per_round <= self.max_references:
            raise ValueError(
                f"references_per_round must be in [1, {self.max_references}], "
                f"got {self.references_per_round}"
            )
        if self.mode not in SELECTION_MODES:
            raise ValueError(f"mode must be one of {SELECTION_MODES}, got {self.mode!r}")
        if not self.exact_sampling and self.shots < 1:
            raise ValueError(f"shots must be >= 1 in sampling mode, got {self.shots}")
        if self.eval_grid is None:
            object.__setattr__(self, "eval_grid", TimeGrid(0.0, self.t_max, 201))
        if self.eval_grid.t_start != 0.0 or self.eval_grid.t_end != self.t_max:
            raise ValueError(
                f"eval_grid must span [0, {self.t_max}], got "
                f"[{self.eval_grid.t_start}, {self.eval_grid.t_end}]"
            )


@dataclass
class PoolEntry:
    state: np.ndarray
    bitstring: str | None
    provenance: str  # "initial" or "sampled"
    frequency: float | None = None


class ReferencePool:
    """Ordered pool of reference states; entry 1 is always the initial state."""

    def __init__(self, entries: list[PoolEntry]):
        self.entries = list(entries)

    @classmethod
    def initial(cls, psi0: np.ndarray) -> "ReferencePool":
        psi0 = np.asarray(psi0, dtype=complex)
        return cls([PoolEntry(state=psi0, bitstring=_as_bitstring(psi0), provenance="initial")])

    @property
    def bitstrings(self) -> set[str]:
        return {e.bitstring for e in self.entries if e.bitstring is not None}

    def __len__(self) -> int:
        return len(self.entries)

    def contents(self) -> list[tuple[str | None, float | None]]:
        return [(e.bitstring, e.frequency) for e in self.entries]


def _as_bitstring(state: np.ndarray) -> str | None:
    # Recognize basis states (up to global phase) so the pool can
    # deduplicate against them.
    nonzero = np.flatnonzero(np.abs(state) > 1e-12)
    if len(nonzero) != 1:
        return None
    n = int(np.log2(len(state)))
    return format(int(nonzero[0]), f"0{n}b")


def sample_transition_bitstrings(
    decomp: SpectralDecomposition,
    psi0: np.ndarray,
    cfg: KrylovConfig,
    sel: SelectionConfig,
) -> list[tuple[str, float]]:
    """Ranked transition bitstrings from the deepest Krylov column.

    Sampling mode draws ``sel.shots`` multinomial samples from p(x) and
    returns the observed bitstrings sorted by descending count; exact mode
    sorts by descending p(x) itself.  Ties break toward the ascending basis
    index.  Deterministic for a fixed seed.
    """
    probe_time = (cfg.krylov_dim - 1) * cfg.tau
    p = transition_probabilities(decomp, psi0, probe_time)
    n = decomp.qubit_count
    if sel.exact_sampling:
        order = np.argsort(-p, kind="stable")
        return [(format(int(i), f"0{n}b"), float(p[i])) for i in order if p[i] > 1e-15]
    rng = np.random.default_rng(sel.seed)
    counts = rng.multinomial(sel.shots, p / p.sum())
    order = np.argsort(-counts, kind="stable")
    return [
        (format(int(i), f"0{n}b"), counts[i] / sel.shots) for i in order if counts[i] > 0
    ]


def extend_pool(pool: ReferencePool, candidates, count: int) -> ReferencePool:
    """New pool with up to ``count`` highest-ranked unused bitstrings added.

    ``candidates`` is a ranked sequence of bitstrings or (bitstring,
    frequency) pairs.  Raises :class:`PoolExhaustedError` when every
    candidate is already present.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    present = pool.bitstrings
    added: list[PoolEntry] = []
    for item in candidates:
        bits, freq = item if isinstance(item, tuple) else (item, None)
        if bits in present:
            continue
        present.add(bits)
        added.append(
            PoolEntry(state=basis_state(bits), bitstring=bits, provenance="sampled", frequency=freq)
        )
        if len(added) == count:
            break
    if not added:
        raise PoolExhaustedError("no unused sampled bitstrings remain")
    return ReferencePool(pool.entries + added)


def symmetry_adapted_references(
    hamiltonian: PauliSumOperator, bitstrings: list[str]
) -> list[np.ndarray]:
    """Eigenvectors of H projected onto the sampled bitstrings.

    Diagonalizing the small <x'|H|x> matrix yields superpositions of the
    bitstrings that respect the Hamiltonian symmetries within their span;
    they are returned by ascending eigenvalue with a deterministic phase.
    """
    if not bitstrings:
        raise ValueError("need at least one bitstring")
    indices = [int(b, 2) for b in bitstrings]
    m = len(bitstrings)
    sub_h = np.empty((m, m), dtype=complex)
    for j, bits in enumerate(bitstrings):
        column = apply_operator(hamiltonian, basis_state(bits))
        sub_h[:, j] = column[indices]
    sub_h = 0.5 * (sub_h + sub_h.conj().T)
    _, vectors = np.linalg.eigh(sub_h)
    lead_rows = np.argmax(np.abs(vectors), axis=0)
    lead = vectors[lead_rows, np.arange(m)]
    vectors = vectors * (lead.conj() / np.abs(lead))
    dim = 1 << hamiltonian.qubit_count
    out = []
    for k in range(m):
        state = np.zeros(dim, dtype=complex)
        state[indices] = vectors[:, k]
        out.append(state)
    return out


def stopping_check(
    prev: CorrelationSeries, curr: CorrelationSeries, eps_stop: float
) -> bool:
    """True when max_t | |C_curr(t)| - |C_prev(t)| | <= eps_stop."""
    if prev.grid != curr.grid:
        raise ValueError("correlation series are on different grids")
    delta = np.max(np.abs(np.abs(curr.values) - np.abs(prev.values)))
    return bool(delta <= eps_stop)


@dataclass
class RoundRecord:
    index: int
    reference_count: int
    kept_rank: int
    correlation: CorrelationSeries
    fidelity: np.ndarray | None
    delta: float | None
    pool: list[tuple[str | None, float | None]]


@dataclass
class SelectionResult:
    hamiltonian: PauliSumOperator
    psi0: np.ndarray
    krylov_config: KrylovConfig
    selection_config: SelectionConfig
    decomposition: SpectralDecomposition
    basis: KrylovBasis
    model: SubspaceModel
    pool: ReferencePool
    rounds: list[RoundRecord]
    rounds_executed: int
    stop_reason: str


def _pool_references(
    pool: ReferencePool, hamiltonian: PauliSumOperator, mode: str
) -> list[np.ndarray]:
    if mode == "bitstring":
        return [e.state for e in pool.entries]
    sampled = [e.bitstring for e in pool.entries if e.provenance == "sampled"]
    refs = [pool.entries[0].state]
    if sampled:
        refs.extend(symmetry_adapted_references(hamiltonian, sampled))
    return refs


def _fidelity_series(
    decomp: SpectralDecomposition,
    psi0: np.ndarray,
    basis: KrylovBasis,
    coefficients: np.ndarray,
    times: np.ndarray,
) -> np.ndarray:
    exact_states = evolve_exact(decomp, psi0, times)
    approx_states = basis.columns @ coefficients
    norms_sq = np.sum(np.abs(approx_states) ** 2, axis=0)
    overlaps = np.sum(exact_states.conj() * approx_states, axis=0)
    return np.abs(overlaps) ** 2 / norms_sq


def run_selection_loop(
    hamiltonian: PauliSumOperator,
    psi0: np.ndarray,
    cfg: KrylovConfig,
    sel: SelectionConfig,
    oracle_enabled: bool = True,
    monitor=None,
    decomposition: SpectralDecomposition | None = None,
) -> SelectionResult:
    """Run the full selection loop and return all per-round artifacts.

    ``oracle_enabled`` switches the per-round exact fidelity series on or
    off (basis construction always uses the exact engine at desk scale).
    ``monitor(model, basis, grid)`` may replace the default |C(t)| series
    used by the stopping criterion.  Identical inputs and seeds give
    identical results.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    decomp = decomposition if decomposition is not None else eig_decompose(hamiltonian)
    candidates = sample_transition_bitstrings(decomp, psi0, cfg, sel)
    pool = ReferencePool.initial(psi0)
    times = sel.eval_grid.times

    rounds: list[RoundRecord] = []
    prev_series: CorrelationSeries | None = None
    while True:
        references = _pool_references(pool, hamiltonian, sel.mode)
        basis = build_krylov_basis(decomp, references, cfg)
        model = assemble_subspace_matrices(basis, hamiltonian, psi0)
        if cfg.noise is not None:
            model = perturb_matrices(model, cfg.noise)
        model = threshold_and_whiten(model, cfg.svd_threshold)
        coefficients = fast_forward_coefficients(model, times)
        if monitor is not None:
            series = monitor(model, basis, sel.eval_grid)
        else:
            series = CorrelationSeries(sel.eval_grid, model.d0.conj() @ coefficients)
        fid = (
            _fidelity_series(decomp, psi0, basis, coefficients, times)
            if oracle_enabled
            else None
        )
        delta = (
            float(np.max(np.abs(np.abs(series.values) - np.abs(prev_series.values))))
            if prev_series is not None
            else None
        )
        rounds.append(
            RoundRecord(
                index=len(rounds) + 1,
                reference_count=len(references),
                kept_rank=model.kept_rank,
                correlation=series,
                fidelity=fid,
                delta=delta,
                pool=pool.contents(),
            )
        )
        if prev_series is not None and stopping_check(prev_series, series, sel.eps_stop):
            stop_reason = STOP_CONVERGED
            break
        if len(pool) >= sel.max_references:
            stop_reason = STOP_MAX_REFERENCES
            break
        take = min(sel.references_per_round, sel.max_references - len(pool))
        try:
            pool = extend_pool(pool, candidates, take)
        except PoolExhaustedError:
            stop_reason = STOP_SUBSPACE_EXHAUSTED
            break
        prev_series = series

    return SelectionResult(
        hamiltonian=hamiltonian,
        psi0=psi0,
        krylov_config=cfg,
        selection_config=sel,
        decomposition=decomp,
        basis=basis,
        model=model,
        pool=pool,
        rounds=rounds,
        rounds_executed=len(rounds),
        stop_reason=stop_reason,
    )

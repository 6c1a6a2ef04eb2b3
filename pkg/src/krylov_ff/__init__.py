"""Fast-forwarded quantum dynamics from short-time Krylov subspace data.

A classical engine that predicts long-time dynamics of Pauli-sum
Hamiltonians from a small set of real-time-evolved Krylov states:
auto-correlation functions, observables, two-time dipole correlations, and
absorption spectra, validated against an exact spectral oracle.
"""

import os as _os

# Honor the thread cap before any BLAS pools spin up; only effective when
# this package is imported before numpy initializes its backends.
if "KRYLOV_FF_THREADS" in _os.environ:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _os.environ["KRYLOV_FF_THREADS"])

from .exact import (
    GroundState,
    SpectralDecomposition,
    basis_state,
    eig_decompose,
    evolve_exact,
    exact_autocorrelation,
    fidelity,
    ground_state,
    transition_probabilities,
)
from .krylov import (
    EmptySubspaceError,
    KrylovBasis,
    KrylovConfig,
    NoiseConfig,
    SubspaceModel,
    assemble_subspace_matrices,
    build_krylov_basis,
    fast_forward_coefficients,
    perturb_matrices,
    reconstruct_state,
    subspace_propagator,
    threshold_and_whiten,
)
from .models import (
    generate_test_hamiltonian,
    heisenberg_chain,
    random_pauli_operator,
    tfim_chain,
)
from .observables import (
    autocorrelation_ff,
    dipole_correlation_ff,
    lineshape,
    observable_expectation_ff,
    oscillator_strength,
    two_time_correlation_ff,
)
from .operators import (
    PauliParseError,
    PauliString,
    PauliSumOperator,
    apply_operator,
    apply_pauli_string,
    expectation,
    parse_pauli_sum,
    serialize_pauli_sum,
    to_dense_matrix,
)
from .selection import (
    PoolExhaustedError,
    ReferencePool,
    SelectionConfig,
    SelectionResult,
    extend_pool,
    run_selection_loop,
    sample_transition_bitstrings,
    stopping_check,
    symmetry_adapted_references,
)
from .series import CorrelationSeries, SpectrumSeries, TimeGrid

__version__ = "0.1.0"

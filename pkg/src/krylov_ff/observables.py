"""Fast-forwarded observables and absorption spectra.

All quantities here are post-processing of a whitened subspace model:
the auto-correlation C(t) = d0^dag c(t) needs nothing else, general
expectation values need the observable projected onto the basis once, and
two-time correlations combine a main and an auxiliary run.  The dipole case
seeds a single run with mu|ground> and restores the ground-state phase, and
the lineshape integrates the damped correlation on a truncated half axis
(factor 2 from C(-t) = C(t)*).
"""

from __future__ import annotations

import warnings

import numpy as np

from .exact import GroundState, eig_decompose, ground_state
from .krylov import KrylovBasis, KrylovConfig, SubspaceModel, fast_forward_coefficients, subspace_propagator
from .operators import PauliSumOperator, apply_operator, operator_hash
from .selection import SelectionConfig, SelectionResult, run_selection_loop
from .series import CorrelationSeries, SpectrumSeries, TimeGrid

SPECTRUM_CHANNELS = ("x", "y", "z")


def autocorrelation_ff(model: SubspaceModel, grid: TimeGrid) -> CorrelationSeries:
    """C(t_j) = d0^dag c(t_j); C(0) = d0^dag S+ d0 (1 when psi0 is in the kept span)."""
    coefficients = fast_forward_coefficients(model, grid.times)
    return CorrelationSeries(grid, model.d0.conj() @ coefficients)


def assemble_observable_matrix(
    bra_basis: KrylovBasis, op: PauliSumOperator, ket_basis: KrylovBasis | None = None
) -> np.ndarray:
    """[O]_{k'k} = <phi_k'|O|phi_k>, assembled once from the basis columns."""
    if ket_basis is None:
        ket_basis = bra_basis
    ket = ket_basis.columns
    applied = np.column_stack([apply_operator(op, ket[:, k]) for k in range(ket.shape[1])])
    matrix = bra_basis.columns.conj().T @ applied
    if ket_basis is bra_basis:
        matrix = 0.5 * (matrix + matrix.conj().T)
    return matrix


def observable_expectation_ff(
    model: SubspaceModel,
    basis: KrylovBasis,
    obs: PauliSumOperator,
    grid: TimeGrid,
) -> np.ndarray:
    """O(t_j) = sum_{k'k} c*_{k'}(t_j) c_k(t_j) <phi_k'|O|phi_k>, real."""
    o_matrix = assemble_observable_matrix(basis, obs)
    coefficients = fast_forward_coefficients(model, grid.times)
    values = np.einsum("kt,kl,lt->t", coefficients.conj(), o_matrix, coefficients)
    residual = np.max(np.abs(values.imag))
    if residual >= 1e-9:
        raise ValueError(f"observable series has imaginary residual {residual:g}")
    return values.real


def two_time_correlation_ff(
    run_main: SelectionResult,
    run_aux: SelectionResult,
    a: PauliSumOperator,
    b: PauliSumOperator,
    t: float,
    tau_lag: float,
) -> complex:
    """<A(t+tau) B(t)> from two runs sharing the same Hamiltonian.

    The main run supplies c(t) and c(t+tau); the auxiliary run supplies the
    subspace in which exp(-iH tau) B |phi_k> is expanded, so the kernel
    <phi_k'|A exp(-iH tau) B|phi_k> is evaluated as
    A_cross P_aux(tau) B_cross with cross matrices between the two bases.
    """
    if operator_hash(run_main.hamiltonian) != operator_hash(run_aux.hamiltonian):
        raise ValueError("the two runs use different Hamiltonians")
    if run_main.basis.columns.shape[0] != run_aux.basis.columns.shape[0]:
        raise ValueError("the two runs act on different qubit counts")
    a_cross = assemble_observable_matrix(run_main.basis, a, run_aux.basis)
    b_cross = assemble_observable_matrix(run_aux.basis, b, run_main.basis)
    kernel = a_cross @ subspace_propagator(run_aux.model, tau_lag) @ b_cross
    c_t = fast_forward_coefficients(run_main.model, float(t))
    c_shift = fast_forward_coefficients(run_main.model, float(t) + float(tau_lag))
    return complex(c_shift.conj() @ kernel @ c_t)


def dipole_initial_state(decomp, mu: PauliSumOperator) -> tuple[GroundState, float, np.ndarray]:
    """Ground state, norm factor ||mu|g>||^2, and the normalized seed state."""
    gs = ground_state(decomp)
    if gs.degenerate:
        warnings.warn("ground state is degenerate; dipole correlation is gauge-dependent")
    seeded = apply_operator(mu, gs.state)
    norm = np.linalg.norm(seeded)
    if norm < 1e-12:
        raise ValueError("dipole operator annihilates the ground state (dark transition)")
    return gs, float(norm**2), seeded / norm


def dipole_series(
    model: SubspaceModel,
    grid: TimeGrid,
    ground_energy: float,
    norm_factor: float,
    restore_phase: bool = True,
) -> CorrelationSeries:
    """C_mu(t) = exp(i E_G t) * ||mu|g>||^2 * d0^dag c(t).

    With ``restore_phase=False`` the exp(i E_G t) factor is left out,
    giving the bare <g|mu exp(-iHt) mu|g>; feed that variant to
    :func:`lineshape` together with e_ground = E_G.
    """
    coefficients = fast_forward_coefficients(model, grid.times)
    values = norm_factor * (model.d0.conj() @ coefficients)
    if restore_phase:
        values = np.exp(1j * ground_energy * grid.times) * values
    return CorrelationSeries(grid, values, kind="dipole", norm_factor=norm_factor)


def dipole_correlation_ff(
    hamiltonian: PauliSumOperator,
    mu: PauliSumOperator,
    cfg: KrylovConfig,
    sel: SelectionConfig,
    grid: TimeGrid,
) -> CorrelationSeries:
    """Two-time dipole correlation <g|mu exp(-iHt) mu|g> from a single run.

    Propagating the ground state is replaced by its phase exp(-i E_G t), so
    only mu|g> needs the subspace treatment.
    """
    decomp = eig_decompose(hamiltonian)
    gs, norm_factor, psi0 = dipole_initial_state(decomp, mu)
    result = run_selection_loop(
        hamiltonian, psi0, cfg, sel, oracle_enabled=False, decomposition=decomp
    )
    return dipole_series(result.model, grid, gs.energy, norm_factor)


def lineshape(
    series: CorrelationSeries,
    gamma: float,
    omega_grid: np.ndarray,
    e_ground: float,
    channel: str = "x",
) -> SpectrumSeries:
    """Re I(omega) = 2 int_0^T Re[exp(i(E_G+omega)t) C(t)] exp(-gamma t) dt.

    Trapezoidal quadrature on the series' own grid, which must start at
    t = 0; the factor 2 folds negative times by conjugate symmetry and the
    exp(-gamma t) damping regularizes the truncation (T ~ 8/gamma makes the
    discarded tail negligible).

    ``e_ground`` is the ground-state phase offset not already contained in
    the series: pass E_G for a bare <g|mu exp(-iHt) mu|g> correlation, or 0
    when the series already carries the restored exp(i E_G t) factor.  Peaks
    of the result then sit at the transition energies E_f - E_G.
    """
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if series.grid.t_start != 0.0:
        raise ValueError("correlation grid must start at t = 0")
    omega_grid = np.asarray(omega_grid, dtype=float)
    times = series.grid.times
    damped = series.values * np.exp(-gamma * times)
    phases = np.exp(1j * np.outer(e_ground + omega_grid, times))
    integrand = np.real(phases * damped[None, :])
    re_i = 2.0 * np.trapezoid(integrand, dx=series.grid.dt, axis=1)
    return SpectrumSeries(
        omega=omega_grid,
        lineshapes={channel: re_i},
        gamma=gamma,
        ground_energy=e_ground,
    )


def oscillator_strength(channels: list[SpectrumSeries]) -> SpectrumSeries:
    """f(omega) = (2/3) omega sum_xi Re I_xi(omega) over 1-3 channels.

    Missing polarization channels are treated as zero; all inputs must share
    the frequency grid.
    """
    if not 1 <= len(channels) <= 3:
        raise ValueError(f"need 1-3 channels, got {len(channels)}")
    omega = channels[0].omega
    merged: dict[str, np.ndarray] = {}
    for spectrum in channels:
        if not np.array_equal(spectrum.omega, omega):
            raise ValueError("channels are on different frequency grids")
        for name, values in spectrum.lineshapes.items():
            if name in merged:
                raise ValueError(f"duplicate channel {name!r}")
            merged[name] = values
    total = np.sum([merged[name] for name in merged], axis=0)
    return SpectrumSeries(
        omega=omega,
        lineshapes=merged,
        gamma=channels[0].gamma,
        ground_energy=channels[0].ground_energy,
        oscillator_strength=(2.0 / 3.0) * omega * total,
    )

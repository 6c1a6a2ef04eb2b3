"""Command-line run orchestration.

One experiment per invocation: load the Hamiltonian and initial state (or
dipole operators), run the selection loop, and emit plot-ready CSV/JSON
artifacts into the output directory.  All flags can also be supplied as a
single JSON config (--config) with the same names in snake_case; explicit
flags override config values.  Identical configs and seeds produce
byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exact import eig_decompose
from .io import (
    StateFormatError,
    load_pauli_file,
    load_state,
    write_correlation_csv,
    write_model_json,
    write_observable_csv,
    write_rounds_jsonl,
    write_spectrum_csv,
    write_summary_json,
)
from .krylov import KrylovConfig, NoiseConfig
from .observables import (
    dipole_initial_state,
    dipole_series,
    lineshape,
    observable_expectation_ff,
    oscillator_strength,
)
from .operators import PauliParseError
from .selection import SelectionConfig, run_selection_loop
from .series import TimeGrid

SPECTRUM_POINTS = 2001
GROUND_DIPOLE = "ground+dipole"


@dataclass
class RunConfig:
    hamiltonian: str | None = None
    initial_state: str | None = None
    tau: float = 0.1
    krylov_dim: int = 6
    max_references: int = 1
    refs_per_round: int = 1
    mode: str = "bitstring"
    shots: int = 1000
    exact_sampling: bool = False
    svd_threshold: float = 1e-9
    noise_sigma: float = 0.0
    seed: int = 0
    t_max: float = 20.0
    eps_stop: float = 1e-4
    grid_points: int = 201
    dipole_x: str | None = None
    dipole_y: str | None = None
    dipole_z: str | None = None
    gamma: float = 1.5e-2
    observable: str | None = None
    oracle: bool = True
    out: str = "out"

    @classmethod
    def from_sources(cls, config_path: str | None, overrides: dict) -> "RunConfig":
        fields = {f.name for f in dataclasses.fields(cls)}
        values: dict = {}
        if config_path is not None:
            loaded = json.loads(Path(config_path).read_text())
            unknown = set(loaded) - fields
            if unknown:
                raise ValueError(f"unknown config keys: {sorted(unknown)}")
            values.update(loaded)
        values.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls(**values)
        cfg.mode = cfg.mode.replace("-", "_")
        return cfg

    def dipole_channels(self) -> dict[str, str]:
        channels = {"x": self.dipole_x, "y": self.dipole_y, "z": self.dipole_z}
        return {name: path for name, path in channels.items() if path}

    def public_dict(self) -> dict:
        # Echoed into summary.json; the output path is excluded so runs of
        # the same config into different directories stay byte-identical.
        echo = dataclasses.asdict(self)
        echo.pop("out")
        return echo


def _selection_config(cfg: RunConfig) -> SelectionConfig:
    return SelectionConfig(
        t_max=cfg.t_max,
        eps_stop=cfg.eps_stop,
        max_references=cfg.max_references,
        references_per_round=cfg.refs_per_round,
        mode=cfg.mode,
        shots=cfg.shots,
        exact_sampling=cfg.exact_sampling,
        seed=cfg.seed,
        eval_grid=TimeGrid(0.0, cfg.t_max, cfg.grid_points),
    )


def _krylov_config(cfg: RunConfig) -> KrylovConfig:
    noise = NoiseConfig(cfg.noise_sigma, seed=cfg.seed) if cfg.noise_sigma > 0 else None
    return KrylovConfig(
        tau=cfg.tau,
        krylov_dim=cfg.krylov_dim,
        svd_threshold=cfg.svd_threshold,
        noise=noise,
    )


def _write_round_artifacts(out_dir: Path, result) -> None:
    for record in result.rounds:
        write_correlation_csv(
            out_dir / f"round_{record.index}.csv", record.correlation, record.fidelity
        )
    write_rounds_jsonl(out_dir / "rounds.jsonl", result.rounds)
    write_model_json(out_dir / "model.json", result.model)


def _round_summary(result) -> dict:
    final = result.rounds[-1]
    return {
        "stop_reason": result.stop_reason,
        "rounds_executed": result.rounds_executed,
        "kept_rank_history": [r.kept_rank for r in result.rounds],
        "reference_counts": [r.reference_count for r in result.rounds],
        "final_fidelity_at_t_max": (
            None if final.fidelity is None else float(final.fidelity[-1])
        ),
    }


def _quadrature_grid(cfg: RunConfig) -> TimeGrid:
    # Same spacing as the evaluation grid, extended until the exp(-gamma t)
    # damping has decayed to ~3.4e-4 of its initial value.
    dt = cfg.t_max / (cfg.grid_points - 1)
    t_end = 8.0 / cfg.gamma
    points = int(math.ceil(t_end / dt)) + 1
    return TimeGrid(0.0, t_end, points)


def _omega_grid(decomp, ground_energy: float, gamma: float) -> np.ndarray:
    span = float(decomp.eigenvalues[-1]) - ground_energy
    margin = max(10.0 * gamma, 0.05 * span)
    return np.linspace(0.0, span + margin, SPECTRUM_POINTS)


def _run_autocorrelation(cfg: RunConfig, out_dir: Path) -> dict:
    hamiltonian = load_pauli_file(cfg.hamiltonian)
    if cfg.initial_state == GROUND_DIPOLE:
        raise ValueError(f"--initial-state {GROUND_DIPOLE} needs a --dipole-x/-y/-z channel")
    if not cfg.initial_state:
        raise ValueError("an initial state is required (bitstring or state file)")
    psi0 = load_state(cfg.initial_state, hamiltonian.qubit_count)
    result = run_selection_loop(
        hamiltonian,
        psi0,
        _krylov_config(cfg),
        _selection_config(cfg),
        oracle_enabled=cfg.oracle,
    )
    _write_round_artifacts(out_dir, result)
    summary = _round_summary(result)
    if cfg.observable:
        obs = load_pauli_file(cfg.observable, expected_qubits=hamiltonian.qubit_count)
        values = observable_expectation_ff(
            result.model, result.basis, obs, result.selection_config.eval_grid
        )
        write_observable_csv(
            out_dir / "observable.csv", result.selection_config.eval_grid.times, values
        )
    return summary


def _run_dipole_spectrum(cfg: RunConfig, out_dir: Path) -> dict:
    hamiltonian = load_pauli_file(cfg.hamiltonian)
    if cfg.initial_state and cfg.initial_state != GROUND_DIPOLE:
        raise ValueError(
            f"dipole runs seed themselves from the ground state; "
            f"use --initial-state {GROUND_DIPOLE} or omit it"
        )
    decomp = eig_decompose(hamiltonian)
    quad_grid = _quadrature_grid(cfg)
    channels = cfg.dipole_channels()
    spectra = []
    channel_summaries = {}
    for name in sorted(channels):
        mu = load_pauli_file(channels[name], expected_qubits=hamiltonian.qubit_count)
        gs, norm_factor, psi0 = dipole_initial_state(decomp, mu)
        result = run_selection_loop(
            hamiltonian,
            psi0,
            _krylov_config(cfg),
            _selection_config(cfg),
            oracle_enabled=cfg.oracle,
            decomposition=decomp,
        )
        channel_dir = out_dir / name
        channel_dir.mkdir(exist_ok=True)
        _write_round_artifacts(channel_dir, result)
        # bare correlation + e_ground in the transform: peaks at E_f - E_G
        series = dipole_series(
            result.model, quad_grid, gs.energy, norm_factor, restore_phase=False
        )
        omega = _omega_grid(decomp, gs.energy, cfg.gamma)
        spectra.append(lineshape(series, cfg.gamma, omega, gs.energy, channel=name))
        channel_summaries[name] = dict(
            _round_summary(result), ground_energy=gs.energy, norm_factor=norm_factor
        )
    write_spectrum_csv(out_dir / "spectrum.csv", oscillator_strength(spectra))
    return {"channels": channel_summaries}


def run_experiment(cfg: RunConfig) -> int:
    """Execute the configured pipeline; 0 on success, 1 with a structured error."""
    started = time.perf_counter()
    try:
        if cfg.hamiltonian is None:
            raise ValueError("--hamiltonian is required")
        out_dir = Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if cfg.dipole_channels():
            summary = _run_dipole_spectrum(cfg, out_dir)
        else:
            summary = _run_autocorrelation(cfg, out_dir)
    except (PauliParseError, StateFormatError, OSError, ValueError, RuntimeError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    summary["config"] = cfg.public_dict()
    write_summary_json(out_dir / "summary.json", summary)
    elapsed = time.perf_counter() - started
    print(f"wrote {out_dir}/summary.json ({elapsed:.3f} s)", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krylov-ff",
        description="Fast-forward quantum dynamics from short-time Krylov data.",
    )
    add = parser.add_argument
    add("--config", help="JSON file mirroring the flags (snake_case keys)")
    add("--hamiltonian", help="Pauli-sum file for H")
    add("--initial-state", help=f"bitstring, state file, or '{GROUND_DIPOLE}'")
    add("--tau", type=float, help="Krylov time step in atomic units (default 0.1)")
    add("--krylov-dim", type=int, help="steps per reference M (default 6)")
    add("--max-references", type=int, help="reference cap R_max (default 1)")
    add("--refs-per-round", type=int, help="references added per round (default 1)")
    add("--mode", choices=["bitstring", "symmetry-eigvec"], help="reference construction")
    add("--shots", type=int, help="samples for bitstring selection (default 1000)")
    add(
        "--exact-sampling",
        action="store_const",
        const=True,
        help="rank bitstrings by exact p(x) instead of sampling",
    )
    add("--svd-threshold", type=float, help="singular-value cutoff (default 1e-9)")
    add("--noise-sigma", type=float, help="matrix-element noise std (default 0)")
    add("--seed", type=int, help="global RNG seed (default 0)")
    add("--t-max", type=float, help="largest evaluation time (default 20)")
    add("--eps-stop", type=float, help="convergence tolerance on |C(t)| (default 1e-4)")
    add("--grid-points", type=int, help="evaluation grid size (default 201)")
    add("--dipole-x", help="Pauli-sum file for the x dipole channel")
    add("--dipole-y", help="Pauli-sum file for the y dipole channel")
    add("--dipole-z", help="Pauli-sum file for the z dipole channel")
    add("--gamma", type=float, help="spectral linewidth (default 1.5e-2)")
    add("--observable", help="Pauli-sum file for a fast-forwarded observable O(t)")
    add(
        "--oracle",
        action=argparse.BooleanOptionalAction,
        help="compute exact per-round fidelities (default on)",
    )
    add("--out", help="output directory (default 'out')")
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config")
    try:
        cfg = RunConfig.from_sources(config_path, args)
    except (OSError, ValueError, TypeError) as exc:
        print(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 2
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())

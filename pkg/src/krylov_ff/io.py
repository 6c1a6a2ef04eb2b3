"""File formats and run artifacts.

CSV and JSON writers emit full double precision (%.17g) with fixed newlines
and key ordering, so reruns with identical seeds are byte-identical.
"""

from __future__ import annotations

import json
import re
import warnings
from pathlib import Path

import numpy as np

from .krylov import SubspaceModel
from .operators import PauliParseError, PauliSumOperator, parse_pauli_sum, serialize_pauli_sum
from .series import CorrelationSeries, SpectrumSeries

_BITSTRING = re.compile(r"^[01]+$")


class StateFormatError(ValueError):
    """Malformed initial-state spec or state file."""


def fmt(x: float) -> str:
    return f"{x:.17g}"


def load_pauli_file(path, expected_qubits: int | None = None) -> PauliSumOperator:
    path = Path(path)
    try:
        return parse_pauli_sum(path.read_text(), expected_qubits=expected_qubits)
    except PauliParseError as exc:
        raise PauliParseError(f"{path}: {exc}") from None


def save_pauli_file(path, op: PauliSumOperator) -> None:
    Path(path).write_text(serialize_pauli_sum(op))


def load_state(spec: str, qubit_count: int) -> np.ndarray:
    """Initial state from a bitstring or a state file, normalized.

    A spec matching ^[01]+$ is a bitstring; anything else is a path to a
    file of lines ``<re> <im> <bitstring>`` (# comments and blank lines
    ignored, repeated bitstrings accumulated).  Inputs whose raw norm
    deviates from 1 by more than 1e-6 are renormalized with a warning.
    """
    if _BITSTRING.match(spec):
        if len(spec) != qubit_count:
            raise StateFormatError(
                f"bitstring {spec!r} has length {len(spec)}, expected {qubit_count}"
            )
        state = np.zeros(1 << qubit_count, dtype=complex)
        state[int(spec, 2)] = 1.0
        return state

    path = Path(spec)
    state = np.zeros(1 << qubit_count, dtype=complex)
    seen_any = False
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 3:
            raise StateFormatError(f"{path}:{lineno}: expected '<re> <im> <bitstring>'")
        try:
            re_part, im_part = float(fields[0]), float(fields[1])
        except ValueError:
            raise StateFormatError(f"{path}:{lineno}: bad amplitude") from None
        bits = fields[2]
        if not _BITSTRING.match(bits):
            raise StateFormatError(f"{path}:{lineno}: invalid bitstring {bits!r}")
        if len(bits) != qubit_count:
            raise StateFormatError(
                f"{path}:{lineno}: bitstring length {len(bits)}, expected {qubit_count}"
            )
        state[int(bits, 2)] += re_part + 1j * im_part
        seen_any = True
    if not seen_any:
        raise StateFormatError(f"{path}: empty state file")
    norm = np.linalg.norm(state)
    if norm < 1e-12:
        raise StateFormatError(f"{path}: state has zero norm")
    if abs(norm - 1.0) > 1e-6:
        warnings.warn(f"{path}: raw norm {norm:g} deviates from 1; renormalizing")
    return state / norm


def write_correlation_csv(path, series: CorrelationSeries, fidelity=None) -> None:
    """Header t,re_C,im_C,abs2_C with an optional trailing fidelity column."""
    header = "t,re_C,im_C,abs2_C"
    if fidelity is not None:
        header += ",fidelity"
    lines = [header]
    times = series.grid.times
    for j, value in enumerate(series.values):
        row = [fmt(times[j]), fmt(value.real), fmt(value.imag), fmt(abs(value) ** 2)]
        if fidelity is not None:
            row.append(fmt(fidelity[j]))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_spectrum_csv(path, spectrum: SpectrumSeries) -> None:
    """Header omega,re_I_x,re_I_y,re_I_z,f; missing channels emitted as 0."""
    zero = np.zeros_like(spectrum.omega)
    channels = [spectrum.lineshapes.get(name, zero) for name in ("x", "y", "z")]
    strength = spectrum.oscillator_strength
    if strength is None:
        strength = zero
    lines = ["omega,re_I_x,re_I_y,re_I_z,f"]
    for j, omega in enumerate(spectrum.omega):
        lines.append(
            ",".join(
                [fmt(omega)] + [fmt(c[j]) for c in channels] + [fmt(strength[j])]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_observable_csv(path, times: np.ndarray, values: np.ndarray) -> None:
    lines = ["t,O"]
    for t, value in zip(times, values):
        lines.append(f"{fmt(t)},{fmt(value)}")
    Path(path).write_text("\n".join(lines) + "\n")


def _complex_pairs(array: np.ndarray):
    if array.ndim == 1:
        return [[value.real, value.imag] for value in array]
    return [[[value.real, value.imag] for value in row] for row in array]


def write_model_json(path, model: SubspaceModel) -> None:
    """Row-major re/im dump of H, S, d0 plus the kept spectrum, for regression."""
    payload = {
        "size": model.size,
        "h": _complex_pairs(model.h),
        "s": _complex_pairs(model.s),
        "d0": _complex_pairs(model.d0),
        "kept_rank": model.kept_rank,
        "kept_singular_values": (
            None
            if model.kept_singular_values is None
            else model.kept_singular_values.tolist()
        ),
        "reduced_eigenvalues": (
            None
            if model.reduced_eigenvalues is None
            else model.reduced_eigenvalues.tolist()
        ),
    }
    _write_json(path, payload)


def write_rounds_jsonl(path, rounds) -> None:
    """One JSON object per selection round."""
    lines = []
    for record in rounds:
        entry = {
            "round": record.index,
            "references": record.reference_count,
            "kept_rank": record.kept_rank,
            "pool": [[bits, freq] for bits, freq in record.pool],
            "max_correlation_delta": record.delta,
            "fidelity_at_t_max": (
                None if record.fidelity is None else float(record.fidelity[-1])
            ),
        }
        lines.append(json.dumps(entry, sort_keys=True))
    Path(path).write_text("\n".join(lines) + "\n")


def _write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_summary_json(path, summary: dict) -> None:
    _write_json(path, summary)

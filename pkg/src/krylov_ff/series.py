"""Uniform time grids and correlation / spectrum series containers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of evaluation times in atomic units.

    Independent of the Krylov step tau: fast-forwarded quantities can be
    evaluated at arbitrary times.
    """

    t_start: float
    t_end: float
    points: int

    def __post_init__(self):
        if self.t_start < 0:
            raise ValueError(f"t_start must be >= 0, got {self.t_start}")
        if self.t_end <= self.t_start:
            raise ValueError(f"t_end must exceed t_start, got [{self.t_start}, {self.t_end}]")
        if self.points < 2:
            raise ValueError(f"need at least 2 grid points, got {self.points}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.points)

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.points - 1)


@dataclass
class CorrelationSeries:
    """Complex correlation values C(t_j) on a time grid.

    ``norm_factor`` carries the squared norm of an unnormalized initial
    vector (1.0 for plain autocorrelations); the values already include it.
    """

    grid: TimeGrid
    values: np.ndarray
    kind: str = "autocorrelation"
    norm_factor: float = 1.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.points,):
            raise ValueError(
                f"values shape {self.values.shape} does not match grid ({self.grid.points},)"
            )


@dataclass
class SpectrumSeries:
    """Lineshape channels Re I_xi(omega) and oscillator strength f(omega)."""

    omega: np.ndarray
    lineshapes: dict[str, np.ndarray]
    gamma: float
    ground_energy: float
    oscillator_strength: np.ndarray | None = None

    def __post_init__(self):
        self.omega = np.asarray(self.omega, dtype=float)
        for name, values in self.lineshapes.items():
            values = np.asarray(values, dtype=float)
            if values.shape != self.omega.shape:
                raise ValueError(f"channel {name!r} does not match the frequency grid")
            self.lineshapes[name] = values

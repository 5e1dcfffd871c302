"""Shared result carriers and numerical-failure errors."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class NumericalFailure(RuntimeError):
    """Integration failed; carries the last time reached successfully."""

    def __init__(self, message: str, last_good_time: float | None = None):
        super().__init__(message)
        self.last_good_time = last_good_time


class NoDecayError(RuntimeError):
    """The generator has no decaying eigenvalue (no decay channel)."""


@dataclass
class Trajectory:
    """Time-stamped observables from either engine.

    `observables` maps column name to an array of len(times) values.  The
    full engine fills intensity, jz, dc, j_squared, trace_error and
    min_eigenvalue; the collective engine fills intensity and attaches the
    population matrix (shape (len(times), N+1), M ordered J..-J).
    """

    times: np.ndarray
    observables: dict[str, np.ndarray]
    states: np.ndarray | None = None
    populations: np.ndarray | None = None
    warnings: list[str] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, col in self.observables.items():
            if len(col) != len(self.times):
                raise ValueError(f"observable {name!r} length mismatch")

    @property
    def intensity(self) -> np.ndarray:
        return self.observables["intensity"]

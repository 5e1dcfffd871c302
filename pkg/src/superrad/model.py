"""Physical configuration and scalar rates.

Units are fixed throughout: angular frequencies in rad/us, times in us,
rates in 1/us.  Angles are radians.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np


class ConfigError(ValueError):
    """Invalid physical configuration."""


class Geometry(enum.Enum):
    ALL_TO_ALL = "all_to_all"
    CIRCULAR = "circular"
    LINEAR = "linear"


@dataclass(frozen=True)
class ThermalBath:
    """Single-mode thermal bath: coupling amplitude, detuning and occupation."""

    omega_sl: float  # rad/us
    detuning: float  # omega_L - omega_0, rad/us
    nbar: float  # mean occupation, dimensionless


@dataclass(frozen=True)
class DirectRates:
    """Spin-lattice transition rates given directly, in 1/us."""

    p_plus: float
    p_minus: float


Bath = Union[ThermalBath, DirectRates]


@dataclass(frozen=True)
class SystemConfig:
    n_spins: int
    omega0: float  # Zeeman angular frequency, rad/us
    omega_d: float  # mean dipolar amplitude, rad/us
    theta: float  # polar angle, rad
    tau_c: float  # fluctuation correlation time, us
    bath: Bath
    phi: float = 0.0  # azimuthal angle, rad
    geometry: Geometry = Geometry.ALL_TO_ALL
    alpha_c: float = 0.0  # spatial bath-correlation factor

    def __post_init__(self):
        if self.n_spins < 1:
            raise ConfigError("n_spins must be a positive integer")
        if self.tau_c <= 0:
            raise ConfigError("tau_c must be > 0")
        if self.omega0 <= 0:
            raise ConfigError("omega0 must be > 0")
        if self.omega_d < 0:
            raise ConfigError("omega_d must be >= 0")
        if not 0.0 <= self.alpha_c < 1.0:
            raise ConfigError("alpha_c must lie in [0, 1)")
        if isinstance(self.bath, DirectRates):
            if self.bath.p_plus < 0 or self.bath.p_minus < 0:
                raise ConfigError("transition rates p_+- must be >= 0")
        elif isinstance(self.bath, ThermalBath):
            if self.bath.omega_sl < 0:
                raise ConfigError("omega_sl must be >= 0")
            if self.bath.nbar < 0:
                raise ConfigError("nbar must be >= 0")
        else:
            raise ConfigError(f"unsupported bath type {type(self.bath)!r}")


@dataclass(frozen=True)
class RateSet:
    """All scalar rates derived from a SystemConfig, in 1/us."""

    gamma0: float
    gamma1: float
    gamma2: float
    p_plus: float
    p_minus: float
    mz_eq: float


def spherical_harmonic_y2(m: int, theta: float, phi: float) -> complex:
    """Orthonormalized spherical harmonic Y_2^m(theta, phi)."""
    st, ct = math.sin(theta), math.cos(theta)
    if m == 0:
        return complex(math.sqrt(5.0 / (16.0 * math.pi)) * (3.0 * ct * ct - 1.0))
    if m in (1, -1):
        sign = -1.0 if m == 1 else 1.0
        return (
            sign
            * math.sqrt(15.0 / (8.0 * math.pi))
            * st
            * ct
            * np.exp(1j * m * phi)
        )
    if m in (2, -2):
        return (
            math.sqrt(15.0 / (32.0 * math.pi)) * st * st * np.exp(1j * m * phi)
        )
    raise ValueError(f"m must be in -2..2, got {m}")


def dipolar_amplitude(m: int, cfg: SystemConfig) -> complex:
    """Dipolar amplitude omega_{d_m} = omega_d * Y_2^{-m}(theta, phi), rad/us."""
    return cfg.omega_d * spherical_harmonic_y2(-m, cfg.theta, cfg.phi)


def gamma(m: int, cfg: SystemConfig) -> float:
    """Dipolar relaxation rate |omega_{d_m}|^2 tau_c / (1 + (m omega0 tau_c)^2)."""
    if m not in (0, 1, 2):
        raise ValueError(f"m must be 0, 1 or 2, got {m}")
    amp2 = abs(dipolar_amplitude(m, cfg)) ** 2
    return amp2 * cfg.tau_c / (1.0 + (m * cfg.omega0 * cfg.tau_c) ** 2)


def transition_rates(cfg: SystemConfig) -> tuple[float, float]:
    """Spin-lattice rates (p_plus, p_minus) in 1/us.

    For a thermal bath this is the closed form of the one-sided Lorentzian
    spectral density: p_-+ = omega_sl^2 * n_-+ * tau_c / (1 + detuning^2 tau_c^2)
    with n_- = nbar + 1 (emission) and n_+ = nbar (absorption).  Direct rates
    pass through unchanged.
    """
    if isinstance(cfg.bath, DirectRates):
        return cfg.bath.p_plus, cfg.bath.p_minus
    b = cfg.bath
    lorentz = b.omega_sl**2 * cfg.tau_c / (1.0 + (b.detuning * cfg.tau_c) ** 2)
    return b.nbar * lorentz, (b.nbar + 1.0) * lorentz


def equilibrium_magnetization(p_plus: float, p_minus: float) -> float:
    """M_z^eq = (p_+ - p_-)/(p_+ + p_-); zero when both rates vanish."""
    tot = p_plus + p_minus
    if tot == 0.0:
        return 0.0
    return (p_plus - p_minus) / tot


def rate_set(cfg: SystemConfig) -> RateSet:
    """Evaluate every scalar rate of the model for one configuration."""
    p_plus, p_minus = transition_rates(cfg)
    return RateSet(
        gamma0=gamma(0, cfg),
        gamma1=gamma(1, cfg),
        gamma2=gamma(2, cfg),
        p_plus=p_plus,
        p_minus=p_minus,
        mz_eq=equilibrium_magnetization(p_plus, p_minus),
    )


def pair_list(geometry: Geometry, n_spins: int) -> list[tuple[int, int]]:
    """Coupled pairs (i, j) with i > j for the given geometry."""
    if n_spins < 2:
        raise ValueError("pair_list requires n_spins >= 2")
    if geometry is Geometry.ALL_TO_ALL:
        return [(i, j) for i in range(n_spins) for j in range(i)]
    if geometry is Geometry.LINEAR:
        return [(i + 1, i) for i in range(n_spins - 1)]
    if geometry is Geometry.CIRCULAR:
        pairs = {
            (max(i, (i + 1) % n_spins), min(i, (i + 1) % n_spins))
            for i in range(n_spins)
        }
        return sorted(pairs)
    raise ValueError(f"unknown geometry {geometry!r}")

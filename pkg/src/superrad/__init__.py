"""Collective dissipation in dipolar-coupled spin-1/2 networks.

Two interoperable engines: a full 2^N Hilbert-space master-equation
integrator (`full_engine`) and a permutation-symmetric collective-basis
rate-equation solver (`collective`), plus operator construction
(`spinops`), physical rates (`model`), sweep/scaling analysis
(`analysis`) and a deterministic CLI (`cli`).
"""

__version__ = "0.1.0"

from . import analysis, collective, full_engine, model, spinops  # noqa: F401
from .model import (  # noqa: F401
    ConfigError,
    DirectRates,
    Geometry,
    SystemConfig,
    ThermalBath,
)
from .trajectory import NoDecayError, NumericalFailure, Trajectory  # noqa: F401

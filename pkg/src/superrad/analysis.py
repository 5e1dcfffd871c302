"""Peak extraction, timescales, parameter sweeps and log-log scaling fits."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import collective, full_engine, model
from .model import Geometry, SystemConfig, ThermalBath
from .trajectory import Trajectory

BURST_REL_MARGIN = 1e-6


@dataclass(frozen=True)
class PeakReport:
    i_max: float
    t_peak: float
    i0: float
    burst: bool


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    r_squared: float
    points: tuple[tuple[float, float], ...]


def _max_workers() -> int:
    env = os.environ.get("SUPERRAD_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _parallel_map(fn, items):
    """Map preserving input order; worker count capped by SUPERRAD_THREADS."""
    workers = min(_max_workers(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def find_peak(trajectory: Trajectory) -> PeakReport:
    """Locate the intensity maximum, refined by quadratic interpolation."""
    t = trajectory.times
    y = trajectory.intensity
    if len(t) < 3:
        raise ValueError("need at least 3 samples to locate a peak")
    i0 = float(y[0])
    k = int(np.argmax(y))
    if k == 0:
        return PeakReport(i_max=i0, t_peak=0.0, i0=i0, burst=False)
    if 0 < k < len(t) - 1:
        # vertex of the parabola through the three bracketing samples
        t0, t1, t2 = t[k - 1], t[k], t[k + 1]
        y0, y1, y2 = y[k - 1], y[k], y[k + 1]
        denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
        a = (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom
        b = (t2**2 * (y0 - y1) + t1**2 * (y2 - y0) + t0**2 * (y1 - y2)) / denom
        if a < 0:
            t_peak = -b / (2.0 * a)
            c = (
                t1 * t2 * (t1 - t2) * y0
                + t2 * t0 * (t2 - t0) * y1
                + t0 * t1 * (t0 - t1) * y2
            ) / denom
            i_max = a * t_peak**2 + b * t_peak + c
        else:
            t_peak, i_max = float(t[k]), float(y[k])
    else:
        t_peak, i_max = float(t[k]), float(y[k])
    i_max = float(max(i_max, y[k]))
    burst = i_max > i0 * (1.0 + BURST_REL_MARGIN)
    return PeakReport(i_max=i_max, t_peak=float(t_peak), i0=i0, burst=burst)


def _collective_run(
    cfg: SystemConfig, t_end: float | None = None, n_samples: int = 400
) -> tuple[Trajectory, float]:
    """Collective-basis run from the all-up state; returns (trajectory, tau_2)."""
    rates = model.rate_set(cfg)
    rm = collective.build_rate_matrix(cfg.n_spins, rates.gamma1, rates.gamma2)
    tau_2 = 1.0 / collective.adr(rm)
    if t_end is None:
        t_end = 3.0 * tau_2
    times = np.concatenate(
        ([0.0], np.geomspace(t_end * 1e-5, t_end, n_samples - 1))
    )
    traj = collective.evolve_populations(
        collective.all_up_populations(cfg.n_spins), rm, times
    )
    return traj, tau_2


def timescales(cfg: SystemConfig, tau_r_method: str = "peak") -> dict[str, float]:
    """tau_r (correlation build-up), tau_2 (dipolar), tau_1 (spin-lattice), us.

    tau_r is the intensity-peak time of a collective run; with
    tau_r_method="dc90" it is instead the time at which the dipolar
    correlation first reaches 90% of its maximum.  tau_1 = 1/(p_+ + p_-),
    infinite when both rates vanish.
    """
    traj, tau_2 = _collective_run(cfg)
    if tau_r_method == "peak":
        tau_r = find_peak(traj).t_peak
    elif tau_r_method == "dc90":
        j = cfg.n_spins / 2.0
        m = j - np.arange(cfg.n_spins + 1)
        jz = traj.populations @ m
        dc = 0.5 * (traj.intensity - cfg.n_spins / 2.0 - jz)
        target = 0.9 * dc.max()
        tau_r = float(traj.times[np.argmax(dc >= target)])
    else:
        raise ValueError(f"unknown tau_r_method {tau_r_method!r}")
    p_plus, p_minus = model.transition_rates(cfg)
    tot = p_plus + p_minus
    tau_1 = math.inf if tot == 0.0 else 1.0 / tot
    return {"tau_r": tau_r, "tau_2": tau_2, "tau_1": tau_1}


def sweep_n(cfg_template: SystemConfig, n_values) -> list[dict]:
    """Collective-engine N sweep at fixed dipolar rates (dense-network ansatz)."""
    n_values = list(n_values)
    if not n_values or any(n < 2 for n in n_values):
        raise ValueError("n_values must be nonempty with every N >= 2")

    def one(n: int) -> dict:
        cfg = replace(cfg_template, n_spins=int(n))
        traj, tau_2 = _collective_run(cfg)
        peak = find_peak(traj)
        return {
            "N": int(n),
            "i_max": peak.i_max,
            "t_peak": peak.t_peak,
            "tau_2": tau_2,
        }

    return _parallel_map(one, n_values)


def _full_run_peak(cfg: SystemConfig, n_samples: int = 400) -> PeakReport:
    """Full-engine run from the all-up state, horizon set by tau_2 and tau_1."""
    rates = model.rate_set(cfg)
    rm = collective.build_rate_matrix(cfg.n_spins, rates.gamma1, rates.gamma2)
    try:
        tau_2 = 1.0 / collective.adr(rm)
    except Exception:
        tau_2 = math.inf
    tot = rates.p_plus + rates.p_minus
    tau_1 = math.inf if tot == 0.0 else 1.0 / tot
    t_end = 3.0 * min(tau_2, tau_1)
    if not math.isfinite(t_end):
        raise ValueError("no finite relaxation timescale; nothing to sweep")
    dim = 2**cfg.n_spins
    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0
    times = np.concatenate(
        ([0.0], np.geomspace(t_end * 1e-5, t_end, n_samples - 1))
    )
    traj = full_engine.evolve(rho0, cfg, t_end, sample_times=times)
    return find_peak(traj)


def sweep_ratio(cfg_template: SystemConfig, ratio_values) -> list[dict]:
    """Full-engine sweep of omega_d / omega_sl at fixed bath coupling."""
    if not isinstance(cfg_template.bath, ThermalBath) or cfg_template.bath.omega_sl <= 0:
        raise ValueError("ratio sweep needs a thermal bath with omega_sl > 0")
    ratio_values = list(ratio_values)
    if not ratio_values:
        raise ValueError("ratio_values must be nonempty")
    omega_sl = cfg_template.bath.omega_sl

    def one(ratio: float) -> dict:
        cfg = replace(cfg_template, omega_d=ratio * omega_sl)
        peak = _full_run_peak(cfg)
        return {"ratio": float(ratio), "i_max_over_i0": peak.i_max / peak.i0}

    return _parallel_map(one, ratio_values)


def sweep_tauc(cfg_template: SystemConfig, tauc_values) -> list[dict]:
    """Collective-engine sweep over the fluctuation correlation time."""
    tauc_values = list(tauc_values)
    if not tauc_values:
        raise ValueError("tauc_values must be nonempty")

    def one(tau_c: float) -> dict:
        cfg = replace(cfg_template, tau_c=float(tau_c))
        traj, tau_2 = _collective_run(cfg)
        peak = find_peak(traj)
        return {
            "omega0_tau_c": cfg.omega0 * cfg.tau_c,
            "tau_2": tau_2,
            "i_max": peak.i_max,
        }

    return _parallel_map(one, tauc_values)


def sweep_geometry(cfg_template: SystemConfig) -> list[dict]:
    """Full-engine peak intensity for all-to-all, circular and linear coupling."""
    if cfg_template.n_spins < 4:
        raise ValueError("geometry sweep needs N >= 4 to separate the cases")

    def one(geometry: Geometry) -> dict:
        cfg = replace(cfg_template, geometry=geometry)
        peak = _full_run_peak(cfg)
        return {"geometry": geometry.value, "i_max": peak.i_max}

    return _parallel_map(
        one, [Geometry.ALL_TO_ALL, Geometry.CIRCULAR, Geometry.LINEAR]
    )


def loglog_fit(points) -> ScalingFit:
    """Ordinary least squares on (log10 x, log10 y)."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise ValueError("need at least 2 points to fit")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("log-log fit requires positive coordinates")
    lx = np.log10([x for x, _ in pts])
    ly = np.log10([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return ScalingFit(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=min(max(r_squared, 0.0), 1.0),
        points=tuple(pts),
    )


def default_n_grid(n_min: int = 10, n_max: int = 1000, points: int = 12) -> list[int]:
    """Log-spaced integer N grid, deduplicated, endpoints included."""
    grid = np.unique(
        np.round(np.geomspace(n_min, n_max, points)).astype(int)
    )
    return [int(n) for n in grid]

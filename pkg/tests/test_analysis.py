"""Peak extraction, timescales, sweeps and log-log fits."""

import math

import numpy as np
import pytest

from superrad import analysis, collective, model
from superrad.model import DirectRates, Geometry, SystemConfig, ThermalBath
from superrad.trajectory import Trajectory


def make_cfg(**kw):
    base = dict(
        n_spins=4,
        omega0=2 * math.pi * 100.0,
        omega_d=0.5,
        theta=math.pi / 4,
        tau_c=0.1,
        bath=DirectRates(0.0, 0.0),
    )
    base.update(kw)
    return SystemConfig(**base)


def synthetic_traj(times, intensity):
    return Trajectory(
        times=np.asarray(times, float),
        observables={"intensity": np.asarray(intensity, float)},
    )


def test_find_peak_quadratic_refinement():
    # exact parabola peaking at t = 2.5 with maximum 7.25
    t = np.linspace(0.0, 5.0, 11)
    y = 1.0 + 5.0 * t - t**2
    peak = analysis.find_peak(synthetic_traj(t, y))
    assert peak.t_peak == pytest.approx(2.5, rel=1e-12)
    assert peak.i_max == pytest.approx(7.25, rel=1e-12)
    assert peak.burst


def test_find_peak_monotonic_decay():
    t = np.linspace(0.0, 5.0, 11)
    peak = analysis.find_peak(synthetic_traj(t, 4.0 * np.exp(-t)))
    assert not peak.burst
    assert peak.t_peak == 0.0
    assert peak.i_max == pytest.approx(4.0)
    with pytest.raises(ValueError):
        analysis.find_peak(synthetic_traj([0.0, 1.0], [1.0, 2.0]))


def test_timescales_ordering():
    cfg = make_cfg(omega_d=2.0, bath=DirectRates(4e-8, 6e-8))
    ts = analysis.timescales(cfg)
    assert ts["tau_r"] < ts["tau_2"] < ts["tau_1"]
    assert ts["tau_1"] == pytest.approx(1e7, rel=1e-12)
    ts_dc = analysis.timescales(cfg, tau_r_method="dc90")
    assert 0.0 < ts_dc["tau_r"] < ts["tau_2"]
    with pytest.raises(ValueError):
        analysis.timescales(cfg, tau_r_method="bogus")


def test_timescales_infinite_tau1():
    ts = analysis.timescales(make_cfg())
    assert math.isinf(ts["tau_1"])


def test_sweep_n_scaling_direction():
    rows = analysis.sweep_n(make_cfg(), [10, 40, 160])
    i_max = [r["i_max"] for r in rows]
    tau_2 = [r["tau_2"] for r in rows]
    assert i_max[0] < i_max[1] < i_max[2]
    assert tau_2[0] > tau_2[1] > tau_2[2]
    with pytest.raises(ValueError):
        analysis.sweep_n(make_cfg(), [1, 4])
    with pytest.raises(ValueError):
        analysis.sweep_n(make_cfg(), [])


def test_sweep_ratio_requires_thermal_bath():
    with pytest.raises(ValueError):
        analysis.sweep_ratio(make_cfg(), [1.0, 10.0])


def test_sweep_tauc_reports_grid():
    rows = analysis.sweep_tauc(make_cfg(), [0.01, 0.1])
    assert [r["omega0_tau_c"] for r in rows] == pytest.approx(
        [0.01 * 2 * math.pi * 100.0, 0.1 * 2 * math.pi * 100.0]
    )
    assert all(r["tau_2"] > 0 for r in rows)


def test_sweep_geometry_needs_enough_spins():
    with pytest.raises(ValueError):
        analysis.sweep_geometry(make_cfg(n_spins=3))


def test_loglog_fit_exact_power_law():
    x = np.array([1.0, 10.0, 100.0, 1000.0])
    fit = analysis.loglog_fit(list(zip(x, 5.0 * x**2)))
    assert fit.slope == pytest.approx(2.0, rel=1e-12)
    assert fit.intercept == pytest.approx(math.log10(5.0), rel=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(ValueError):
        analysis.loglog_fit([(1.0, 2.0)])
    with pytest.raises(ValueError):
        analysis.loglog_fit([(1.0, -2.0), (2.0, 3.0)])


def test_default_n_grid():
    grid = analysis.default_n_grid(10, 1000, 12)
    assert grid[0] == 10 and grid[-1] == 1000
    assert grid == sorted(set(grid))
    assert len(grid) == 12


def test_parallel_map_preserves_order(monkeypatch):
    monkeypatch.setenv("SUPERRAD_THREADS", "4")
    out = analysis._parallel_map(lambda x: x * x, list(range(20)))
    assert out == [x * x for x in range(20)]
    monkeypatch.setenv("SUPERRAD_THREADS", "1")
    assert analysis._parallel_map(lambda x: -x, [3, 1]) == [-3, -1]

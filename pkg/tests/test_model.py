"""Scalar rates, amplitudes, config validation and pair enumeration."""

import math

import numpy as np
import pytest

from superrad import model
from superrad.model import (
    ConfigError,
    DirectRates,
    Geometry,
    SystemConfig,
    ThermalBath,
)


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


def test_y2_frozen_values():
    # oracle values frozen from the orthonormalized closed forms
    assert model.spherical_harmonic_y2(0, math.pi / 4, 0.0) == pytest.approx(
        0.15769578262626002, rel=1e-12
    )
    assert model.spherical_harmonic_y2(2, math.pi / 2, 0.0) == pytest.approx(
        0.3862742020231896, rel=1e-12
    )
    assert model.spherical_harmonic_y2(0, math.pi / 2, 0.0) == pytest.approx(
        -0.31539156525252005, rel=1e-12
    )


def test_y2_conjugation_symmetry():
    theta, phi = 0.7, 1.3
    for m in (1, 2):
        ym = model.spherical_harmonic_y2(-m, theta, phi)
        yp = model.spherical_harmonic_y2(m, theta, phi)
        assert ym == pytest.approx((-1.0) ** m * np.conj(yp), rel=1e-12)


def test_y2_addition_theorem():
    theta, phi = 0.9, 0.4
    total = sum(
        abs(model.spherical_harmonic_y2(m, theta, phi)) ** 2
        for m in (-2, -1, 0, 1, 2)
    )
    assert total == pytest.approx(5.0 / (4.0 * math.pi), rel=1e-12)


def test_dipolar_amplitude_frozen_value():
    cfg = make_cfg(omega_d=1.0)
    # omega_d * Y_2^{-1}(pi/4, 0) = sqrt(15/8pi)/2
    assert model.dipolar_amplitude(1, cfg).real == pytest.approx(
        0.3862742020231896, rel=1e-12
    )
    assert model.dipolar_amplitude(1, cfg).imag == 0.0


def test_gamma_lorentzian_form():
    cfg = make_cfg(omega_d=1.0)
    for m in (0, 1, 2):
        amp2 = abs(model.dipolar_amplitude(m, cfg)) ** 2
        expected = amp2 * cfg.tau_c / (1.0 + (m * cfg.omega0 * cfg.tau_c) ** 2)
        assert model.gamma(m, cfg) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        model.gamma(3, cfg)


def test_gamma_scales_with_coupling_squared():
    c1 = make_cfg(omega_d=1.0)
    c2 = make_cfg(omega_d=3.0)
    assert model.gamma(1, c2) == pytest.approx(9.0 * model.gamma(1, c1), rel=1e-12)


def test_thermal_rates_closed_form():
    bath = ThermalBath(omega_sl=0.02, detuning=0.5, nbar=0.3)
    cfg = make_cfg(bath=bath)
    lorentz = bath.omega_sl**2 * cfg.tau_c / (1.0 + (bath.detuning * cfg.tau_c) ** 2)
    p_plus, p_minus = model.transition_rates(cfg)
    assert p_plus == pytest.approx(bath.nbar * lorentz, rel=1e-12)
    assert p_minus == pytest.approx((bath.nbar + 1.0) * lorentz, rel=1e-12)
    # emission always beats absorption for a thermal bath
    assert p_minus > p_plus


def test_direct_rates_pass_through():
    cfg = make_cfg(bath=DirectRates(p_plus=6e-5, p_minus=4e-5))
    assert model.transition_rates(cfg) == (6e-5, 4e-5)


def test_equilibrium_magnetization():
    assert model.equilibrium_magnetization(0.0, 0.0) == 0.0
    assert model.equilibrium_magnetization(1.0, 3.0) == pytest.approx(-0.5)
    assert model.equilibrium_magnetization(3.0, 1.0) == pytest.approx(0.5)


def test_rate_set_consistency():
    cfg = make_cfg(bath=DirectRates(p_plus=2e-5, p_minus=3e-5))
    rs = model.rate_set(cfg)
    assert rs.gamma1 == pytest.approx(model.gamma(1, cfg), rel=1e-12)
    assert rs.gamma2 == pytest.approx(model.gamma(2, cfg), rel=1e-12)
    assert rs.mz_eq == pytest.approx(-0.2, rel=1e-12)


@pytest.mark.parametrize(
    "kw",
    [
        dict(n_spins=0),
        dict(tau_c=0.0),
        dict(omega0=-1.0),
        dict(omega_d=-0.5),
        dict(alpha_c=1.0),
        dict(alpha_c=-0.1),
        dict(bath=DirectRates(-1e-5, 0.0)),
        dict(bath=ThermalBath(omega_sl=-1.0, detuning=0.0, nbar=0.0)),
        dict(bath=ThermalBath(omega_sl=1.0, detuning=0.0, nbar=-0.5)),
        dict(bath=None),
    ],
)
def test_config_validation(kw):
    with pytest.raises(ConfigError):
        make_cfg(**kw)


def test_pair_list_counts():
    assert len(model.pair_list(Geometry.ALL_TO_ALL, 5)) == 10
    assert model.pair_list(Geometry.LINEAR, 4) == [(1, 0), (2, 1), (3, 2)]
    circ = model.pair_list(Geometry.CIRCULAR, 4)
    assert len(circ) == 4
    assert (3, 0) in circ
    # ring degenerates to a single bond for two spins
    assert model.pair_list(Geometry.CIRCULAR, 2) == [(1, 0)]
    with pytest.raises(ValueError):
        model.pair_list(Geometry.LINEAR, 1)


def test_pair_list_indices_valid():
    for geom in Geometry:
        for i, j in model.pair_list(geom, 6):
            assert 0 <= j < i < 6

"""Collective-basis rate equations: rates, generator structure, propagation
and the asymptotic decay rate."""

import numpy as np
import pytest

from superrad import collective
from superrad.trajectory import NoDecayError


def test_rate_values_two_spins():
    # J = 1 ladder: frozen closed-form values
    assert collective.rate_alpha(1.0, 1.0, 0.7) == pytest.approx(0.7)
    assert collective.rate_gamma(1.0, 1.0, 0.3) == pytest.approx(0.6)
    assert collective.rate_alpha(1.0, -1.0, 0.7) == 0.0
    assert collective.rate_beta(1.0, 1.0, 0.7) == 0.0
    assert collective.rate_delta(1.0, 1.0, 0.3) == 0.0


def test_rates_vanish_at_boundaries():
    j = 2.0
    assert collective.rate_alpha(j, -j, 1.0) == 0.0
    assert collective.rate_beta(j, j, 1.0) == 0.0
    assert collective.rate_gamma(j, -j + 1.0, 1.0) == 0.0
    assert collective.rate_delta(j, j - 1.0, 1.0) == 0.0
    with pytest.raises(ValueError):
        collective.rate_alpha(1.0, 2.0, 1.0)


def test_detailed_balance_pairing():
    # the downward rate out of M equals the upward rate out of M-1 (and the
    # rank-2 analogue two steps down), which makes the generator symmetric
    j = 3.0
    for m in np.arange(-j + 1.0, j + 1.0):
        assert collective.rate_alpha(j, m, 1.3) == pytest.approx(
            collective.rate_beta(j, m - 1.0, 1.3), rel=1e-12
        )
    for m in np.arange(-j + 2.0, j + 1.0):
        assert collective.rate_gamma(j, m, 0.4) == pytest.approx(
            collective.rate_delta(j, m - 2.0, 0.4), rel=1e-12
        )


@pytest.mark.parametrize("n", [2, 3, 4, 7])
def test_rate_matrix_structure(n):
    rm = collective.build_rate_matrix(n, 1.1, 0.4)
    r = rm.matrix
    assert r.shape == (n + 1, n + 1)
    # probability conservation and symmetry
    assert np.abs(r.sum(axis=0)).max() < 1e-12
    assert np.abs(r - r.T).max() < 1e-12
    # off-diagonal rates are nonnegative
    off = r - np.diag(np.diag(r))
    assert off.min() >= 0.0


def test_rate_matrix_matches_literal_difference_form():
    # independently assemble dP_M/dt from the literal difference form and
    # compare against the assembled generator
    n, g1, g2 = 5, 0.9, 0.2
    j = n / 2.0
    rm = collective.build_rate_matrix(n, g1, g2)
    size = n + 1
    r_lit = np.zeros((size, size))
    for k in range(size):
        m = j - k
        for rate, shift in (
            (collective.rate_alpha(j, m, g1), 1),
            (collective.rate_beta(j, m, g1), -1),
            (collective.rate_gamma(j, m, g2), 2),
            (collective.rate_delta(j, m, g2), -2),
        ):
            kk = k + shift
            if 0 <= kk < size:
                r_lit[k, k] -= rate
                r_lit[k, kk] += rate
    assert np.abs(rm.matrix - r_lit).max() < 1e-12


def test_uniform_distribution_is_stationary():
    rm = collective.build_rate_matrix(6, 0.8, 0.3)
    p = np.full(7, 1.0 / 7.0)
    assert np.abs(rm.matrix @ p).max() < 1e-12


def test_evolve_conserves_and_relaxes():
    n = 4
    rm = collective.build_rate_matrix(n, 0.01, 0.0025)
    tau_2 = 1.0 / collective.adr(rm)
    times = np.concatenate(([0.0], np.geomspace(tau_2 / 100, 20 * tau_2, 60)))
    traj = collective.evolve_populations(
        collective.all_up_populations(n), rm, times
    )
    pops = traj.populations
    assert np.abs(pops.sum(axis=1) - 1.0).max() < 1e-10
    assert pops.min() > -1e-10
    # uniform stationary state at long times
    assert np.abs(pops[-1] - 1.0 / (n + 1)).max() < 1e-6
    assert traj.metadata["engine"] == "collective"


def test_evolve_ode_fallback_matches_eig():
    n = 3
    rm = collective.build_rate_matrix(n, 0.02, 0.004)
    times = np.linspace(0.0, 200.0, 40)
    p0 = collective.all_up_populations(n)
    exact = collective.evolve_populations(p0, rm, times)
    old_cap = collective.EXACT_PROPAGATION_MAX_N
    collective.EXACT_PROPAGATION_MAX_N = 0
    try:
        ode = collective.evolve_populations(p0, rm, times)
    finally:
        collective.EXACT_PROPAGATION_MAX_N = old_cap
    assert ode.metadata["method"] == "ode"
    assert np.abs(ode.populations - exact.populations).max() < 1e-8


def test_evolve_rejects_bad_p0():
    rm = collective.build_rate_matrix(3, 1.0, 0.0)
    with pytest.raises(ValueError):
        collective.evolve_populations(np.array([0.5, 0.5]), rm, [0.0, 1.0])
    with pytest.raises(ValueError):
        collective.evolve_populations(
            np.array([0.7, 0.7, -0.4, 0.0]), rm, [0.0, 1.0]
        )


def test_intensity_weights():
    # N=2 triplet: all-up gives (J+M)(J-M+1) = 2, M=0 gives 2, M=-1 gives 0
    assert collective.intensity_from_populations([1.0, 0.0, 0.0], 1.0) == 2.0
    assert collective.intensity_from_populations([0.0, 1.0, 0.0], 1.0) == 2.0
    assert collective.intensity_from_populations([0.0, 0.0, 1.0], 1.0) == 0.0


def test_adr_two_spins_closed_form():
    # J = 1 symmetric generator has nonzero eigenvalues -(g1 + 4 g2)
    # (odd mode) and -3 g1 (even mode)
    g1, g2 = 0.05, 0.01
    rm = collective.build_rate_matrix(2, g1, g2)
    eigs = np.sort(np.linalg.eigvalsh(rm.matrix))
    assert eigs[-1] == pytest.approx(0.0, abs=1e-14)
    assert sorted(-eigs[:2]) == pytest.approx(
        sorted([g1 + 4.0 * g2, 3.0 * g1]), rel=1e-12
    )
    assert collective.adr(rm) == pytest.approx(
        min(g1 + 4.0 * g2, 3.0 * g1), rel=1e-12
    )


def test_adr_scales_linearly_with_rates():
    rm1 = collective.build_rate_matrix(5, 0.02, 0.005)
    rm2 = collective.build_rate_matrix(5, 0.04, 0.010)
    assert collective.adr(rm2) == pytest.approx(2.0 * collective.adr(rm1), rel=1e-10)


def test_adr_no_decay():
    with pytest.raises(NoDecayError):
        collective.adr(collective.build_rate_matrix(4, 0.0, 0.0))

"""Permutation-symmetric rate equations on the principal Dicke ladder.

Populations P_M over |J = N/2, M>, M = J..-J, evolve under a classical
generator whose off-diagonal rates come from the rank-1 and rank-2
nonsecular dipolar channels.  Scales to N ~ 10^3.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .trajectory import NoDecayError, NumericalFailure, Trajectory

EXACT_PROPAGATION_MAX_N = 200


def rate_alpha(j: float, m: float, gamma1: float) -> float:
    """Downward (M -> M-1) rate from the rank-1 nonsecular channel."""
    if abs(m) > j + 1e-12:
        raise ValueError(f"|M| = {abs(m)} exceeds J = {j}")
    return 2.0 * gamma1 * (j + m) * (j - m + 1.0) * (m - 0.5) ** 2


def rate_beta(j: float, m: float, gamma1: float) -> float:
    """Upward (M -> M+1) rate; mirror of alpha."""
    return rate_alpha(j, -m, gamma1)


def rate_gamma(j: float, m: float, gamma2: float) -> float:
    """Double-downward (M -> M-2) rate from the rank-2 nonsecular channel."""
    if abs(m) > j + 1e-12:
        raise ValueError(f"|M| = {abs(m)} exceeds J = {j}")
    return (
        0.5
        * gamma2
        * (j + m)
        * (j - m + 1.0)
        * (j + m - 1.0)
        * (j - m + 2.0)
    )


def rate_delta(j: float, m: float, gamma2: float) -> float:
    """Double-upward (M -> M+2) rate; mirror of gamma."""
    return rate_gamma(j, -m, gamma2)


@dataclass(frozen=True)
class RateMatrix:
    """Generator R of dP/dt = R P on populations ordered M = J..-J."""

    n_spins: int
    matrix: np.ndarray

    @property
    def j(self) -> float:
        return self.n_spins / 2.0

    @property
    def m_values(self) -> np.ndarray:
        return self.j - np.arange(self.n_spins + 1)


def build_rate_matrix(n_spins: int, gamma1: float, gamma2: float) -> RateMatrix:
    """Assemble the (N+1)x(N+1) population generator.

    Row for M: dP_M/dt = -a(P_M - P_{M-1}) - b(P_M - P_{M+1})
                         -g(P_M - P_{M-2}) - d(P_M - P_{M+2}),
    all four rates evaluated at M.  Out-of-range neighbor couplings carry
    rates that vanish algebraically at the boundary; this is asserted
    instead of clamping indices.
    """
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    j = n_spins / 2.0
    size = n_spins + 1
    r = np.zeros((size, size))
    idx = lambda m: round(j - m)
    for k in range(size):
        m = j - k
        channels = (
            (rate_alpha(j, m, gamma1), m - 1.0),
            (rate_beta(j, m, gamma1), m + 1.0),
            (rate_gamma(j, m, gamma2), m - 2.0),
            (rate_delta(j, m, gamma2), m + 2.0),
        )
        for rate, m_nb in channels:
            if abs(m_nb) > j + 1e-12:
                assert rate == 0.0, "boundary rate failed to vanish"
                continue
            r[k, k] -= rate
            r[k, idx(m_nb)] += rate
    return RateMatrix(n_spins=n_spins, matrix=r)


def all_up_populations(n_spins: int) -> np.ndarray:
    p = np.zeros(n_spins + 1)
    p[0] = 1.0
    return p


def evolve_populations(
    p0: np.ndarray,
    rates: RateMatrix,
    sample_times: np.ndarray,
) -> Trajectory:
    """Propagate populations to the sample times.

    Dense eigendecomposition (exact propagation) up to N = 200; stiff
    adaptive ODE integration beyond, or as fallback when the
    eigendecomposition is unusable.
    """
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (rates.n_spins + 1,):
        raise ValueError("population vector length does not match rate matrix")
    if abs(p0.sum() - 1.0) > 1e-10 or p0.min() < -1e-12:
        raise ValueError("p0 is not a probability vector")
    sample_times = np.asarray(sample_times, dtype=float)
    r = rates.matrix
    method = "eig"
    pops = None
    if rates.n_spins <= EXACT_PROPAGATION_MAX_N:
        try:
            evals, vecs = np.linalg.eig(r)
            coeff = np.linalg.solve(vecs, p0)
            pops = np.real(
                (vecs * coeff) @ np.exp(np.outer(evals, sample_times))
            ).T
        except np.linalg.LinAlgError:
            pops = None
    if pops is None:
        method = "ode"
        sol = solve_ivp(
            lambda _t, p: r @ p,
            (0.0, float(sample_times[-1])),
            p0,
            method="LSODA",
            jac=lambda _t, _p: r,
            t_eval=sample_times,
            rtol=1e-10,
            atol=1e-13,
        )
        if not sol.success:
            raise NumericalFailure(
                f"population integration failed: {sol.message}",
                float(sol.t[-1]) if len(sol.t) else 0.0,
            )
        pops = sol.y.T
    sums = pops.sum(axis=1)
    drift = float(np.abs(sums - 1.0).max())
    pops = pops / sums[:, None]
    j = rates.j
    m = rates.m_values
    weights = (j + m) * (j - m + 1.0)
    intensity = pops @ weights
    return Trajectory(
        times=sample_times,
        observables={"intensity": intensity},
        populations=pops,
        metadata={"engine": "collective", "method": method, "norm_drift": drift},
    )


def intensity_from_populations(p: np.ndarray, j: float) -> float:
    """<I> = sum_M (J+M)(J-M+1) P_M for populations ordered M = J..-J."""
    p = np.asarray(p, dtype=float)
    m = j - np.arange(len(p))
    return float(np.sum((j + m) * (j - m + 1.0) * p))


def adr(rates: RateMatrix) -> float:
    """Spectral gap of the population generator, 1/us; tau_2 = 1/adr."""
    r = rates.matrix
    scale = float(np.abs(r).max())
    if scale == 0.0:
        raise NoDecayError("rate matrix is identically zero (no decay)")
    eigs = np.linalg.eigvals(r)
    eps = 1e-12 * scale
    decaying = eigs.real[eigs.real < -eps]
    if decaying.size == 0:
        raise NoDecayError("no decaying eigenvalue found")
    return float(np.abs(decaying).min())

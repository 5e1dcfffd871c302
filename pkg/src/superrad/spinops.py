"""Dense spin-1/2 operator construction.

Single-site Paulis, tensor-embedded site operators, collective angular
momentum operators, rank-2 pair tensors, and the symmetric (Dicke) ladder
basis.  Everything is a plain dense complex ndarray; spin operators follow
the I = sigma/2 convention (eigenvalues +-1/2), raising/lowering operators
are sigma_+- = (sigma_x +- i sigma_y)/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HERMITICITY_TOL = 1e-12
ALGEBRA_TOL = 1e-10

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
    "plus": np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
    "minus": np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex),
    "identity": np.eye(2, dtype=complex),
}


def pauli(kind: str) -> np.ndarray:
    """Return a 2x2 Pauli-type matrix: x, y, z, plus, minus or identity."""
    try:
        return _PAULI[kind].copy()
    except KeyError:
        raise ValueError(f"unknown Pauli kind {kind!r}") from None


def site_operator(op: np.ndarray, site: int, n_spins: int) -> np.ndarray:
    """Embed a 2x2 operator at `site` in an n_spins product space.

    Site 0 is the leftmost Kronecker factor.
    """
    if not 0 <= site < n_spins:
        raise IndexError(f"site {site} out of range for {n_spins} spins")
    left = np.eye(2**site, dtype=complex)
    right = np.eye(2 ** (n_spins - site - 1), dtype=complex)
    return np.kron(np.kron(left, op), right)


@lru_cache(maxsize=128)
def _collective(kind: str, n_spins: int) -> np.ndarray:
    if kind == "J_plus":
        out = sum(site_operator(_PAULI["plus"], i, n_spins) for i in range(n_spins))
    elif kind == "J_minus":
        out = sum(site_operator(_PAULI["minus"], i, n_spins) for i in range(n_spins))
    elif kind == "J_z":
        out = sum(
            0.5 * site_operator(_PAULI["z"], i, n_spins) for i in range(n_spins)
        )
    elif kind == "J_squared":
        jp = _collective("J_plus", n_spins)
        jm = _collective("J_minus", n_spins)
        jz = _collective("J_z", n_spins)
        jx = 0.5 * (jp + jm)
        jy = -0.5j * (jp - jm)
        out = jx @ jx + jy @ jy + jz @ jz
    else:
        raise ValueError(f"unknown collective operator {kind!r}")
    out.setflags(write=False)
    return out


def collective_operator(kind: str, n_spins: int) -> np.ndarray:
    """Collective operator on n_spins: J_plus, J_minus, J_z or J_squared.

    J_z uses spin-1/2 units (single-site eigenvalues +-1/2).
    """
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    return _collective(kind, n_spins).copy()


def pair_tensor(m: int, i: int, j: int, n_spins: int) -> np.ndarray:
    """Rank-2 spherical tensor component for the spin pair (i, j).

    Unnormalized convention chosen so the sum over all pairs reproduces the
    collective forms 3Jz^2 - J^2 (m=0), JzJ+ - J+/2 (m=1) and J+J+/2 (m=2).
    Satisfies T(m)^dagger = T(-m).
    """
    if i == j:
        raise ValueError("pair tensor requires two distinct sites")
    if m not in (-2, -1, 0, 1, 2):
        raise ValueError(f"m must be in -2..2, got {m}")
    iz_i = 0.5 * site_operator(_PAULI["z"], i, n_spins)
    iz_j = 0.5 * site_operator(_PAULI["z"], j, n_spins)
    if m == 0:
        ix_i = 0.5 * site_operator(_PAULI["x"], i, n_spins)
        ix_j = 0.5 * site_operator(_PAULI["x"], j, n_spins)
        iy_i = 0.5 * site_operator(_PAULI["y"], i, n_spins)
        iy_j = 0.5 * site_operator(_PAULI["y"], j, n_spins)
        return 6.0 * iz_i @ iz_j - 2.0 * (
            ix_i @ ix_j + iy_i @ iy_j + iz_i @ iz_j
        )
    kind = "plus" if m > 0 else "minus"
    ipm_i = site_operator(_PAULI[kind], i, n_spins)
    ipm_j = site_operator(_PAULI[kind], j, n_spins)
    if abs(m) == 1:
        return iz_i @ ipm_j + ipm_i @ iz_j
    return ipm_i @ ipm_j


@dataclass(frozen=True)
class DickeBasis:
    """Orthonormal |J=N/2, M> ladder, M = J, J-1, ..., -J (all-up first).

    `vectors` has shape (N+1, 2^N); row k is the state with M = J - k.
    """

    n_spins: int
    vectors: np.ndarray

    @property
    def j(self) -> float:
        return self.n_spins / 2.0

    @property
    def m_values(self) -> np.ndarray:
        return self.j - np.arange(self.n_spins + 1)

    def index_of(self, m: float) -> int:
        k = round(self.j - m)
        if not 0 <= k <= self.n_spins:
            raise ValueError(f"M = {m} outside -J..J for N = {self.n_spins}")
        return k


def dicke_basis(n_spins: int) -> DickeBasis:
    """Build the principal J = N/2 Dicke ladder from the all-up state."""
    if n_spins < 1:
        raise ValueError("n_spins must be >= 1")
    dim = 2**n_spins
    jm = collective_operator("J_minus", n_spins)
    j = n_spins / 2.0
    vectors = np.zeros((n_spins + 1, dim), dtype=complex)
    vectors[0, 0] = 1.0  # all-up product state
    for k in range(n_spins):
        m = j - k
        norm = np.sqrt((j + m) * (j - m + 1.0))
        vectors[k + 1] = jm @ vectors[k] / norm
    return DickeBasis(n_spins=n_spins, vectors=vectors)

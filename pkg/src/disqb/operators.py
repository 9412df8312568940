"""Dense many-body operators for the two battery models.

Everything is built from Pauli matrices via Kronecker products, with the
convention sigma_z = diag(+1, -1): basis state |0> carries sigma_z
eigenvalue +1, and site 1 occupies the leftmost (most significant) tensor
slot.  Both reference Hamiltonians and the transverse charging field are
real symmetric matrices, which is exploited downstream for fast
eigendecompositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

HERMITICITY_TOL = 1e-12

_SIGMA_REAL = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])

# K(4,4) unit cell: sites 1-4 each coupled to sites 5-8 (1-based).
CHIMERA_SITES = 8
CHIMERA_EDGES = tuple((k, j) for k in range(1, 5) for j in range(5, 9))


class ModelKind(Enum):
    ISING_CHAIN = "chain"
    CHIMERA_CELL = "chimera"


class DriveKind(Enum):
    STATIC = "static"
    PERIODIC = "periodic"


@dataclass(frozen=True)
class SystemSpec:
    """Number of qubits and which coupling graph they live on."""

    n_sites: int
    model_kind: ModelKind = ModelKind.ISING_CHAIN

    def __post_init__(self):
        if not 1 <= self.n_sites <= 12:
            raise ValueError(f"n_sites must be in [1, 12], got {self.n_sites}")
        if self.model_kind is ModelKind.CHIMERA_CELL and self.n_sites != CHIMERA_SITES:
            raise ValueError("the Chimera cell model requires exactly 8 sites")

    @property
    def dim(self) -> int:
        return 2**self.n_sites


@dataclass(frozen=True)
class ChargingParams:
    """Transverse charging field: amplitude, and frequency when periodic.

    omega and omega_p are in units of the coupling scale J0 (hbar = 1).
    """

    omega: float
    drive_kind: DriveKind = DriveKind.STATIC
    omega_p: float = 0.0

    def __post_init__(self):
        if self.omega < 0:
            raise ValueError("omega must be nonnegative")
        if self.drive_kind is DriveKind.PERIODIC and self.omega_p <= 0:
            raise ValueError("omega_p must be positive for a periodic drive")

    def amplitude(self, t: float) -> float:
        """Instantaneous field amplitude at time t."""
        if self.drive_kind is DriveKind.STATIC:
            return self.omega
        return self.omega * np.cos(self.omega_p * t)


def require_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = np.max(np.abs(a - a.conj().T))
    if dev >= tol:
        raise ValueError(f"matrix is not Hermitian (max |A - A^dag| = {dev:.3e})")


def _embed_real(factors: dict[int, np.ndarray], n: int) -> np.ndarray:
    """Kron together n slots, identity except at the 1-based sites in factors."""
    op = np.ones((1, 1))
    eye = np.eye(2)
    for site in range(1, n + 1):
        op = np.kron(op, factors.get(site, eye))
    return op


def embed_pauli(site: int, axis: str, spec: SystemSpec) -> np.ndarray:
    """Single-site Pauli operator I x ... x sigma_axis x ... x I.

    site is 1-based; slot 1 is the leftmost tensor factor.
    """
    if not 1 <= site <= spec.n_sites:
        raise ValueError(f"site {site} out of range for {spec.n_sites} sites")
    if axis in _SIGMA_REAL:
        return _embed_real({site: _SIGMA_REAL[axis]}, spec.n_sites).astype(complex)
    if axis == "y":
        op = np.ones((1, 1), dtype=complex)
        eye = np.eye(2, dtype=complex)
        for k in range(1, spec.n_sites + 1):
            op = np.kron(op, _SIGMA_Y if k == site else eye)
        return op
    raise ValueError(f"unknown Pauli axis {axis!r}")


def spin_z_table(n: int) -> np.ndarray:
    """sigma_z eigenvalues per basis state: shape (2^n, n), entries +-1.

    Column k-1 holds the sigma_z value of site k for every computational
    basis index (site 1 = most significant bit).
    """
    idx = np.arange(2**n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1
    return 1.0 - 2.0 * bits


def build_chain_reference(couplings, spec: SystemSpec) -> np.ndarray:
    """Ising-chain reference Hamiltonian (open boundaries).

    H = sum_k h sigma^z_k - sum_k J1_k sigma^x_k sigma^x_{k+1}
        + sum_k J2_k sigma^x_k sigma^x_{k+2}

    Note the signs: minus on nearest-neighbor, plus on next-to-nearest.
    Returns a real symmetric float64 matrix.
    """
    n = spec.n_sites
    j1 = np.asarray(couplings.j1, dtype=float)
    j2 = np.asarray(couplings.j2, dtype=float)
    if j1.shape != (max(n - 1, 0),):
        raise ValueError(f"expected {n - 1} nearest-neighbor couplings, got {j1.shape}")
    if j2.shape != (max(n - 2, 0),):
        raise ValueError(f"expected {n - 2} next-to-nearest couplings, got {j2.shape}")

    sz = spin_z_table(n)
    h = np.diag(couplings.h * sz.sum(axis=1))
    sx = _SIGMA_REAL["x"]
    for k in range(1, n):
        h -= j1[k - 1] * _embed_real({k: sx, k + 1: sx}, n)
    for k in range(1, n - 1):
        h += j2[k - 1] * _embed_real({k: sx, k + 2: sx}, n)
    return h


def build_chimera_reference(couplings, spec: SystemSpec) -> np.ndarray:
    """Chimera-cell reference Hamiltonian, diagonal in the computational basis.

    H = sum_k h_k sigma^z_k + sum_{<k,j>} J_kj sigma^z_k sigma^z_j over the
    16 K(4,4) edges.
    """
    if spec.model_kind is not ModelKind.CHIMERA_CELL:
        raise ValueError("spec must describe the Chimera cell model")
    h = np.asarray(couplings.h, dtype=float)
    j = np.asarray(couplings.j, dtype=float)
    if h.shape != (CHIMERA_SITES,):
        raise ValueError(f"expected {CHIMERA_SITES} on-site fields, got {h.shape}")
    if j.shape != (len(CHIMERA_EDGES),):
        raise ValueError(f"expected {len(CHIMERA_EDGES)} edge couplings, got {j.shape}")

    sz = spin_z_table(CHIMERA_SITES)
    diag = sz @ h
    for (k, kj), j_kj in zip(CHIMERA_EDGES, j):
        diag += j_kj * sz[:, k - 1] * sz[:, kj - 1]
    return np.diag(diag)


def transverse_field_sum(spec: SystemSpec) -> np.ndarray:
    """sum_k sigma^x_k, the generator of the local charging field."""
    n = spec.n_sites
    sx = _SIGMA_REAL["x"]
    out = np.zeros((spec.dim, spec.dim))
    for k in range(1, n + 1):
        out += _embed_real({k: sx}, n)
    return out


def build_charging(params: ChargingParams, spec: SystemSpec, t: float = 0.0) -> np.ndarray:
    """Charging Hamiltonian sum_k Omega sigma^x_k, modulated by cos(omega_p t)
    when the drive is periodic."""
    return params.amplitude(t) * transverse_field_sum(spec)


def build_chain_local(h: float, spec: SystemSpec) -> np.ndarray:
    """Local (on-site field) part of the chain reference Hamiltonian."""
    sz = spin_z_table(spec.n_sites)
    return np.diag(h * sz.sum(axis=1))


def build_chimera_local(h_fields, spec: SystemSpec) -> np.ndarray:
    """Local (on-site field) part of the Chimera reference Hamiltonian."""
    sz = spin_z_table(spec.n_sites)
    return np.diag(sz @ np.asarray(h_fields, dtype=float))

"""Hermitian eigendecomposition with deterministic phase conventions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import require_hermitian

#: eigenvalues closer than this (relative to the spectral norm) are treated
#: as a degenerate cluster, where the dephasing basis is solver-dependent
DEGENERACY_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    def has_degeneracy(self) -> bool:
        """True if any adjacent gap falls below the degeneracy threshold."""
        if self.dim < 2:
            return False
        scale = max(np.abs(self.eigenvalues[0]), np.abs(self.eigenvalues[-1]), 1e-300)
        return bool(np.min(np.diff(self.eigenvalues)) < DEGENERACY_RTOL * scale)


@dataclass(frozen=True)
class GroundAndTop:
    """Extremal eigenvectors of a reference Hamiltonian and its capability.

    e_max is the gap between the top and bottom eigenvalues; the degeneracy
    flags warn that the returned extremal vectors are a solver-dependent
    choice within a degenerate cluster.
    """

    ground: np.ndarray
    top: np.ndarray
    e_max: float
    ground_degenerate: bool
    top_degenerate: bool


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make each column's largest-magnitude entry real and positive."""
    anchor = np.abs(vectors).argmax(axis=0)
    lead = vectors[anchor, np.arange(vectors.shape[1])]
    if np.iscomplexobj(vectors):
        phase = lead / np.abs(lead)
        return vectors * phase.conj()[None, :]
    return vectors * np.sign(lead)[None, :]


def eig_hermitian(h: np.ndarray) -> SpectralDecomposition:
    """Full decomposition of a Hermitian matrix, eigenvalues ascending.

    Real symmetric input stays in the real path (roughly 4x faster at
    d = 256 than the complex solver).  Output is deterministic for a fixed
    input: LAPACK ordering plus a canonical per-column phase.
    """
    require_hermitian(h)
    if np.iscomplexobj(h) and np.max(np.abs(h.imag)) == 0.0:
        h = h.real
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return SpectralDecomposition(eigenvalues, _fix_phases(eigenvectors))


def ground_and_top(h: np.ndarray) -> GroundAndTop:
    """Extremal eigenstates of h and the capability e_max = eps_d - eps_1."""
    dec = eig_hermitian(h)
    eps = dec.eigenvalues
    scale = max(np.abs(eps[0]), np.abs(eps[-1]), 1e-300)
    tol = DEGENERACY_RTOL * scale
    return GroundAndTop(
        ground=dec.eigenvectors[:, 0].copy(),
        top=dec.eigenvectors[:, -1].copy(),
        e_max=float(eps[-1] - eps[0]),
        ground_degenerate=bool(dec.dim > 1 and eps[1] - eps[0] < tol),
        top_degenerate=bool(dec.dim > 1 and eps[-1] - eps[-2] < tol),
    )

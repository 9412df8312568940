"""Figures of merit for the charging process.

Ergotropy follows the spectral formula: with populations p_i sorted
descending and reference levels eps_i ascending,

    ergotropy(rho, H) = tr(rho H) - sum_i eps_i p_i,

the subtracted term being the passive-state energy.  The incoherent part is
the ergotropy surviving full dephasing in the reference eigenbasis; the
coherent part is the remainder.

The density-matrix functions are the general contract; trajectory_metrics
is the equivalent pure-state evaluation used on every propagated state,
where all quantities reduce to the populations |<eps_i|psi>|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralDecomposition

RHO_TOL = 1e-10


def check_density_matrix(rho: np.ndarray, tol: float = RHO_TOL) -> None:
    """Validate Hermiticity, unit trace and positive semidefiniteness."""
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"density matrix trace is {tr}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has a negative eigenvalue")


def _populations(rho: np.ndarray, href: SpectralDecomposition) -> np.ndarray:
    """Diagonal of rho in the reference eigenbasis."""
    v = href.eigenvectors
    return np.real(np.einsum("ij,jk,ki->i", v.conj().T, rho, v))


def ergotropy(rho: np.ndarray, href: SpectralDecomposition, validate: bool = True) -> float:
    """Maximum unitarily extractable energy of rho against the reference."""
    if validate:
        check_density_matrix(rho)
    p_desc = np.linalg.eigvalsh(rho)[::-1]
    energy = float(_populations(rho, href) @ href.eigenvalues)
    passive = float(p_desc @ href.eigenvalues)
    return energy - passive


def dephase(rho: np.ndarray, href: SpectralDecomposition) -> np.ndarray:
    """Kill all coherences of rho in the reference eigenbasis.

    Preserves the trace and the reference energy.  With degenerate
    reference levels the result depends on the solver's basis choice
    within each cluster.
    """
    v = href.eigenvectors
    populations = _populations(rho, href)
    return (v * populations[None, :]) @ v.conj().T


def ergotropy_split(rho: np.ndarray, href: SpectralDecomposition) -> tuple[float, float]:
    """(incoherent, coherent) parts; incoherent is the dephased ergotropy."""
    total = ergotropy(rho, href)
    incoherent = ergotropy(dephase(rho, href), href, validate=False)
    return incoherent, total - incoherent


def fidelity_to_ground(psi: np.ndarray, ground: np.ndarray) -> float:
    """|<ground|psi>| for normalized pure states.

    Equal to the Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)) when
    both arguments are pure.
    """
    for state in (psi, ground):
        if abs(np.linalg.norm(state) - 1.0) > 1e-9:
            raise ValueError("states must be normalized")
    return float(np.abs(np.vdot(ground, psi)))


def l1_coherence_normalized(rho: np.ndarray, n_sites: int) -> float:
    """sum_{i != j} |rho_ij| in the computational basis over C_max = 2^N - 1.

    C_max is the l1 coherence of the N-fold product of (|e> + |g>)/sqrt(2),
    so the result lies in [0, 1].
    """
    c_max = 2**n_sites - 1
    abs_rho = np.abs(rho)
    return float((abs_rho.sum() - np.trace(abs_rho)) / c_max)


def dimensionless_power(times: np.ndarray, ergotropy_curve: np.ndarray, omega: float) -> np.ndarray:
    """P0(t) = (E(t) - E(0)) / (Omega t) on a grid that includes t = 0.

    The t = 0 entry is undefined and returned as NaN.  The physical average
    power is recovered as P = Omega * E_max_bar * P0.
    """
    times = np.asarray(times, dtype=float)
    curve = np.asarray(ergotropy_curve, dtype=float)
    if times.size == 0 or times[0] != 0.0:
        raise ValueError("power needs a curve that includes t = 0")
    if omega <= 0:
        raise ValueError("omega must be positive")
    out = np.full_like(curve, np.nan)
    out[1:] = (curve[1:] - curve[0]) / (omega * times[1:])
    return out


@dataclass(frozen=True)
class TrajectoryMetrics:
    """Per-time metrics of a single realization, normalized by e_max."""

    t: np.ndarray
    ergotropy: np.ndarray
    incoherent: np.ndarray
    coherent: np.ndarray
    fidelity: np.ndarray
    coherence: np.ndarray
    power: np.ndarray


def trajectory_metrics(
    states: np.ndarray,
    href: SpectralDecomposition,
    e_max: float,
    times: np.ndarray,
    omega: float,
    n_sites: int,
) -> TrajectoryMetrics:
    """Evaluate all metrics along a pure-state trajectory.

    For a pure state the reference-basis populations q_i = |<eps_i|psi>|^2
    give everything at once: energy q.eps, total ergotropy q.eps - eps_1,
    dephased (incoherent) ergotropy q.eps - sort_desc(q).eps, and fidelity
    |q_1|^(1/2) against the ground vector.  states has one row per time.
    """
    eps = href.eigenvalues
    amp = states @ href.eigenvectors.conj()  # row t, column i: <eps_i|psi(t)>
    q = np.abs(amp) ** 2
    energy = q @ eps
    total = energy - eps[0]
    q_desc = -np.sort(-q, axis=1)
    incoherent = energy - q_desc @ eps
    coherent = total - incoherent
    fidelity = np.abs(amp[:, 0])
    abs_states = np.abs(states)
    l1 = abs_states.sum(axis=1) ** 2 - (abs_states**2).sum(axis=1)
    coherence = l1 / (2**n_sites - 1)
    scaled = total / e_max
    if omega > 0:
        power = dimensionless_power(times, scaled, omega)
    else:
        power = np.full_like(scaled, np.nan)
    return TrajectoryMetrics(
        t=np.asarray(times, dtype=float),
        ergotropy=scaled,
        incoherent=incoherent / e_max,
        coherent=coherent / e_max,
        fidelity=fidelity,
        coherence=coherence,
        power=power,
    )

"""Unitary time evolution of the battery state.

The static drive is propagated exactly through the eigendecomposition of
the total driving Hamiltonian.  The periodic drive uses piecewise-constant
midpoint stepping: on each substep [t, t + dt] the Hamiltonian is frozen at
its midpoint value and exponentiated exactly, which is second order in dt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import ChargingParams, DriveKind, SystemSpec, transverse_field_sum
from .spectral import eig_hermitian

NORM_TOL = 1e-9

#: default substep for the periodic stepper, in units of 1/J0
DEFAULT_PERIODIC_STEP = 0.01


class ConvergenceError(RuntimeError):
    """Raised when the periodic stepper fails its step-halving certificate."""


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing output times starting at 0 (dimensionless, J0 t)."""

    points: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.points, dtype=float)
        if t.size == 0:
            raise ValueError("time grid must not be empty")
        if t[0] != 0.0:
            raise ValueError("time grid must start at 0")
        if not np.all(np.isfinite(t)):
            raise ValueError("time grid must be finite")
        if t.size > 1 and np.min(np.diff(t)) <= 0:
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "points", t)

    @classmethod
    def logarithmic(cls, t_min: float = 1e-2, t_max: float = 1e3, n_points: int = 200) -> "TimeGrid":
        """t = 0 followed by n_points log-spaced times in [t_min, t_max]."""
        if t_min <= 0 or t_max <= t_min:
            raise ValueError("need 0 < t_min < t_max")
        if n_points < 1:
            raise ValueError("n_points must be at least 1")
        pts = np.logspace(np.log10(t_min), np.log10(t_max), n_points)
        return cls(np.concatenate(([0.0], pts)))

    def __len__(self) -> int:
        return self.points.size


def _check_state(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (|psi| = {norm:.12f})")
    return psi


def propagate_static(h_d: np.ndarray, psi0: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """psi(t) = V exp(-i Lambda t) V^dag psi0 on every grid point.

    Exact up to eigensolver accuracy; no step-size error.  Returns an array
    of shape (len(grid), dim), row k being the state at grid.points[k].
    """
    psi0 = _check_state(psi0)
    dec = eig_hermitian(h_d)
    a0 = dec.eigenvectors.conj().T @ psi0
    phases = np.exp(-1j * np.outer(dec.eigenvalues, grid.points))
    out = (dec.eigenvectors @ (phases * a0[:, None])).T
    out[grid.points == 0.0] = psi0  # exp(-i H 0) is the identity, exactly
    return out


def propagate_periodic(
    h_ref: np.ndarray,
    params: ChargingParams,
    psi0: np.ndarray,
    grid: TimeGrid,
    spec: SystemSpec,
    step: float = DEFAULT_PERIODIC_STEP,
) -> np.ndarray:
    """Midpoint-frozen stepping under H(t) = H_ref + Omega cos(omega_p t) X.

    Substeps are chosen per grid interval so that they land exactly on the
    grid points and never exceed `step`.  Each substep applies
    exp(-i H(t_mid) dt) through a fresh eigendecomposition of the frozen
    Hamiltonian; the state is renormalized after each substep to stop
    rounding drift over long runs.
    """
    if params.drive_kind is not DriveKind.PERIODIC:
        raise ValueError("propagate_periodic requires a periodic drive")
    if step <= 0:
        raise ValueError("step must be positive")
    psi = _check_state(psi0)
    x = transverse_field_sum(spec)
    out = np.empty((len(grid), psi.size), dtype=complex)
    out[0] = psi
    t = grid.points
    for k in range(1, t.size):
        span = t[k] - t[k - 1]
        n_sub = max(1, int(np.ceil(span / step - 1e-12)))
        dt = span / n_sub
        for i in range(n_sub):
            t_mid = t[k - 1] + (i + 0.5) * dt
            frozen = h_ref + params.amplitude(t_mid) * x
            w, v = np.linalg.eigh(frozen)
            psi = v @ (np.exp(-1j * w * dt) * (v.conj().T @ psi))
            psi /= np.linalg.norm(psi)
        out[k] = psi
    return out


@dataclass(frozen=True)
class ConvergenceCertificate:
    """Step-halving self-consistency record for one periodic trajectory."""

    step: float
    halved_step: float
    max_state_difference: float
    tolerance: float
    converged: bool

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "halved_step": self.halved_step,
            "max_state_difference": self.max_state_difference,
            "tolerance": self.tolerance,
            "converged": self.converged,
        }


def certify_periodic_step(
    h_ref: np.ndarray,
    params: ChargingParams,
    psi0: np.ndarray,
    grid: TimeGrid,
    spec: SystemSpec,
    step: float = DEFAULT_PERIODIC_STEP,
    tolerance: float = 1e-6,
) -> ConvergenceCertificate:
    """Propagate with step and step/2 and compare states on every grid point."""
    full = propagate_periodic(h_ref, params, psi0, grid, spec, step)
    half = propagate_periodic(h_ref, params, psi0, grid, spec, step / 2)
    diff = float(np.max(np.linalg.norm(full - half, axis=1)))
    return ConvergenceCertificate(
        step=step,
        halved_step=step / 2,
        max_state_difference=diff,
        tolerance=tolerance,
        converged=diff < tolerance,
    )

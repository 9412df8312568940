"""Disorder-ensemble orchestration and aggregation.

A realization index n maps deterministically to couplings, a reference
Hamiltonian, a trajectory from its ground state under the driven dynamics,
and per-time metrics normalized by that realization's capability e_max.
Aggregation is an order-independent reduction, so results are identical for
any worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import cost as cost_mod
from .disorder import (
    ChainCouplings,
    ChimeraCouplings,
    DisorderSpec,
    realization_rng,
    sample_chain,
    sample_chimera,
)
from .dynamics import (
    ConvergenceCertificate,
    ConvergenceError,
    DEFAULT_PERIODIC_STEP,
    TimeGrid,
    certify_periodic_step,
    propagate_periodic,
    propagate_static,
)
from .metrics import TrajectoryMetrics, trajectory_metrics
from .operators import (
    ChargingParams,
    DriveKind,
    ModelKind,
    SystemSpec,
    build_chain_local,
    build_chain_reference,
    build_charging,
    build_chimera_local,
    build_chimera_reference,
    transverse_field_sum,
)
from .spectral import SpectralDecomposition, eig_hermitian

DEFAULT_SEED = 42
E_MAX_FLOOR = 1e-8
_MAX_RESAMPLE_ATTEMPTS = 64

#: metric order used everywhere downstream (CSV, figures, aggregation)
METRIC_NAMES = ("ergotropy", "fidelity", "power", "coherent", "incoherent", "coherence")

#: charging window (dimensionless time) used for time-averaged comparisons
CHARGING_WINDOW = (1.0, 100.0)


class InvariantError(RuntimeError):
    """A computed quantity violated one of the hard invariants."""


@dataclass(frozen=True)
class EnsembleConfig:
    model: str
    n_sites: int
    disorder: DisorderSpec
    charging: ChargingParams
    grid: TimeGrid
    n_realizations: int = 100
    master_seed: int = DEFAULT_SEED
    threads: int = 1
    periodic_step: float = DEFAULT_PERIODIC_STEP

    def __post_init__(self):
        if self.model not in ("chain", "chimera"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        self.system_spec()  # validates n_sites against the model

    def system_spec(self) -> SystemSpec:
        kind = ModelKind.ISING_CHAIN if self.model == "chain" else ModelKind.CHIMERA_CELL
        return SystemSpec(n_sites=self.n_sites, model_kind=kind)

    def as_dict(self) -> dict:
        g = self.grid.points
        return {
            "model": self.model,
            "preset": self.disorder.preset,
            "delta": self.disorder.delta,
            "j2": self.disorder.j2 if self.model == "chain" else None,
            "h": self.disorder.h if self.model == "chain" else None,
            "random_j2": self.disorder.random_j2,
            "j0": self.disorder.j0,
            "omega": self.charging.omega,
            "omega_p": self.charging.omega_p,
            "drive": self.charging.drive_kind.value,
            "n_realizations": self.n_realizations,
            "seed": self.master_seed,
            "grid.min": float(g[1]) if g.size > 1 else None,
            "grid.max": float(g[-1]),
            "grid.points": int(g.size - 1),
            "threads": self.threads,
            "periodic_step": self.periodic_step,
        }


@dataclass(frozen=True)
class TrajectoryRecord:
    """Everything computed for one disorder realization."""

    index: int
    couplings: object
    e_max: float
    degenerate: bool
    attempts: int
    metrics: TrajectoryMetrics


@dataclass
class EnsembleResult:
    t: np.ndarray
    means: dict
    stderrs: dict
    e_max: np.ndarray
    degeneracy_count: int
    resample_audit: list
    n_realizations: int
    config: Optional[EnsembleConfig] = None
    records: list = field(default_factory=list)
    wall_time: float = 0.0
    certificate: Optional[ConvergenceCertificate] = None


def _sample_couplings(config: EnsembleConfig, rng):
    if config.model == "chain":
        return sample_chain(config.disorder, config.n_sites, rng)
    return sample_chimera(config.disorder, rng)


def _build_reference(config: EnsembleConfig, couplings) -> np.ndarray:
    spec = config.system_spec()
    if config.model == "chain":
        return build_chain_reference(couplings, spec)
    return build_chimera_reference(couplings, spec)


def _check_trajectory(m: TrajectoryMetrics, index: int) -> None:
    if abs(m.ergotropy[0]) > 1e-10:
        raise InvariantError(f"realization {index}: ergotropy({m.t[0]}) = {m.ergotropy[0]:.3e} != 0")
    if abs(m.fidelity[0] - 1.0) > 1e-10:
        raise InvariantError(f"realization {index}: fidelity(0) = {m.fidelity[0]:.12f} != 1")
    if m.ergotropy.min() < -1e-9 or m.ergotropy.max() > 1.0 + 1e-9:
        raise InvariantError(f"realization {index}: normalized ergotropy left [0, 1]")
    if np.max(np.abs(m.ergotropy - m.incoherent - m.coherent)) > 1e-9:
        raise InvariantError(f"realization {index}: total != incoherent + coherent")


def run_realization(config: EnsembleConfig, n: int) -> TrajectoryRecord:
    """Sample, build, propagate and measure realization n.

    Realizations whose capability e_max falls below the floor (possible
    only for near-zero disorder) are resampled from the attempt-indexed
    seed stream; the attempt count is kept for the audit trail.
    """
    spec = config.system_spec()
    couplings = None
    h_ref = None
    dec: Optional[SpectralDecomposition] = None
    attempts = 0
    for attempt in range(_MAX_RESAMPLE_ATTEMPTS):
        attempts = attempt + 1
        rng = realization_rng(config.master_seed, n, attempt)
        couplings = _sample_couplings(config, rng)
        h_ref = _build_reference(config, couplings)
        dec = eig_hermitian(h_ref)
        if dec.eigenvalues[-1] - dec.eigenvalues[0] >= E_MAX_FLOOR:
            break
    else:
        raise InvariantError(
            f"realization {n}: e_max below {E_MAX_FLOOR} after "
            f"{_MAX_RESAMPLE_ATTEMPTS} resampling attempts"
        )

    e_max = float(dec.eigenvalues[-1] - dec.eigenvalues[0])
    ground = dec.eigenvectors[:, 0].astype(complex)
    t_phys = TimeGrid(config.grid.points / config.disorder.j0)

    if config.charging.drive_kind is DriveKind.STATIC:
        h_d = h_ref + build_charging(config.charging, spec)
        states = propagate_static(h_d, ground, t_phys)
    else:
        states = propagate_periodic(
            h_ref, config.charging, ground, t_phys, spec, config.periodic_step
        )

    m = trajectory_metrics(
        states,
        dec,
        e_max,
        times=config.grid.points,
        omega=config.charging.omega / config.disorder.j0,
        n_sites=config.n_sites,
    )
    _check_trajectory(m, n)
    return TrajectoryRecord(
        index=n,
        couplings=couplings,
        e_max=e_max,
        degenerate=dec.has_degeneracy(),
        attempts=attempts,
        metrics=m,
    )


def aggregate(records: list) -> EnsembleResult:
    """Pointwise mean and standard error over realizations of each metric.

    All records must share one grid; the reduction iterates in realization
    order, so the result does not depend on how the records were produced.
    """
    if not records:
        raise ValueError("cannot aggregate zero records")
    records = sorted(records, key=lambda r: r.index)
    t = records[0].metrics.t
    for r in records[1:]:
        if not np.array_equal(r.metrics.t, t):
            raise ValueError("records do not share a common time grid")

    n = len(records)
    means, stderrs = {}, {}
    for name in METRIC_NAMES:
        stack = np.vstack([getattr(r.metrics, name) for r in records])
        means[name] = stack.mean(axis=0)
        if n > 1:
            stderrs[name] = stack.std(axis=0, ddof=1) / np.sqrt(n)
        else:
            stderrs[name] = np.zeros_like(means[name])

    erg = means["ergotropy"]
    if erg.min() < -1e-9 or erg.max() > 1.0 + 1e-9:
        raise InvariantError("mean normalized ergotropy left [0, 1]")

    return EnsembleResult(
        t=t,
        means=means,
        stderrs=stderrs,
        e_max=np.array([r.e_max for r in records]),
        degeneracy_count=sum(1 for r in records if r.degenerate),
        resample_audit=[(r.index, r.attempts) for r in records if r.attempts > 1],
        n_realizations=n,
        records=list(records),
    )


def run_ensemble(config: EnsembleConfig) -> EnsembleResult:
    """Run all realizations (realization-level thread parallelism) and
    aggregate.  For a periodic drive, a step-halving certificate is computed
    on realization 0 first and failure aborts the whole run."""
    start = time.perf_counter()
    certificate = None
    if config.charging.drive_kind is DriveKind.PERIODIC:
        certificate = _certify_first_realization(config)
        if not certificate.converged:
            raise ConvergenceError(
                f"periodic step {config.periodic_step} not converged: "
                f"max state difference {certificate.max_state_difference:.3e} "
                f"exceeds {certificate.tolerance:.1e}"
            )

    indices = range(config.n_realizations)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            records = list(pool.map(lambda n: run_realization(config, n), indices))
    else:
        records = [run_realization(config, n) for n in indices]

    result = aggregate(records)
    result.config = config
    result.wall_time = time.perf_counter() - start
    result.certificate = certificate
    return result


def _certify_first_realization(config: EnsembleConfig) -> ConvergenceCertificate:
    spec = config.system_spec()
    rng = realization_rng(config.master_seed, 0, 0)
    couplings = _sample_couplings(config, rng)
    h_ref = _build_reference(config, couplings)
    dec = eig_hermitian(h_ref)
    ground = dec.eigenvectors[:, 0].astype(complex)
    t_phys = TimeGrid(config.grid.points / config.disorder.j0)
    return certify_periodic_step(
        h_ref, config.charging, ground, t_phys, spec, config.periodic_step
    )


@dataclass(frozen=True)
class CostEnsemble:
    """Interaction and charging costs over one disorder ensemble."""

    model: str
    delta: float
    c_int: np.ndarray
    c_ch: np.ndarray
    c_int_norm: np.ndarray
    c_ch_norm: np.ndarray

    def stats(self) -> dict:
        out = {"model": self.model, "delta": self.delta}
        for name in ("c_int", "c_ch", "c_int_norm", "c_ch_norm"):
            values = getattr(self, name)
            out[f"mean_{name}"] = float(values.mean())
            if values.size > 1:
                out[f"stderr_{name}"] = float(values.std(ddof=1) / np.sqrt(values.size))
            else:
                out[f"stderr_{name}"] = 0.0
        return out


def cost_ensemble(
    model: str,
    disorder: DisorderSpec,
    charging: ChargingParams,
    n_realizations: int = 100,
    master_seed: int = DEFAULT_SEED,
    n_sites: int = 8,
) -> CostEnsemble:
    """Costs per realization, normalized by that realization's e_max.

    The charger is costed at its static amplitude (a periodic drive is
    evaluated at t = 0).  Each realization's closed-form charging cost must
    match the matrix norms to 1e-9, otherwise the run is aborted.
    """
    kind = ModelKind.ISING_CHAIN if model == "chain" else ModelKind.CHIMERA_CELL
    spec = SystemSpec(n_sites=n_sites, model_kind=kind)
    omega = charging.omega
    c_int = np.empty(n_realizations)
    c_ch = np.empty(n_realizations)
    e_max = np.empty(n_realizations)
    for n in range(n_realizations):
        rng = realization_rng(master_seed, n, 0)
        if model == "chain":
            couplings = sample_chain(disorder, n_sites, rng)
            h_ref = build_chain_reference(couplings, spec)
            h0 = build_chain_local(couplings.h, spec)
            strength_sq = cost_mod.chain_xi_squared(couplings, n_sites)
        else:
            couplings = sample_chimera(disorder, rng)
            h_ref = build_chimera_reference(couplings, spec)
            h0 = build_chimera_local(couplings.h, spec)
            strength_sq = cost_mod.chimera_lambda_squared(couplings)
        h_total = h_ref + omega * transverse_field_sum(spec)
        c_int[n] = cost_mod.cost_interactions(h_ref, h0)
        c_ch[n] = cost_mod.cost_charging(h_total, h_ref)
        closed = cost_mod.closed_form_charging_cost(strength_sq, omega, n_sites)
        if abs(closed - c_ch[n]) > 1e-9:
            raise InvariantError(
                f"realization {n}: closed-form charging cost {closed!r} "
                f"disagrees with matrix norm {c_ch[n]!r}"
            )
        eps = np.linalg.eigvalsh(h_ref)
        e_max[n] = eps[-1] - eps[0]
    return CostEnsemble(
        model=model,
        delta=disorder.delta,
        c_int=c_int,
        c_ch=c_ch,
        c_int_norm=c_int / e_max,
        c_ch_norm=c_ch / e_max,
    )


def time_window_average(record_metric: np.ndarray, t: np.ndarray, window=CHARGING_WINDOW) -> float:
    """Mean of one metric curve over grid points inside the window."""
    mask = (t >= window[0]) & (t <= window[1])
    if not mask.any():
        raise ValueError(f"no grid points inside window {window}")
    return float(record_metric[mask].mean())

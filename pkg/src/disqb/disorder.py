"""Disorder sampling for both battery models, with deterministic seeding.

Realization n is a pure function of (master_seed, n): each realization gets
its own counter-indexed seed stream, so results never depend on execution
order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

#: preset name -> (model, delta, h / J0, j2 / J0); None marks fields the
#: Chimera model does not use.
PRESETS = {
    "chain-anderson": ("chain", 1.0, 0.6, 0.0),
    "chain-ergodic": ("chain", 1.0, 0.6, 0.3),
    "chain-mbl": ("chain", 5.0, 0.6, 0.3),
    "chimera-ergodic": ("chimera", 2.0, None, None),
    "chimera-mbl": ("chimera", 6.0, None, None),
}


@dataclass(frozen=True)
class ChainCouplings:
    """One chain realization: uniform field h, J1 nearest, J2 next-to-nearest."""

    h: float
    j1: np.ndarray
    j2: np.ndarray


@dataclass(frozen=True)
class ChimeraCouplings:
    """One Chimera realization: 8 on-site fields and 16 edge couplings."""

    h: np.ndarray
    j: np.ndarray


@dataclass(frozen=True)
class DisorderSpec:
    """Disorder strength and the fixed (non-random) chain parameters.

    h and j2 are in energy units (already scaled by j0); they are ignored
    by the Chimera sampler.  random_j2 switches the next-to-nearest
    couplings from the constant j2 to i.i.d. uniform on [-delta*j0, delta*j0].
    """

    delta: float
    j0: float = 1.0
    h: float = 0.6
    j2: float = 0.3
    random_j2: bool = False
    preset: Optional[str] = None

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.j0 <= 0:
            raise ValueError("j0 must be positive")


def preset_parameters(name: str, j0: float = 1.0) -> DisorderSpec:
    """Expand a named phase preset into a DisorderSpec.

    Chain presets keep h = 0.6 j0 throughout; the Anderson preset differs
    from the ergodic one only by J2 = 0.  All presets assume J0 = Omega.
    """
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r} (choose from {sorted(PRESETS)})")
    model, delta, h, j2 = PRESETS[name]
    if model == "chain":
        return DisorderSpec(delta=delta, j0=j0, h=h * j0, j2=j2 * j0, preset=name)
    return DisorderSpec(delta=delta, j0=j0, preset=name)


def preset_model(name: str) -> str:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r} (choose from {sorted(PRESETS)})")
    return PRESETS[name][0]


def realization_rng(master_seed: int, index: int, attempt: int = 0) -> np.random.Generator:
    """Independent, reproducible stream for realization `index`.

    Uses a spawn-key-indexed SeedSequence, so streams are splittable and
    the mapping (master_seed, index, attempt) -> stream never changes.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index, attempt))
    return np.random.Generator(np.random.PCG64(ss))


def _check_bounds(values: np.ndarray, lo: float, hi: float, what: str) -> None:
    if values.size and (values.min() < lo or values.max() > hi):
        raise AssertionError(f"{what} sample escaped [{lo}, {hi}]")


def sample_chain(spec: DisorderSpec, n_sites: int, rng: np.random.Generator) -> ChainCouplings:
    """Draw one chain realization.

    J1_k ~ U[j0 (1 - delta), j0 (1 + delta)]; J2_k is the constant spec.j2
    unless random_j2, in which case J2_k ~ U[-delta j0, delta j0].
    """
    lo = spec.j0 * (1.0 - spec.delta)
    hi = spec.j0 * (1.0 + spec.delta)
    j1 = rng.uniform(lo, hi, size=max(n_sites - 1, 0))
    _check_bounds(j1, lo, hi, "J1")
    n_j2 = max(n_sites - 2, 0)
    if spec.random_j2:
        bound = spec.delta * spec.j0
        j2 = rng.uniform(-bound, bound, size=n_j2)
        _check_bounds(j2, -bound, bound, "J2")
    else:
        j2 = np.full(n_j2, spec.j2)
    return ChainCouplings(h=spec.h, j1=j1, j2=j2)


def sample_chimera(spec: DisorderSpec, rng: np.random.Generator) -> ChimeraCouplings:
    """Draw one Chimera realization: all 24 values ~ U[-delta j0, delta j0]."""
    bound = spec.delta * spec.j0
    h = rng.uniform(-bound, bound, size=8)
    j = rng.uniform(-bound, bound, size=16)
    _check_bounds(h, -bound, bound, "h")
    _check_bounds(j, -bound, bound, "J")
    return ChimeraCouplings(h=h, j=j)


def with_delta(spec: DisorderSpec, delta: float) -> DisorderSpec:
    """Same spec at a different disorder strength (drops the preset tag)."""
    return replace(spec, delta=delta, preset=None)

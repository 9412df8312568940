"""Disorder-averaged local charging of spin-chain and Chimera-cell quantum batteries."""

from .disorder import (
    ChainCouplings,
    ChimeraCouplings,
    DisorderSpec,
    PRESETS,
    preset_parameters,
    realization_rng,
    sample_chain,
    sample_chimera,
)
from .dynamics import (
    ConvergenceError,
    TimeGrid,
    certify_periodic_step,
    propagate_periodic,
    propagate_static,
)
from .ensemble import (
    EnsembleConfig,
    EnsembleResult,
    InvariantError,
    TrajectoryRecord,
    aggregate,
    cost_ensemble,
    run_ensemble,
    run_realization,
)
from .metrics import (
    dephase,
    dimensionless_power,
    ergotropy,
    ergotropy_split,
    fidelity_to_ground,
    l1_coherence_normalized,
    trajectory_metrics,
)
from .operators import (
    ChargingParams,
    DriveKind,
    ModelKind,
    SystemSpec,
    build_chain_reference,
    build_charging,
    build_chimera_reference,
    embed_pauli,
)
from .spectral import SpectralDecomposition, eig_hermitian, ground_and_top

__version__ = "0.1.0"

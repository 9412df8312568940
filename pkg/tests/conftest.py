import numpy as np
import pytest

from disqb import ChargingParams, EnsembleConfig, TimeGrid, preset_parameters, run_ensemble
from disqb.disorder import with_delta

PRESET_NAMES = (
    "chain-ergodic",
    "chain-mbl",
    "chain-anderson",
    "chimera-ergodic",
    "chimera-mbl",
)


def make_config(preset, n_realizations=100, delta=None, **kwargs):
    model = "chain" if preset.startswith("chain") else "chimera"
    disorder = preset_parameters(preset)
    if delta is not None:
        disorder = with_delta(disorder, delta)
    defaults = dict(
        model=model,
        n_sites=8,
        disorder=disorder,
        charging=ChargingParams(omega=1.0),
        grid=TimeGrid.logarithmic(),
        n_realizations=n_realizations,
    )
    defaults.update(kwargs)
    return EnsembleConfig(**defaults)


@pytest.fixture(scope="session")
def paper_scale_ensembles():
    """All five phase presets at the paper's scale (N=8, N_r=100); shared by
    the acceptance criteria to keep the suite at desk runtime."""
    return {name: run_ensemble(make_config(name)) for name in PRESET_NAMES}


@pytest.fixture(scope="session")
def anderson_sweep_ensembles():
    """Chain Anderson configuration (J2 = 0) at delta = 1, 2, 5."""
    return {
        delta: run_ensemble(make_config("chain-anderson", delta=delta))
        for delta in (1.0, 2.0, 5.0)
    }


def combined_stderr(a, b):
    return np.sqrt(a**2 + b**2)

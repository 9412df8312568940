import numpy as np
import pytest

from disqb.disorder import ChainCouplings, preset_parameters, realization_rng, sample_chain
from disqb.dynamics import (
    TimeGrid,
    certify_periodic_step,
    propagate_periodic,
    propagate_static,
)
from disqb.operators import (
    ChargingParams,
    DriveKind,
    SystemSpec,
    build_chain_reference,
    transverse_field_sum,
)
from disqb.spectral import ground_and_top


def ergodic_chain(n, seed=0):
    spec = SystemSpec(n)
    c = sample_chain(preset_parameters("chain-ergodic"), n, realization_rng(seed, 0))
    return build_chain_reference(c, spec), spec


def test_grid_validation():
    with pytest.raises(ValueError, match="start at 0"):
        TimeGrid(np.array([0.1, 0.2]))
    with pytest.raises(ValueError, match="strictly increasing"):
        TimeGrid(np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ValueError, match="not be empty"):
        TimeGrid(np.array([]))
    grid = TimeGrid.logarithmic(1e-2, 1e3, 200)
    assert len(grid) == 201
    assert grid.points[0] == 0.0
    assert grid.points[1] == pytest.approx(1e-2)
    assert grid.points[-1] == pytest.approx(1e3)


def test_rabi_oscillation():
    spec = SystemSpec(1)
    omega = 1.0
    h_d = omega * transverse_field_sum(spec)
    grid = TimeGrid(np.concatenate(([0.0], np.linspace(0.01, 15.0, 400))))
    states = propagate_static(h_d, np.array([1.0, 0.0], dtype=complex), grid)
    p0 = np.abs(states[:, 0]) ** 2
    assert np.max(np.abs(p0 - np.cos(omega * grid.points) ** 2)) < 1e-9


def test_initial_state_returned_exactly():
    h, spec = ergodic_chain(3)
    gt = ground_and_top(h)
    states = propagate_static(h, gt.ground.astype(complex), TimeGrid(np.array([0.0, 1.0])))
    assert np.array_equal(states[0], gt.ground.astype(complex))


def test_energy_conservation_under_static_drive():
    h, spec = ergodic_chain(6)
    h_d = h + transverse_field_sum(spec)
    gt = ground_and_top(h)
    grid = TimeGrid.logarithmic(1e-2, 500.0, 80)
    states = propagate_static(h_d, gt.ground.astype(complex), grid)
    energies = np.real(np.einsum("ti,ij,tj->t", states.conj(), h_d, states))
    assert np.max(np.abs(energies - energies[0])) < 1e-9
    assert np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)) < 1e-9


def test_static_composition():
    h, spec = ergodic_chain(4)
    h_d = h + transverse_field_sum(spec)
    gt = ground_and_top(h)
    psi0 = gt.ground.astype(complex)
    t1, t2 = 0.7, 1.9
    direct = propagate_static(h_d, psi0, TimeGrid(np.array([0.0, t1 + t2])))[-1]
    mid = propagate_static(h_d, psi0, TimeGrid(np.array([0.0, t1])))[-1]
    stepped = propagate_static(h_d, mid, TimeGrid(np.array([0.0, t2])))[-1]
    assert np.linalg.norm(direct - stepped) < 1e-9


def test_unnormalized_state_rejected():
    h, spec = ergodic_chain(2)
    with pytest.raises(ValueError, match="not normalized"):
        propagate_static(h, np.array([1.0, 1.0, 0.0, 0.0], dtype=complex), TimeGrid(np.array([0.0])))


def test_periodic_static_limit():
    # omega_p ~ 0 with cos ~ 1 reproduces the static drive
    h, spec = ergodic_chain(4)
    gt = ground_and_top(h)
    psi0 = gt.ground.astype(complex)
    grid = TimeGrid(np.concatenate(([0.0], np.linspace(0.2, 3.0, 15))))
    params = ChargingParams(omega=1.0, drive_kind=DriveKind.PERIODIC, omega_p=1e-9)
    periodic = propagate_periodic(h, params, psi0, grid, spec, step=0.01)
    static = propagate_static(h + transverse_field_sum(spec), psi0, grid)
    assert np.max(np.linalg.norm(periodic - static, axis=1)) < 1e-8


def test_zero_amplitude_drive_is_stationary():
    h, spec = ergodic_chain(4)
    gt = ground_and_top(h)
    psi0 = gt.ground.astype(complex)
    grid = TimeGrid(np.concatenate(([0.0], np.linspace(0.5, 5.0, 10))))
    params = ChargingParams(omega=0.0, drive_kind=DriveKind.PERIODIC, omega_p=0.3)
    states = propagate_periodic(h, params, psi0, grid, spec, step=0.05)
    fidelities = np.abs(states @ psi0.conj())
    assert np.max(np.abs(fidelities - 1.0)) < 1e-9


def test_periodic_step_halving_certificate():
    h, spec = ergodic_chain(8, seed=42)
    gt = ground_and_top(h)
    grid = TimeGrid(np.array([0.0, 0.25, 0.5]))
    params = ChargingParams(omega=1.0, drive_kind=DriveKind.PERIODIC, omega_p=0.3)
    cert = certify_periodic_step(h, params, gt.ground.astype(complex), grid, spec, step=0.01)
    assert cert.converged
    assert cert.max_state_difference < 1e-6


def test_midpoint_stepper_is_second_order():
    h, spec = ergodic_chain(2)
    gt = ground_and_top(h)
    psi0 = gt.ground.astype(complex)
    grid = TimeGrid(np.array([0.0, 2.0]))
    params = ChargingParams(omega=1.0, drive_kind=DriveKind.PERIODIC, omega_p=0.3)
    reference = propagate_periodic(h, params, psi0, grid, spec, step=1e-4)[-1]
    errors = [
        np.linalg.norm(propagate_periodic(h, params, psi0, grid, spec, step=dt)[-1] - reference)
        for dt in (0.02, 0.01)
    ]
    assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.15)


def test_periodic_norm_preserved_over_long_run():
    h, spec = ergodic_chain(4)
    gt = ground_and_top(h)
    grid = TimeGrid(np.concatenate(([0.0], np.linspace(1.0, 20.0, 5))))
    params = ChargingParams(omega=1.0, drive_kind=DriveKind.PERIODIC, omega_p=0.3)
    states = propagate_periodic(h, params, gt.ground.astype(complex), grid, spec, step=0.02)
    assert np.max(np.abs(np.linalg.norm(states, axis=1) - 1.0)) < 1e-9


def test_periodic_requires_periodic_drive():
    h, spec = ergodic_chain(2)
    gt = ground_and_top(h)
    with pytest.raises(ValueError, match="periodic drive"):
        propagate_periodic(
            h, ChargingParams(omega=1.0), gt.ground.astype(complex),
            TimeGrid(np.array([0.0, 1.0])), spec,
        )

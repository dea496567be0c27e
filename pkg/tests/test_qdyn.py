"""Collapse dynamics: analytic decay oracles, trajectory statistics, guards."""

import math

import numpy as np
import pytest

from dyadlab import optimizer, qdyn
from dyadlab.errors import GridMismatch, StepTooLarge

A_REF = (2.0, 0.0, 4.0, 6.0)


def _projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def test_build_collapse_operator():
    assert np.array_equal(qdyn.build_collapse_operator(A_REF), np.array(A_REF))
    assert np.array_equal(qdyn.build_collapse_operator((0, 0, 0, 0)), np.zeros(4))
    assert np.array_equal(
        qdyn.build_collapse_operator(optimizer.EigenAssignment(6, 4, 0, 2)),
        np.array([6.0, 4.0, 0.0, 2.0]),
    )
    with pytest.raises(ValueError):
        qdyn.build_collapse_operator((1.0, 2.0, 3.0))
    with pytest.raises(ValueError):
        qdyn.build_collapse_operator((-1.0, 0.0, 0.0, 0.0))


def test_coherence_decay_rate_frozen_values():
    a = qdyn.build_collapse_operator(A_REF)
    assert qdyn.coherence_decay_rate(a, 1.0, 1, 2) == pytest.approx(8.0)
    assert qdyn.coherence_decay_rate(a, 1.0, 0, 1) == pytest.approx(2.0)
    assert qdyn.coherence_decay_rate(np.full(4, 3.0), 1.0, 0, 3) == 0.0
    with pytest.raises(ValueError):
        qdyn.coherence_decay_rate(a, 1.0, 2, 2)


def test_prepare_dyad_superposition():
    psi = qdyn.prepare_dyad_superposition()
    assert np.linalg.norm(psi) == pytest.approx(1.0, abs=1e-12)
    assert psi == pytest.approx(np.array([1, 0, 1, 0]) / math.sqrt(2.0))


def test_swap_hamiltonian_generates_the_swap_gate():
    from scipy.linalg import expm

    from dyadlab import qiit

    u = expm(-1j * qdyn.swap_hamiltonian())
    assert np.allclose(u, qiit.swap_unitary(), atol=1e-12)


def test_lindblad_off_diagonal_decay_matches_analytic_rate():
    # uniform superposition puts weight on all six coherences
    psi = np.ones(4, dtype=complex) / 2.0
    a = qdyn.build_collapse_operator(A_REF)
    lam, dt = 1.0, 1e-3
    times, states = qdyn.lindblad_path(_projector(psi), None, a, lam, dt, [0.5, 1.0])
    for t, rho in zip(times, states):
        for i, k in qdyn.COHERENCE_PAIRS:
            rate = qdyn.coherence_decay_rate(a, lam, i, k)
            expected = 0.25 * math.exp(-rate * t)
            assert abs(rho[i, k]) == pytest.approx(expected, rel=1e-6)


def test_lindblad_decay_rates_from_log_linear_fit():
    psi = np.ones(4, dtype=complex) / 2.0
    a = qdyn.build_collapse_operator(A_REF)
    lam, dt = 1.0, 1e-4
    sample_times = np.linspace(0.02, 0.2, 10)
    times, states = qdyn.lindblad_path(_projector(psi), None, a, lam, dt, sample_times)
    for i, k in qdyn.COHERENCE_PAIRS:
        rate = qdyn.coherence_decay_rate(a, lam, i, k)
        if rate == 0.0:
            continue
        logs = np.log([abs(rho[i, k]) for rho in states])
        slope = np.polyfit(times, logs, 1)[0]
        assert -slope == pytest.approx(rate, rel=1e-4)


def test_lindblad_pair_superposition_frozen_value():
    psi = qdyn.basis_superposition(0, 1)
    rho = qdyn.lindblad_evolve(_projector(psi), None, A_REF, 1.0, 1.0, 1e-4)
    assert abs(rho[0, 1]) == pytest.approx(0.5 * math.exp(-2.0), abs=1e-6)


def test_lindblad_no_dynamics_without_operator():
    rho0 = _projector(qdyn.basis_superposition(0, 3))
    rho = qdyn.lindblad_evolve(rho0, None, np.zeros(4), 1.0, 1.0, 1e-2)
    assert np.allclose(rho, rho0, atol=1e-12)


def test_lindblad_diagonal_states_are_fixed_points(rng):
    pops = rng.random(4)
    pops /= pops.sum()
    rho0 = np.diag(pops).astype(complex)
    rho = qdyn.lindblad_evolve(rho0, None, A_REF, 1.0, 0.5, 1e-3)
    assert np.allclose(rho, rho0, atol=1e-12)


def test_lindblad_populations_constant_without_hamiltonian(rng):
    for _ in range(5):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        a = qdyn.build_collapse_operator(rng.random(4) * 3.0)
        rho = qdyn.lindblad_evolve(_projector(psi), None, a, 1.0, 0.3, 1e-3)
        assert np.allclose(np.diag(rho), np.diag(_projector(psi)), atol=1e-10)


def test_lindblad_preserves_density_invariants_along_path(rng):
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        a = qdyn.build_collapse_operator(rng.random(4) * 3.0)
        lam = float(rng.random() * 2.0)
        gaps = np.subtract.outer(a, a) ** 2
        dt = 1e-3 / max(lam * gaps.max(), 1.0)
        times, states = qdyn.lindblad_path(
            _projector(psi), None, a, lam, dt, np.linspace(0.0, 40 * dt, 5)
        )
        for rho in states:
            qdyn.validate_density_matrix(rho)


def test_lindblad_with_hamiltonian_keeps_invariants():
    h = qdyn.swap_hamiltonian()
    psi = qdyn.basis_superposition(0, 1)
    rho = qdyn.lindblad_evolve(_projector(psi), h, A_REF, 1.0, 1.0, 1e-3)
    qdyn.validate_density_matrix(rho)


def test_lindblad_step_too_large_guard():
    psi = np.ones(4, dtype=complex) / 2.0
    with pytest.raises(StepTooLarge):
        qdyn.lindblad_evolve(_projector(psi), None, A_REF, 1.0, 5.0, 0.5)


def test_sde_zero_operator_is_static():
    # drift and diffusion vanish identically; only renormalization rounding
    # of the irrational amplitudes remains
    psi = qdyn.basis_superposition(1, 2)
    rec = qdyn.sde_trajectory(psi, None, np.zeros(4), 1.0, 1e-3, 0.2, seed=7)
    assert np.allclose(rec.final_state, psi, atol=1e-12)
    rec2 = qdyn.sde_trajectory(psi, None, np.zeros(4), 1.0, 1e-3, 0.2, seed=99)
    assert np.allclose(rec2.final_state, psi, atol=1e-12)


def test_sde_eigenstates_are_fixed_points():
    psi = np.zeros(4, dtype=complex)
    psi[2] = 1.0
    rec = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 1e-3, 0.3, seed=11)
    assert np.array_equal(rec.final_state, psi)
    assert rec.outcome == 2


def test_sde_reproducible_for_fixed_seed():
    psi = qdyn.basis_superposition(0, 1)
    rec1 = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 1e-3, 0.4, seed=3)
    rec2 = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 1e-3, 0.4, seed=3)
    assert np.array_equal(rec1.states, rec2.states)
    rec3 = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 1e-3, 0.4, seed=4)
    assert not np.array_equal(rec3.states, rec1.states)


def test_sde_states_stay_normalized():
    psi = qdyn.basis_superposition(0, 1)
    rec = qdyn.sde_trajectory(
        psi, None, A_REF, 1.0, 1e-3, 1.0, seed=5, sample_times=np.linspace(0, 1, 11)
    )
    norms = np.linalg.norm(rec.states, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-12)


def test_ensemble_members_match_individual_runs_bitwise():
    psi = qdyn.basis_superposition(0, 1)
    records = qdyn.simulate_ensemble(
        psi, None, A_REF, 1.0, 1e-3, 0.3, n_trajectories=7, seed=42, batch_size=3
    )
    for i in (0, 4, 6):
        solo = qdyn.sde_trajectory(
            psi, None, A_REF, 1.0, 1e-3, 0.3, seed=qdyn.derive_trajectory_seed(42, i)
        )
        assert np.array_equal(records[i].states, solo.states)


def test_trajectory_seeds_do_not_depend_on_count():
    assert qdyn.derive_trajectory_seed(0, 5) == qdyn.derive_trajectory_seed(0, 5)
    assert qdyn.derive_trajectory_seed(0, 5) != qdyn.derive_trajectory_seed(0, 6)
    assert qdyn.derive_trajectory_seed(1, 5) != qdyn.derive_trajectory_seed(0, 5)


def test_born_statistics_smoke():
    psi = qdyn.basis_superposition(0, 1)
    records = qdyn.simulate_ensemble(
        psi, None, A_REF, 1.0, 2e-3, 4.0, n_trajectories=400, seed=1
    )
    outcomes = [r.outcome for r in records]
    assert outcomes.count(None) <= 4
    freq = outcomes.count(0) / len(records)
    assert abs(freq - 0.5) < 0.1  # 4 binomial sigma
    assert outcomes.count(2) == 0 and outcomes.count(3) == 0


def test_born_statistics_uneven_superposition():
    psi = np.zeros(4, dtype=complex)
    psi[0], psi[1] = math.sqrt(0.3), math.sqrt(0.7)
    records = qdyn.simulate_ensemble(
        psi, None, A_REF, 1.0, 2e-3, 4.0, n_trajectories=500, seed=8
    )
    freq = sum(r.outcome == 1 for r in records) / len(records)
    assert abs(freq - 0.7) < 4.0 * math.sqrt(0.7 * 0.3 / 500)


def test_ensemble_average_of_basis_trajectory_is_projector():
    psi = np.zeros(4, dtype=complex)
    psi[1] = 1.0
    rec = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 1e-3, 0.2, seed=9)
    rho = qdyn.ensemble_average([rec], at=0.2)
    assert np.allclose(rho, _projector(psi), atol=1e-12)


def test_ensemble_average_at_time_zero_is_initial_state():
    psi = qdyn.basis_superposition(0, 1)
    records = qdyn.simulate_ensemble(
        psi, None, A_REF, 1.0, 1e-3, 0.2, n_trajectories=20, seed=2, sample_times=[0.0, 0.2]
    )
    rho = qdyn.ensemble_average(records, at=0.0)
    assert np.allclose(rho, _projector(psi), atol=1e-12)


def test_ensemble_average_grid_mismatch():
    psi = qdyn.basis_superposition(0, 1)
    r1 = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 1e-3, 0.2, seed=1)
    r2 = qdyn.sde_trajectory(psi, None, A_REF, 1.0, 2e-3, 0.2, seed=1)
    with pytest.raises(GridMismatch):
        qdyn.ensemble_average([r1, r2], at=0.2)
    with pytest.raises(GridMismatch):
        qdyn.ensemble_average([r1], at=0.123)


def test_ensemble_average_matches_lindblad_smoke():
    psi = qdyn.basis_superposition(0, 1)
    records = qdyn.simulate_ensemble(
        psi, None, A_REF, 1.0, 1e-3, 0.5, n_trajectories=600, seed=3, sample_times=[0.5]
    )
    rho_mc = qdyn.ensemble_average(records, at=0.5)
    rho_det = qdyn.lindblad_evolve(_projector(psi), None, A_REF, 1.0, 0.5, 1e-3)
    assert qdyn.trace_distance(rho_mc, rho_det) <= 0.06


def test_faster_decay_for_larger_gap_under_reference_pick():
    # for the (2,0,4,6) assignment the 01/10 coherence dies faster than 00/01
    a = qdyn.build_collapse_operator(A_REF)
    assert qdyn.coherence_decay_rate(a, 1.0, 1, 2) > qdyn.coherence_decay_rate(
        a, 1.0, 0, 1
    )


def test_minimum_gap_rates_across_all_minimizers():
    # every minimizer separates 01/10 by at least 4 but may separate 00/01 by
    # as little as 2; compare the guaranteed (worst-case) rates
    result = optimizer.solve(optimizer.SWAP_TABLE)
    rates_0110 = []
    rates_0001 = []
    for m in result.minimizers:
        a = qdyn.build_collapse_operator(m)
        rates_0110.append(qdyn.coherence_decay_rate(a, 1.0, 1, 2))
        rates_0001.append(qdyn.coherence_decay_rate(a, 1.0, 0, 1))
    assert min(rates_0110) == pytest.approx(8.0)
    assert min(rates_0001) == pytest.approx(2.0)
    assert min(rates_0110) > min(rates_0001)


def test_validate_pure_state():
    with pytest.raises(ValueError):
        qdyn.validate_pure_state(np.array([1.0, 1.0, 0.0, 0.0]))
    qdyn.validate_pure_state(qdyn.basis_superposition(0, 2))


def test_validate_density_matrix():
    with pytest.raises(ValueError):
        qdyn.validate_density_matrix(np.eye(4) / 2.0)
    bad = np.eye(4, dtype=complex) / 4.0
    bad[0, 1] = 0.5
    with pytest.raises(ValueError):
        qdyn.validate_density_matrix(bad)

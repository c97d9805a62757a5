import math

import numpy as np
import pytest

from dsap.evolution import (
    chain_state_vector,
    default_n_steps,
    dsap_transfer,
    ideal_transport_target,
    magnetization_expectation,
    populations_timeseries,
    propagate,
    qutrit_transport,
)
from dsap.hamiltonian import ci_schedule, tabulated_schedule
from dsap.spin_algebra import basis_index, product_state

B, D = 1.0, 0.2
SCHEDULE_100 = ci_schedule(t_max=100.0, d=D, b=B)


def zero_coupling_schedule(t_max=10.0, b=1.0):
    return tabulated_schedule([0.0, t_max], [0.0, 0.0], [0.0, 0.0], [b, b])


def test_default_step_scaling():
    assert default_n_steps(100.0) == 10_000
    assert default_n_steps(1000.0) == 100_000


def test_propagate_validates_input():
    with pytest.raises(ValueError, match="not normalised"):
        propagate(SCHEDULE_100, 2.0 * product_state("011"), 10)
    with pytest.raises(ValueError, match="n_steps"):
        propagate(SCHEDULE_100, product_state("011"), 0)


def test_pure_zeeman_evolution_is_a_phase():
    schedule = zero_coupling_schedule(t_max=10.0)
    trajectory = propagate(schedule, product_state("011"), 200)
    expected = np.exp(-1j * 2.0 * B * 10.0)
    amplitude = trajectory.final_state[basis_index("011")]
    assert abs(amplitude - expected) < 1e-9
    assert np.max(np.abs(np.abs(trajectory.states[:, basis_index("011")]) - 1.0)) < 1e-12


def test_stretched_state_is_frozen():
    trajectory = propagate(SCHEDULE_100, product_state("111"), 1000)
    assert np.max(np.abs(trajectory.populations("111") - 1.0)) < 1e-12


def test_unitarity_and_magnetization_conservation():
    psi0 = (product_state("011") + product_state("m11")) / math.sqrt(2)
    trajectory = propagate(SCHEDULE_100, psi0, 2000)
    norms = np.linalg.norm(trajectory.states, axis=1)
    assert np.max(np.abs(norms - 1.0)) < 1e-9
    mz = magnetization_expectation(trajectory)
    assert np.max(np.abs(mz - mz[0])) < 1e-9


def test_populations_timeseries_closed_sector():
    trajectory = propagate(SCHEDULE_100, product_state("011"), 2000)
    times, labels, values = populations_timeseries(trajectory, ["011", "101", "110"])
    assert labels == ["011", "101", "110"]
    assert values[0].tolist() == [1.0, 0.0, 0.0]
    totals = values.sum(axis=1)
    assert np.max(np.abs(totals - 1.0)) < 1e-9
    with pytest.raises(ValueError, match="watchlist"):
        populations_timeseries(trajectory, [])


def test_step_halving_convergence():
    psi0 = product_state("011")
    final_a = propagate(SCHEDULE_100, psi0, 10_000).final_state
    final_b = propagate(SCHEDULE_100, psi0, 20_000).final_state
    assert abs(abs(np.vdot(final_a, final_b)) - 1.0) < 1e-6


def test_dsap_transfer_channel_inference():
    fidelity, max_intermediate = dsap_transfer(SCHEDULE_100, "011", "110", n_steps=4000)
    assert fidelity > 0.99
    assert max_intermediate < 0.08
    with pytest.raises(ValueError, match="no magnetization-conserving path"):
        dsap_transfer(SCHEDULE_100, "011", "111")
    with pytest.raises(ValueError, match="no designated intermediate"):
        dsap_transfer(SCHEDULE_100, "01m", "m10")


def test_dsap_transfer_mirror_channel():
    fid_up, _ = dsap_transfer(SCHEDULE_100, "011", "110")
    fid_down, _ = dsap_transfer(SCHEDULE_100, "0mm", "mm0")
    assert abs(fid_up - fid_down) < 1e-9


def test_d1_channel_transient():
    schedule = ci_schedule(t_max=400.0, d=D, b=B)
    trajectory = propagate(schedule, product_state("m11"))
    p010 = trajectory.populations("010")
    n = len(p010)
    assert p010[n // 3 : 2 * n // 3].max() > 0.1
    assert trajectory.populations("001").max() < 0.02
    assert trajectory.populations("100").max() < 0.02
    assert trajectory.populations("11m")[-1] > 0.99


def test_adiabatic_improvement_with_duration():
    infidelities = []
    for t_max in (100.0, 200.0, 400.0):
        schedule = ci_schedule(t_max=t_max, d=D, b=B)
        fidelity, _ = dsap_transfer(schedule, "011", "110")
        infidelities.append(1.0 - fidelity)
    assert infidelities[0] > infidelities[1] - 1e-9
    assert infidelities[1] > infidelities[2] - 1e-9


def test_chain_state_vectors():
    vec, spec = chain_state_vector("singlet")
    assert spec == "singlet"
    assert vec[3 * 0 + 2] == pytest.approx(1 / math.sqrt(2))
    assert vec[3 * 2 + 0] == pytest.approx(-1 / math.sqrt(2))
    with pytest.raises(ValueError, match="unknown chain state"):
        chain_state_vector("sideways")
    with pytest.raises(ValueError, match="normalised"):
        chain_state_vector(np.ones(9))


def test_ideal_target_up_up_pattern():
    # the transported |0> component ends with the dark-state sign flip
    qutrit = np.array([0.0, 1.0, 0.0], dtype=complex)
    chain, _ = chain_state_vector("up_up")
    target = ideal_transport_target(qutrit, chain)
    assert target[basis_index("110")] == pytest.approx(-1.0)
    qutrit = np.array([0.0, 0.0, 1.0], dtype=complex)
    target = ideal_transport_target(qutrit, chain)
    assert target[basis_index("11m")] == pytest.approx(1.0)


def test_qutrit_transport_stationary_component():
    report = qutrit_transport(1.0, 0.0, 0.0, "up_up", SCHEDULE_100, n_steps=500)
    assert report.fidelity_raw == pytest.approx(1.0, abs=1e-12)
    assert report.fidelity_phase_corrected == pytest.approx(1.0, abs=1e-12)


def test_qutrit_transport_reduces_to_dsap():
    report = qutrit_transport(0.0, 1.0, 0.0, "up_up", SCHEDULE_100)
    fidelity, _ = dsap_transfer(SCHEDULE_100, "011", "110")
    assert abs(report.fidelity_raw - fidelity) <= 1e-12
    assert report.per_component_transfer[1] == pytest.approx(report.fidelity_phase_corrected, abs=1e-12)


def test_qutrit_transport_rejects_unnormalized():
    with pytest.raises(ValueError, match="non-normalized qutrit coefficients"):
        qutrit_transport(1.0, 1.0, 0.0, "up_up", SCHEDULE_100, n_steps=10)


def test_qutrit_fidelity_ordering():
    r3 = 1 / math.sqrt(3)
    report = qutrit_transport(r3, r3, r3, "up_up", SCHEDULE_100)
    assert 0.0 <= report.fidelity_raw <= report.fidelity_phase_corrected <= 1.0 + 1e-9


def test_propagate_matches_dense_matrix_exponential():
    # independent route: full 27x27 matrix exponentials at the same midpoints
    from scipy.linalg import expm

    from dsap.hamiltonian import hamiltonian_at

    schedule = ci_schedule(t_max=5.0, d=0.2, b=1.0)
    n_steps = 64
    psi0 = (product_state("011") + product_state("m11") + product_state("0m1")) / math.sqrt(3)
    fast = propagate(schedule, psi0, n_steps).final_state
    dt = schedule.t_max / n_steps
    psi = psi0.astype(complex)
    for k in range(n_steps):
        ham = hamiltonian_at(schedule, (k + 0.5) * dt)
        psi = expm(-1j * ham * dt) @ psi
    assert np.max(np.abs(fast - psi)) < 1e-10


def test_e_equals_b_channel_is_less_adiabatic():
    schedule = ci_schedule(t_max=400.0, d=D, b=B)
    fid_m2, _ = dsap_transfer(schedule, "011", "110")
    fid_d1, _ = dsap_transfer(schedule, "m11", "11m")
    assert fid_d1 > 0.999
    assert 1.0 - fid_d1 > 1.0 - fid_m2

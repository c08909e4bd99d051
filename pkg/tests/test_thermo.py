"""Heat/entropy rates and the equilibrium consistency identity."""

import numpy as np
import pytest
from scipy.linalg import logm

from adlind import (
    DeutschParams,
    LogDomainError,
    deutsch_trajectory,
    entropy_rate,
    equilibrium_check,
    expand_state,
    gibbs_state,
    h_vector,
    heat_rate,
    pauli_basis,
    rho_log_vector,
    thermal_qubit_model,
    track_spectrum,
    vectorize,
)
from adlind.lindblad import generator_action

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
BASIS = pauli_basis(1)


def ramped_hamiltonian(horizon=10.0, w0=1.0, w1=1.5):
    def ham(t):
        return 0.5 * (w0 + (w1 - w0) * t / horizon) * SZ

    return ham


def displaced_probe(ham, beta):
    rho_eq0 = gibbs_state(ham(0.0), beta)
    return 0.6 * rho_eq0 + 0.4 * 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)


def test_h_vector_examples():
    assert np.allclose(h_vector(0.5 * SZ, BASIS), [0, 0, 0, 1], atol=1e-14)
    assert np.max(np.abs(h_vector(np.zeros((2, 2)), BASIS))) == 0.0


def test_h_vector_reconstructs_hamiltonian():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    H = a + a.conj().T
    comps = h_vector(H, BASIS)
    back = sum(c * sig for c, sig in zip(comps, BASIS.elements)) / 2
    assert np.max(np.abs(back - H)) < 1e-12


def test_rho_log_vector_maximally_mixed():
    comps = rho_log_vector(0.5 * np.eye(2), BASIS)
    assert np.allclose(comps, [-2 * np.log(2), 0, 0, 0], atol=1e-12)


def test_rho_log_vector_gibbs_identity():
    ham = ramped_hamiltonian()
    for beta in (0.5, 1.0, 2.0):
        for t in (0.0, 4.0, 10.0):
            H = ham(t)
            rho = gibbs_state(H, beta)
            log_comps = rho_log_vector(rho, BASIS)
            h_comps = h_vector(H, BASIS)
            assert np.max(np.abs(log_comps[1:] + beta * h_comps[1:])) < 1e-10


def test_rho_log_vector_rejects_pure_states():
    with pytest.raises(LogDomainError):
        rho_log_vector(np.diag([1.0, 0.0]).astype(complex), BASIS)


def test_rates_vanish_on_stationary_state():
    ham = ramped_hamiltonian(w1=1.0)  # constant Hamiltonian
    beta = 1.0
    model = thermal_qubit_model(ham, beta, 10.0)
    traj = track_spectrum(model, np.linspace(0, 1, 101))
    rho_eq = gibbs_state(ham(0.0), beta)
    w = expand_state(traj.left[0], vectorize(rho_eq, BASIS).components)
    assert abs(heat_rate(traj, w, ham(0.0), 0.0, BASIS)) < 1e-12
    assert abs(entropy_rate(traj, w, 0.0, BASIS, log_state=rho_eq)) < 1e-12


def test_heat_rate_equals_generator_trace():
    ham = ramped_hamiltonian()
    beta = 1.0
    model = thermal_qubit_model(ham, beta, 10.0)
    traj = track_spectrum(model, np.linspace(0, 1, 101))
    probe = displaced_probe(ham, beta)
    for j in (10, 50, 90):
        t, s = 10.0 * traj.grid[j], traj.grid[j]
        w = expand_state(traj.left[j], vectorize(probe, BASIS).components)
        direct = np.trace(ham(t) @ generator_action(model, t, probe)).real
        assert abs(heat_rate(traj, w, ham(t), s, BASIS) - direct) < 1e-8


def test_entropy_rate_is_von_neumann_rate():
    ham = ramped_hamiltonian()
    beta = 1.0
    model = thermal_qubit_model(ham, beta, 10.0)
    traj = track_spectrum(model, np.linspace(0, 1, 101))
    probe = displaced_probe(ham, beta)
    j = 40
    w = expand_state(traj.left[j], vectorize(probe, BASIS).components)
    drho = generator_action(model, 10.0 * traj.grid[j], probe)
    direct = -np.trace(drho @ logm(probe)).real
    assert abs(entropy_rate(traj, w, traj.grid[j], BASIS) - direct) < 1e-10


def test_deutsch_heat_rate_vanishes_with_coupling():
    rates = []
    for gamma in (0.1, 0.01, 0.001):
        p = DeutschParams(omega=1.0, gamma0=gamma, tau=10.0)
        traj = deutsch_trajectory(p, np.linspace(0, 1, 401))
        state = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
        w = expand_state(traj.left[0], vectorize(state, BASIS).components)
        H0 = -0.5 * SX
        rates.append(abs(heat_rate(traj, w, H0, 0.0, BASIS)))
    assert rates[0] > rates[1] > rates[2]
    assert rates[2] < 1e-2 * rates[0] * 15  # roughly linear in gamma


def test_equilibrium_check_constant_hamiltonian():
    check = equilibrium_check(ramped_hamiltonian(w1=1.0), 1.0,
                              np.linspace(0, 10, 51))
    assert check.max_abs_dq < 1e-12
    assert check.max_residual < 1e-12
    assert check.relative_residual < 1e-12


def test_equilibrium_check_ramped_identity():
    ham = ramped_hamiltonian()
    beta = 1.0
    probe = displaced_probe(ham, beta)
    check = equilibrium_check(ham, beta, np.linspace(0, 10, 201), probe=probe)
    assert check.max_abs_dq > 1e-3  # probe makes the rates nonzero
    assert check.relative_residual < 1e-6
    times = [sm.time for sm in check.samples]
    assert times[0] == 0.0 and times[-1] == 10.0


def test_equilibrium_check_infinite_temperature():
    ham = ramped_hamiltonian()
    probe = displaced_probe(ham, 1.0)
    check = equilibrium_check(ham, 0.0, np.linspace(0, 10, 51), probe=probe)
    assert check.max_residual < 1e-12


def test_thermalizer_steady_state_is_gibbs():
    ham = ramped_hamiltonian()
    beta = 1.3
    model = thermal_qubit_model(ham, beta, 10.0)
    for t in (0.0, 5.0, 10.0):
        rho_eq = gibbs_state(ham(t), beta)
        assert np.max(np.abs(generator_action(model, t, rho_eq))) < 1e-12

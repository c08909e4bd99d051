"""Generator action and superoperator matrices against closed forms."""

import numpy as np
import pytest

from adlind import (
    DeutschParams,
    HorizonError,
    LandauZenerParams,
    LindbladModel,
    deutsch_model,
    generator_action,
    lz_model,
    pauli_basis,
    sample_superoperators,
    superoperator_matrix,
    vectorize,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
PLUS = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)


def dephasing_model(gamma, horizon=5.0):
    return LindbladModel(
        dim_s=2,
        hamiltonian=lambda t: np.zeros((2, 2), dtype=complex),
        jump_ops=[lambda t: np.sqrt(gamma) * SZ],
        horizon=horizon,
    )


def deutsch_printed(p, t):
    g, gs, gc = p.gamma0, p.g_s(t), p.g_c(t)
    return np.array([
        [0, 0, 0, 0],
        [0, -2 * g, 0, p.omega * gs],
        [0, 0, -2 * g, p.omega * gc],
        [0, -p.omega * gs, -p.omega * gc, 0],
    ], dtype=complex)


def lz_printed(p, t):
    g, w0 = p.gamma0, p.omega0
    tan = np.tan(float(p.theta(t)))
    return np.array([
        [0, 0, 0, 0],
        [0, -2 * g, -w0, 0],
        [0, w0, 0, -w0 * tan],
        [0, 0, w0 * tan, -2 * g],
    ], dtype=complex)


def test_pure_dephasing_rate():
    # d<sx>/dt = tr(sx L[rho]) = -2 gamma for rho = |+><+|
    gamma = 0.3
    model = dephasing_model(gamma)
    out = generator_action(model, 0.0, PLUS)
    assert abs(np.trace(SX @ out).real + 2 * gamma) < 1e-12
    # off-diagonal damping, diagonal untouched
    assert np.allclose(np.diag(out), 0.0, atol=1e-14)


def test_identity_annihilated():
    p = DeutschParams(omega=1.0, gamma0=0.2, tau=4.0)
    out = generator_action(deutsch_model(p), 1.0, 0.5 * np.eye(2))
    assert np.max(np.abs(out)) < 1e-14


def test_generator_matches_superoperator_on_random_states():
    rng = np.random.default_rng(5)
    basis = pauli_basis(1)
    models = [
        deutsch_model(DeutschParams(omega=1.0, gamma0=0.1, tau=6.0)),
        lz_model(LandauZenerParams(omega0=1.0, theta_final=1.0, gamma0=0.2, tau=6.0)),
        dephasing_model(0.4, horizon=6.0),
    ]
    for model in models:
        for _ in range(34):
            t = rng.uniform(0.0, 6.0)
            a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            rho = a + a.conj().T
            direct = vectorize(generator_action(model, t, rho), basis).components
            L = superoperator_matrix(model, t, basis).matrix
            via_matrix = L @ vectorize(rho, basis).components
            assert np.max(np.abs(direct - via_matrix)) < 1e-10


def test_deutsch_matrix_matches_printed_form():
    rng = np.random.default_rng(1)
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    model = deutsch_model(p)
    for t in rng.uniform(0, 10.0, size=10):
        L = superoperator_matrix(model, t).matrix
        assert np.max(np.abs(L - deutsch_printed(p, t))) < 1e-12


def test_lz_matrix_matches_printed_form():
    rng = np.random.default_rng(2)
    p = LandauZenerParams(omega0=1.0, theta_final=2 * np.pi / 5, gamma0=0.1, tau=10.0)
    model = lz_model(p)
    for t in rng.uniform(0, 10.0, size=10):
        L = superoperator_matrix(model, t).matrix
        assert np.max(np.abs(L - lz_printed(p, t))) < 1e-12


def test_zero_model_gives_zero_matrix():
    model = LindbladModel(
        dim_s=2,
        hamiltonian=lambda t: np.zeros((2, 2), dtype=complex),
        jump_ops=[],
        horizon=1.0,
    )
    assert np.max(np.abs(superoperator_matrix(model, 0.5).matrix)) == 0.0


def test_trace_preservation_row():
    p = DeutschParams(omega=1.0, gamma0=0.25, tau=8.0)
    model = deutsch_model(p)
    for t in np.linspace(0, 8.0, 17):
        L = superoperator_matrix(model, t).matrix
        assert np.max(np.abs(L[0])) < 1e-12


def test_euler_step_preserves_hermiticity():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=5.0)
    model = deutsch_model(p)
    rho = PLUS
    for dt in (1e-2, 1e-3):
        stepped = rho + dt * generator_action(model, 1.0, rho)
        assert np.max(np.abs(stepped - stepped.conj().T)) < dt**2


def test_horizon_enforced():
    model = dephasing_model(0.1, horizon=2.0)
    with pytest.raises(HorizonError):
        generator_action(model, 3.0, PLUS)
    with pytest.raises(HorizonError):
        superoperator_matrix(model, -1.0)


def test_batch_sampling_matches_pointwise():
    # dephasing_model has no batch callables, deutsch_model does; both
    # paths must agree with the single-time builder.
    ts = np.linspace(0.0, 5.0, 7)
    for model in (dephasing_model(0.3),
                  deutsch_model(DeutschParams(omega=1.0, gamma0=0.1, tau=5.0))):
        stack = sample_superoperators(model, ts)
        for j, t in enumerate(ts):
            single = superoperator_matrix(model, t).matrix
            assert np.max(np.abs(stack[j] - single)) < 1e-13

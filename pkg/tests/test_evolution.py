"""Propagators, coefficient matrices, master-equation oracle, fidelity."""

import numpy as np
import pytest

from adlind import (
    BlockStructureError,
    DeutschParams,
    IntegrationError,
    InvalidStateError,
    LandauZenerParams,
    LindbladModel,
    adiabatic_phase,
    block_coefficients,
    decompose,
    deutsch_adiabatic_state,
    deutsch_model,
    deutsch_target,
    deutsch_trajectory,
    fidelity,
    frozen_representation,
    infidelity,
    infidelity_curve,
    lz_trajectory,
    propagator_1d,
    propagator_1d_inverse,
    propagator_multiblock,
    propagator_multiblock_inverse,
    solve_master,
    trajectory_from_bases,
    write_curve_csv,
)

SZ = np.diag([1.0, -1.0]).astype(complex)
PLUS = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
EYE4 = np.eye(4)


def defective_trajectory(seed=42, n=101, tau=2.0):
    rng = np.random.default_rng(seed)
    J = np.array([
        [-0.5, 1, 0, 0],
        [0, -0.5, 0, 0],
        [0, 0, 0.0, 0],
        [0, 0, 0, -1.3],
    ], dtype=complex)
    S = rng.normal(size=(4, 4)) + 0.1j * rng.normal(size=(4, 4))
    L = S @ J @ np.linalg.inv(S)
    grid = np.linspace(0, 1, n)
    bases = [decompose(L) for _ in grid]
    return trajectory_from_bases(grid, tau, bases, np.array([L] * n)), L


# ---------------------------------------------------------------------------
# Phases and rank-one propagators
# ---------------------------------------------------------------------------

def test_adiabatic_phases_deutsch():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 1001))
    assert abs(adiabatic_phase(traj, 0, 0.0, 1.0)) < 1e-10
    assert abs(adiabatic_phase(traj, 1, 0.2, 0.8)
               - (-2 * p.gamma0 * 0.6 * p.tau)) < 1e-9


def test_adiabatic_phase_lz():
    p = LandauZenerParams(omega0=1.0, theta_final=2 * np.pi / 5, gamma0=0.1, tau=10.0)
    traj = lz_trajectory(p, np.linspace(0, 1, 8001))
    assert abs(adiabatic_phase(traj, 1, 0.0, 1.0) - (-2 * p.gamma0 * p.tau)) < 1e-7
    assert np.max(np.abs(traj.coupling_path(1, 1, 1, 1))) < 1e-5


def test_propagator_identity_at_equal_times():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 501))
    for s in (0.0, 0.5):
        assert np.max(np.abs(propagator_1d(traj, s, s).matrix - EYE4)) < 1e-12
        assert np.max(np.abs(propagator_1d_inverse(traj, s, s).matrix - EYE4)) < 1e-12
        assert np.max(np.abs(propagator_multiblock(traj, s, s).matrix - EYE4)) < 1e-12


def test_propagator_applies_deutsch_closed_form():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 2001))
    out = propagator_1d(traj, 0.0, 1.0).apply(np.array([1, 1, 0, 0], dtype=complex))
    damp = np.exp(-2 * p.gamma0 * p.tau)
    want = np.array([1, damp * p.g_c(p.tau), -damp * p.g_s(p.tau), 0])
    assert np.max(np.abs(out - want)) < 1e-10


def test_propagator_applies_lz_closed_form():
    p = LandauZenerParams(omega0=1.0, theta_final=2 * np.pi / 5, gamma0=0.1, tau=10.0)
    traj = lz_trajectory(p, np.linspace(0, 1, 16001))
    out = propagator_1d(traj, 0.0, 1.0).apply(np.array([1, 0, 0, -1], dtype=complex))
    damp = np.exp(-2 * p.gamma0 * p.tau)
    th = float(p.theta(p.tau))
    want = np.array([1, -damp * np.sin(th), 0, -damp * np.cos(th)])
    assert np.max(np.abs(out - want)) < 1e-8


def test_inverse_identities_and_frozen_diagonalization():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 1001))
    for (s0, s1) in [(0.0, 1.0), (0.2, 0.9), (0.5, 0.5)]:
        V = propagator_1d(traj, s0, s1).matrix
        Vi = propagator_1d_inverse(traj, s0, s1).matrix
        assert np.max(np.abs(V @ Vi - EYE4)) < 1e-10
        assert np.max(np.abs(Vi @ V - EYE4)) < 1e-10
    # V^-1 L(t) V is diagonal in the basis frozen at s0, entries lam(t)
    V = propagator_1d(traj, 0.0, 1.0).matrix
    Vi = propagator_1d_inverse(traj, 0.0, 1.0).matrix
    rep = frozen_representation(traj, Vi @ traj.superoperators[-1] @ V, 0.0)
    assert np.max(np.abs(rep - np.diag(traj.eigenvalues[-1]))) < 1e-8


def test_no_interblock_transitions():
    # V carries block alpha at s0 into block alpha at s1 and nothing else:
    # <E_b(s1)| V |D_a(s0)> vanishes for a != b.
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 1001))
    j1 = traj.index_of(0.7)
    V = propagator_1d(traj, 0.0, 0.7)
    rep = traj.left[j1] @ V.matrix @ traj.right[0]
    off = rep - np.diag(np.diag(rep))
    assert np.max(np.abs(off)) < 1e-10
    assert np.max(np.abs(np.diag(rep) - np.exp(V.phases))) < 1e-10


def test_rank_one_propagator_rejects_chains():
    traj, _ = defective_trajectory()
    with pytest.raises(BlockStructureError):
        propagator_1d(traj, 0.0, 1.0)
    with pytest.raises(BlockStructureError):
        adiabatic_phase(traj, traj.block_dims.index(2), 0.0, 1.0)


# ---------------------------------------------------------------------------
# Intra-block coefficients and the blockwise propagator
# ---------------------------------------------------------------------------

def test_block_coefficients_scalar_block():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 501))
    coeff = block_coefficients(traj, 1, 0.0, 1.0)
    assert coeff.v.shape == (1, 1)
    assert abs(coeff.v[0, 0] - 1.0) < 1e-8  # vanishing self-coupling
    assert coeff.shift_residual == 0.0


def test_block_coefficients_nilpotent_closed_form():
    traj, _ = defective_trajectory(tau=2.0)
    beta = traj.block_dims.index(2)
    coeff = block_coefficients(traj, beta, 0.0, 1.0)
    want = np.array([[1.0, 2.0], [0.0, 1.0]])  # exp(tau * upshift)
    assert np.max(np.abs(coeff.v - want)) < 1e-9
    assert np.max(np.abs(coeff.v_tilde @ coeff.v - np.eye(2))) < 1e-10
    assert coeff.shift_residual < 1e-9


def test_block_coefficients_random_smooth_couplings():
    # Time-dependent 2-chain: compare the paired-step integrator against
    # adaptive integration of the same sampled system.
    from scipy.integrate import solve_ivp
    from scipy.interpolate import CubicSpline

    rng = np.random.default_rng(8)
    grid = np.linspace(0, 1, 401)
    tau = 1.5
    coeffs = rng.normal(size=(2, 2, 3))
    samples = np.zeros((len(grid), 2, 2), dtype=complex)
    for a in range(2):
        for b in range(2):
            samples[:, a, b] = (coeffs[a, b, 0]
                                + coeffs[a, b, 1] * np.sin(2 * np.pi * grid)
                                + coeffs[a, b, 2] * grid**2)
    upshift = np.array([[0, 1], [0, 0]], dtype=complex)
    rhs_samples = tau * upshift[None] - samples

    from adlind.evolution import _rk4_matrix_ode

    v = _rk4_matrix_ode(rhs_samples, grid)
    spline = CubicSpline(grid, rhs_samples.reshape(len(grid), 4))

    def odefun(s, y):
        return (spline(s).reshape(2, 2) @ y.reshape(2, 2)).ravel()

    ref = solve_ivp(odefun, (0, 1), np.eye(2, dtype=complex).ravel(),
                    rtol=1e-12, atol=1e-14).y[:, -1].reshape(2, 2)
    assert np.max(np.abs(v - ref)) < 1e-8
    assert np.max(np.abs(np.linalg.inv(v) @ v - np.eye(2))) < 1e-10


def test_multiblock_reduces_to_rank_one():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    traj = deutsch_trajectory(p, np.linspace(0, 1, 501))
    a = propagator_1d(traj, 0.0, 1.0).matrix
    b = propagator_multiblock(traj, 0.0, 1.0).matrix
    assert np.max(np.abs(a - b)) < 1e-12


def test_multiblock_jordan_block_diagonalization():
    traj, L = defective_trajectory()
    V = propagator_multiblock(traj, 0.0, 1.0)
    Vi = propagator_multiblock_inverse(traj, 0.0, 1.0)
    assert np.max(np.abs(V.matrix @ Vi.matrix - EYE4)) < 1e-10
    assert np.max(np.abs(Vi.matrix @ V.matrix - EYE4)) < 1e-10
    rep = frozen_representation(traj, Vi.matrix @ L @ V.matrix, 0.0)
    for a in range(traj.n_blocks):
        sl = traj.block_slice(a)
        block = rep[sl, sl].copy()
        lam = traj.eigenvalues[0, a]
        assert np.max(np.abs(np.diag(block) - lam)) < 1e-8
        if traj.block_dims[a] == 2:
            assert abs(block[0, 1] - 1.0) < 1e-8
        rep[sl, sl] = 0.0
    assert np.max(np.abs(rep)) < 1e-8


# ---------------------------------------------------------------------------
# Master-equation oracle
# ---------------------------------------------------------------------------

def test_static_state_stays_put():
    model = LindbladModel(
        dim_s=2,
        hamiltonian=lambda t: np.zeros((2, 2), dtype=complex),
        jump_ops=[],
        horizon=3.0,
    )
    sol = solve_master(model, PLUS, np.linspace(0, 3, 7))
    assert np.max(np.abs(sol.components - sol.components[0])) < 1e-12


def test_pure_dephasing_closed_form():
    gamma = 0.3
    model = LindbladModel(
        dim_s=2,
        hamiltonian=lambda t: np.zeros((2, 2), dtype=complex),
        jump_ops=[lambda t: np.sqrt(gamma) * SZ],
        horizon=5.0,
    )
    sol = solve_master(model, PLUS, np.linspace(0, 5, 11))
    sx = sol.components[:, 1].real
    assert np.max(np.abs(sx - np.exp(-2 * gamma * sol.times))) < 1e-8
    assert np.max(np.abs(sol.components[:, 0] - 1.0)) < 1e-10


def test_nonuniform_output_grid():
    gamma = 0.3
    model = LindbladModel(
        dim_s=2,
        hamiltonian=lambda t: np.zeros((2, 2), dtype=complex),
        jump_ops=[lambda t: np.sqrt(gamma) * SZ],
        horizon=5.0,
    )
    times = np.array([0.0, 0.37, 1.0, 2.72, 5.0])
    sol = solve_master(model, PLUS, times)
    sx = sol.components[:, 1].real
    assert np.max(np.abs(sx - np.exp(-2 * gamma * times))) < 1e-8


def test_richardson_order_at_least_fourth():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=10.0)
    model = deutsch_model(p)
    ends = {}
    for n in (100, 200, 400):
        ends[n] = solve_master(model, PLUS, [0.0, 10.0], steps=n).components[-1]
    e_coarse = np.linalg.norm(ends[100] - ends[200])
    e_fine = np.linalg.norm(ends[200] - ends[400])
    assert np.log2(e_coarse / e_fine) >= 3.8


def test_closed_system_limit_reaches_ground_state():
    p = DeutschParams(omega=1.0, gamma0=0.0, tau=200.0)
    sol = solve_master(deutsch_model(p), PLUS, [0.0, 200.0])
    assert infidelity(sol.final_state(), deutsch_adiabatic_state(p, 200.0)) < 1e-4


def test_input_validation_and_step_control_failure():
    p = DeutschParams(omega=1.0, gamma0=0.1, tau=5.0)
    model = deutsch_model(p)
    with pytest.raises(InvalidStateError):
        solve_master(model, np.array([[1, 0.5], [0.4, 0]], dtype=complex), [0, 1])
    with pytest.raises(InvalidStateError):
        solve_master(model, np.diag([1.5, -0.5]).astype(complex), [0, 1])
    with pytest.raises(ValueError):
        solve_master(model, PLUS, [2.0, 1.0])
    with pytest.raises(IntegrationError):
        solve_master(model, PLUS, [0.0, 5.0], endpoint_tol=1e-16, max_steps=256)


# ---------------------------------------------------------------------------
# Fidelity and sweep curves
# ---------------------------------------------------------------------------

def test_fidelity_basic_values():
    ground = np.diag([1.0, 0.0]).astype(complex)
    excited = np.diag([0.0, 1.0]).astype(complex)
    assert abs(fidelity(PLUS, PLUS) - 1.0) < 1e-12
    assert fidelity(ground, excited) < 1e-12
    assert abs(fidelity(0.5 * np.eye(2), ground) - 1 / np.sqrt(2)) < 1e-10


def test_fidelity_symmetry_on_random_states():
    rng = np.random.default_rng(12)
    for _ in range(20):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        sig = b @ b.conj().T
        sig /= np.trace(sig).real
        assert abs(fidelity(rho, sig) - fidelity(sig, rho)) < 1e-10


def test_fidelity_rejects_invalid_states():
    with pytest.raises(InvalidStateError):
        fidelity(np.diag([1.2, -0.2]).astype(complex), 0.5 * np.eye(2))


def test_infidelity_curve_fast_sweep_fails():
    factory = lambda tau: deutsch_model(DeutschParams(omega=1.0, gamma0=0.1, tau=tau))
    target = lambda tau: deutsch_target(DeutschParams(omega=1.0, gamma0=0.1, tau=tau))
    rows = infidelity_curve(factory, PLUS, target, [0.5, 6.0, 12.0])
    assert rows[0][1] > 0.2          # far from adiabatic
    assert rows[2][1] < rows[1][1]   # improving with slower sweeps
    assert [r[0] for r in rows] == [0.5, 6.0, 12.0]


def test_write_curve_csv(tmp_path):
    path = tmp_path / "curve.csv"
    write_curve_csv(path, [(1.0, 0.5), (2.0, 0.25)], gamma0=0.1, model_label="deutsch")
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "omega_tau,infidelity,gamma0,model"
    assert len(lines) == 3
    assert lines[1].endswith(",deutsch")
    assert float(lines[1].split(",")[1]) == 0.5

"""Adiabatic evolution superoperators and the full master-equation oracle.

For one-dimensional blocks the adiabatic propagator is

    V(t, t0) = sum_a e^(int Lam_a) |D_a(t)><E_a(t0)|,
    Lam_a(t) = lam_a(t) - <E_a(t) | d_t D_a(t)>,

with inverse obtained by swapping endpoints and negating the phases.  For
multidimensional blocks each block carries coefficient matrices v(t)
solving

    dv/dt = [upshift - C_b(t)] v,      v(t0) = 1,

where C_b collects the intra-block derivative couplings; their inverse
v~ = v^(-1) enters the inverse propagator, and the additional shift
constraint sum_n v~_{g,n-1} v_{n,l} = delta_{l,g+1} is checked, not
imposed.

The full integration oracle is a classic fourth-order stepper (compiled
kernel with pure-numpy fallback) under step-doubling control: steps are
halved until the endpoint moves by less than the requested tolerance.

Trajectory-based functions take endpoints in the normalized time
s = t/tau of the trajectory grid; ``solve_master`` takes absolute times.
"""

from dataclasses import dataclass

import numpy as np

from ._core import rk4_propagate
from .basis import CoherenceVector, OperatorBasis, devectorize, pauli_basis, vectorize
from .errors import (
    BlockStructureError,
    CoefficientError,
    IntegrationError,
    InvalidStateError,
)
from .lindblad import LindbladModel, sample_superoperators
from .spectral import SpectralTrajectory

__all__ = [
    "AdiabaticPropagator",
    "BlockCoefficients",
    "MasterSolution",
    "adiabatic_phase",
    "propagator_1d",
    "propagator_1d_inverse",
    "block_coefficients",
    "propagator_multiblock",
    "propagator_multiblock_inverse",
    "frozen_representation",
    "solve_master",
    "fidelity",
    "infidelity",
    "infidelity_curve",
    "write_curve_csv",
]


# ---------------------------------------------------------------------------
# Adiabatic propagators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdiabaticPropagator:
    """Adiabatic evolution superoperator between two grid points.

    ``phases[a]`` is the accumulated exponent of block a: the full
    generalized phase integral for one-dimensional blocks, the bare
    eigenvalue integral for multiblock propagators (whose chain mixing
    lives in the coefficient matrices instead).
    """

    kind: str  # "one-dimensional" | "multiblock"
    s0: float
    s1: float
    tau: float
    matrix: np.ndarray
    phases: np.ndarray

    def __matmul__(self, other):
        return self.matrix @ other

    def apply(self, vec):
        comps = vec.components if isinstance(vec, CoherenceVector) else np.asarray(vec)
        return self.matrix @ comps


def _grid_span(traj: SpectralTrajectory, s0, s1):
    j0, j1 = traj.index_of(s0), traj.index_of(s1)
    if j1 < j0:
        raise ValueError("s1 must not precede s0")
    return j0, j1


def adiabatic_phase(traj: SpectralTrajectory, alpha: int, s0: float,
                    s1: float) -> complex:
    """Generalized phase integral int_{t0}^{t1} Lam_alpha dt of a
    one-dimensional block, by trapezoid quadrature on the grid."""
    if traj.block_dims[alpha] != 1:
        raise BlockStructureError(
            f"block {alpha} has dimension {traj.block_dims[alpha]}; the "
            "generalized phase is defined for one-dimensional blocks"
        )
    j0, j1 = _grid_span(traj, s0, s1)
    if j1 == j0:
        return 0.0 + 0.0j
    s = traj.grid[j0 : j1 + 1]
    lam = traj.lambda_path(alpha)[j0 : j1 + 1]
    gauge = traj.coupling_path(alpha, 1, alpha, 1)[j0 : j1 + 1]
    return complex(np.trapezoid(traj.tau * lam - gauge, s))


def _outer_sum(coeff, right_cols, left_rows):
    """sum_a coeff[a] |right_a><left_a| for one-dimensional blocks."""
    return (right_cols * coeff[None, :]) @ left_rows


def propagator_1d(traj: SpectralTrajectory, s0: float, s1: float) -> AdiabaticPropagator:
    """Rank-one-per-block adiabatic propagator (all blocks one-dimensional)."""
    if any(d != 1 for d in traj.block_dims):
        raise BlockStructureError(
            "propagator_1d requires one-dimensional blocks; use propagator_multiblock"
        )
    j0, j1 = _grid_span(traj, s0, s1)
    phases = np.array(
        [adiabatic_phase(traj, a, s0, s1) for a in range(traj.n_blocks)]
    )
    matrix = _outer_sum(np.exp(phases), traj.right[j1], traj.left[j0])
    return AdiabaticPropagator(kind="one-dimensional", s0=s0, s1=s1,
                               tau=traj.tau, matrix=matrix, phases=phases)


def propagator_1d_inverse(traj: SpectralTrajectory, s0: float,
                          s1: float) -> AdiabaticPropagator:
    """Inverse of :func:`propagator_1d`: endpoints swapped, phases negated."""
    if any(d != 1 for d in traj.block_dims):
        raise BlockStructureError(
            "propagator_1d_inverse requires one-dimensional blocks"
        )
    j0, j1 = _grid_span(traj, s0, s1)
    phases = np.array(
        [adiabatic_phase(traj, a, s0, s1) for a in range(traj.n_blocks)]
    )
    matrix = _outer_sum(np.exp(-phases), traj.right[j0], traj.left[j1])
    return AdiabaticPropagator(kind="one-dimensional", s0=s0, s1=s1,
                               tau=traj.tau, matrix=matrix, phases=-phases)


# ---------------------------------------------------------------------------
# Intra-block coefficient matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BlockCoefficients:
    """Coefficient matrices of one block over [s0, s1].

    ``v`` is the fundamental solution of the intra-block system from the
    identity; ``v_tilde`` is its matrix inverse.  ``shift_residual`` is the
    worst violation of the superdiagonal constraint
    sum_n v~_{g,n-1} v_{n,l} = delta_{l,g+1} (checked, not imposed).
    """

    beta: int
    v: np.ndarray
    v_tilde: np.ndarray
    shift_residual: float


def _rk4_matrix_ode(rhs_samples, s):
    """Integrate dv/ds = A(s) v, v = 1, over consecutive pairs of grid
    intervals (grid points provide the RK4 midpoints exactly)."""
    n = rhs_samples.shape[1]
    v = np.eye(n, dtype=complex)
    j = 0
    last = len(s) - 1
    while j < last:
        if j + 2 <= last:
            a0, am, a1 = rhs_samples[j], rhs_samples[j + 1], rhs_samples[j + 2]
            h = s[j + 2] - s[j]
            j += 2
        else:  # odd interval count: linearly interpolated midpoint
            a0, a1 = rhs_samples[j], rhs_samples[j + 1]
            am = 0.5 * (a0 + a1)
            h = s[j + 1] - s[j]
            j += 1
        k1 = a0 @ v
        k2 = am @ (v + 0.5 * h * k1)
        k3 = am @ (v + 0.5 * h * k2)
        k4 = a1 @ (v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return v


def _shift_residual(v, v_tilde):
    n = v.shape[0]
    worst = 0.0
    for g in range(1, n + 1):
        for el in range(1, n + 1):
            total = sum(
                v_tilde[g - 1, m - 2] * v[m - 1, el - 1]
                for m in range(2, n + 1)  # v~_{g,0} = 0 drops the m = 1 term
            )
            target = 1.0 if el == g + 1 else 0.0
            worst = max(worst, abs(total - target))
    return worst


def block_coefficients(traj: SpectralTrajectory, beta: int, s0: float,
                       s1: float) -> BlockCoefficients:
    """Fundamental intra-block coefficient matrix and its inverse.

    One-dimensional blocks reduce to the scalar exp(-int <E|d_s D>),
    evaluated with the same trapezoid rule as the phase integrals.
    """
    j0, j1 = _grid_span(traj, s0, s1)
    n = traj.block_dims[beta]
    sl = traj.block_slice(beta)
    s = traj.grid[j0 : j1 + 1]
    if n == 1:
        gauge = traj.coupling_path(beta, 1, beta, 1)[j0 : j1 + 1]
        value = np.exp(-np.trapezoid(gauge, s)) if j1 > j0 else 1.0
        v = np.array([[value]], dtype=complex)
        return BlockCoefficients(beta=beta, v=v, v_tilde=np.linalg.inv(v),
                                 shift_residual=0.0)

    upshift = np.diag(np.ones(n - 1), 1).astype(complex)
    coupling = traj.couplings[j0 : j1 + 1, sl, sl]
    rhs = traj.tau * upshift[None, :, :] - coupling
    v = _rk4_matrix_ode(rhs, s)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond > 1e12:
        raise CoefficientError(
            f"coefficient matrix of block {beta} is numerically singular "
            f"(condition number {cond:.2e}); inverse constraints cannot be met"
        )
    v_tilde = np.linalg.inv(v)
    return BlockCoefficients(beta=beta, v=v, v_tilde=v_tilde,
                             shift_residual=_shift_residual(v, v_tilde))


def _eigen_integrals(traj, j0, j1):
    s = traj.grid[j0 : j1 + 1]
    if j1 == j0:
        return np.zeros(traj.n_blocks, dtype=complex)
    return np.array(
        [np.trapezoid(traj.tau * traj.lambda_path(a)[j0 : j1 + 1], s)
         for a in range(traj.n_blocks)]
    )


def propagator_multiblock(traj: SpectralTrajectory, s0: float,
                          s1: float) -> AdiabaticPropagator:
    """Blockwise adiabatic propagator for arbitrary chain dimensions.

    Reduces to :func:`propagator_1d` when every block is one-dimensional.
    """
    j0, j1 = _grid_span(traj, s0, s1)
    phases = _eigen_integrals(traj, j0, j1)
    d2 = traj.dim
    matrix = np.zeros((d2, d2), dtype=complex)
    for beta in range(traj.n_blocks):
        sl = traj.block_slice(beta)
        coeff = block_coefficients(traj, beta, s0, s1)
        matrix += np.exp(phases[beta]) * (
            traj.right[j1][:, sl] @ coeff.v @ traj.left[j0][sl]
        )
    return AdiabaticPropagator(kind="multiblock", s0=s0, s1=s1, tau=traj.tau,
                               matrix=matrix, phases=phases)


def propagator_multiblock_inverse(traj: SpectralTrajectory, s0: float,
                                  s1: float) -> AdiabaticPropagator:
    """Inverse blockwise propagator, built from the inverse coefficients."""
    j0, j1 = _grid_span(traj, s0, s1)
    phases = _eigen_integrals(traj, j0, j1)
    d2 = traj.dim
    matrix = np.zeros((d2, d2), dtype=complex)
    for beta in range(traj.n_blocks):
        sl = traj.block_slice(beta)
        coeff = block_coefficients(traj, beta, s0, s1)
        matrix += np.exp(-phases[beta]) * (
            traj.right[j0][:, sl] @ coeff.v_tilde @ traj.left[j1][sl]
        )
    return AdiabaticPropagator(kind="multiblock", s0=s0, s1=s1, tau=traj.tau,
                               matrix=matrix, phases=-phases)


def frozen_representation(traj: SpectralTrajectory, matrix: np.ndarray,
                          s: float) -> np.ndarray:
    """Matrix elements <E_b^m(s)| M |D_a^n(s)> in the basis frozen at s."""
    j = traj.index_of(s)
    return traj.left[j] @ np.asarray(matrix, dtype=complex) @ traj.right[j]


# ---------------------------------------------------------------------------
# Full master-equation oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MasterSolution:
    """Integrated coherence-vector trajectory at the requested times."""

    times: np.ndarray
    components: np.ndarray  # (n_times, D^2)
    basis: OperatorBasis
    steps: int

    def coherence_vectors(self):
        return [CoherenceVector(components=c, basis_dim=self.basis.dim_s)
                for c in self.components]

    def states(self):
        return [devectorize(c, self.basis) for c in self.components]

    def final_state(self):
        return devectorize(self.components[-1], self.basis)


def _validate_density(rho, tol=1e-10):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise InvalidStateError("density matrix is not Hermitian within tolerance")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidStateError(f"trace is {np.trace(rho)}, expected 1")
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < -tol:
        raise InvalidStateError(f"negative eigenvalue {w.min():.3e} beyond tolerance")
    return rho


def _segmented_pass(model, times, basis, y0, h_target):
    """One fixed-resolution integration pass over all requested segments."""
    counts = [max(1, int(np.ceil((t1 - t0) / h_target)))
              for t0, t1 in zip(times[:-1], times[1:])]
    sample_times = []
    for (t0, t1), n in zip(zip(times[:-1], times[1:]), counts):
        sample_times.append(np.linspace(t0, t1, 2 * n + 1))
    all_samples = sample_superoperators(model, np.concatenate(sample_times), basis)

    out = np.empty((len(times), y0.size), dtype=complex)
    out[0] = y0
    y = y0
    offset = 0
    for idx, n in enumerate(counts):
        block = np.ascontiguousarray(all_samples[offset : offset + 2 * n + 1])
        offset += 2 * n + 1
        dt = (times[idx + 1] - times[idx]) / n
        y = rk4_propagate(block, dt, np.ascontiguousarray(y))[-1]
        out[idx + 1] = y
    return out, sum(counts)


def solve_master(model: LindbladModel, rho0, times, *,
                 endpoint_tol: float = 1e-9, steps: int | None = None,
                 max_steps: int = 2**21, basis: OperatorBasis | None = None) -> MasterSolution:
    """Integrate the master equation in superoperator form.

    Classic fourth-order stepping with step-doubling control: the step is
    halved until the endpoint moves by less than ``endpoint_tol``.  Passing
    ``steps`` runs a single fixed-resolution pass instead (used for
    convergence-order measurements).  The trace component is conserved
    identically because the first superoperator row vanishes.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if times.size < 2 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be at least two strictly increasing values")
    if basis is None:
        basis = pauli_basis(int(np.log2(model.dim_s)))
    rho0 = _validate_density(rho0)
    y0 = vectorize(rho0, basis).components
    span = times[-1] - times[0]

    if steps is not None:
        h = span / steps
        out, used = _segmented_pass(model, times, basis, y0, h)
        return MasterSolution(times=times, components=out, basis=basis, steps=used)

    # Initial resolution keeps the local rotation angle per step moderate.
    scale = np.linalg.norm(
        sample_superoperators(model, np.array([times[0] + span / 2]), basis)[0], 2
    )
    n0 = max(32, int(np.ceil(4 * scale * span)))
    h = span / n0
    prev, used = _segmented_pass(model, times, basis, y0, h)
    total = used
    while True:
        h *= 0.5
        current, used = _segmented_pass(model, times, basis, y0, h)
        total += used
        if np.max(np.abs(current[-1] - prev[-1])) < endpoint_tol:
            return MasterSolution(times=times, components=current, basis=basis,
                                  steps=used)
        prev = current
        if total > max_steps:
            raise IntegrationError(
                f"endpoint did not settle below {endpoint_tol:g} within "
                f"{max_steps} total steps; the system may be stiff - "
                "use a smaller maximum step (more steps) or shorter segments"
            )


# ---------------------------------------------------------------------------
# State distance
# ---------------------------------------------------------------------------

def _psd_sqrt(rho, tol=1e-10):
    w, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w.min() < -tol:
        raise InvalidStateError(f"negative eigenvalue {w.min():.3e} beyond tolerance")
    return (vecs * np.sqrt(np.clip(w, 0.0, None))) @ vecs.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].

    Square roots via Hermitian eigendecomposition; eigenvalues in
    [-1e-10, 0) from integrator drift are clipped to zero.
    """
    rho = _validate_density(rho)
    sigma = _validate_density(sigma)
    if rho.shape != sigma.shape:
        raise InvalidStateError("states must have equal dimension")
    root = _psd_sqrt(rho)
    inner = root @ sigma @ root
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    if w.min() < -1e-10:
        raise InvalidStateError(f"fidelity kernel has eigenvalue {w.min():.3e}")
    value = float(np.sum(np.sqrt(np.clip(w, 0.0, None))))
    return min(value, 1.0)


def infidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 1.0 - fidelity(rho, sigma)


def infidelity_curve(model_for_tau, rho0, target_rule, tau_grid,
                     omega: float = 1.0, endpoint_tol: float = 1e-9):
    """Infidelity against a target state over a sweep of total times.

    ``model_for_tau`` maps tau to the model, ``target_rule`` maps tau to
    the target density matrix, and ``tau_grid`` holds the sweep values of
    omega * tau.  Returns rows (omega_tau, infidelity) ordered by tau.
    """
    rows = []
    for omega_tau in np.asarray(tau_grid, dtype=float):
        tau = omega_tau / omega
        model = model_for_tau(tau)
        solution = solve_master(model, rho0, [0.0, tau], endpoint_tol=endpoint_tol)
        rows.append((float(omega_tau),
                     infidelity(solution.final_state(), target_rule(tau))))
    return rows


def write_curve_csv(path, rows, gamma0: float, model_label: str):
    """Write sweep rows with header (omega_tau, infidelity, gamma0, model)."""
    with open(path, "w", newline="") as fh:
        fh.write("omega_tau,infidelity,gamma0,model\n")
        for omega_tau, value in rows:
            fh.write(f"{omega_tau:.14e},{value:.14e},{gamma0:.14e},{model_label}\n")

"""Heat and entropy rates along adiabatic open-system trajectories.

With a state expanded over the Jordan basis, rho = sum_i w_i D_i, the two
rates read (D = Hilbert-space dimension, natural logarithm, k = 1)

    dQ/dt =  (1/D) <h(t)|      L(t) sum_i w_i |D_i(t)>,
    dS/dt = -(1/D) <rho_log(t)| L(t) sum_i w_i |D_i(t)>,

where <h| has components tr(H sigma_j) and <rho_log| components
tr(log(rho) sigma_j).  The 1/D prefactor with the plain component pairing
is fixed by requiring dQ/dt = tr(H  generator[rho]), which these
expressions then satisfy identically.

For a Gibbs state exp(-beta H)/Z the traceless log components obey
tr(log rho_eq sigma_j) = -beta tr(H sigma_j); since the trace row of any
trace-preserving L vanishes, dS = beta dQ follows term by term, whatever
the expansion weights.  ``equilibrium_check`` verifies that numerically
along a driven thermal trajectory.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .basis import OperatorBasis, devectorize, pauli_basis, vectorize
from .errors import BlockStructureError, DimensionMismatchError, LogDomainError
from .lindblad import LindbladModel
from .models import gibbs_state
from .spectral import SpectralTrajectory, track_spectrum

__all__ = [
    "ThermoSample",
    "EquilibriumCheck",
    "h_vector",
    "rho_log_vector",
    "expand_state",
    "propagate_weights",
    "heat_rate",
    "entropy_rate",
    "thermal_qubit_model",
    "equilibrium_check",
]

_LOG_FLOOR = 1e-14


def h_vector(H: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Left vector of the Hamiltonian: components tr(H sigma_j)."""
    H = np.asarray(H, dtype=complex)
    if H.shape != (basis.dim_s, basis.dim_s):
        raise DimensionMismatchError(
            f"H has shape {H.shape}, basis expects ({basis.dim_s}, {basis.dim_s})"
        )
    return np.einsum("ab,nba->n", H, basis.elements)


def rho_log_vector(rho: np.ndarray, basis: OperatorBasis,
                   floor: float = _LOG_FLOOR) -> np.ndarray:
    """Left vector of log(rho): components tr(log(rho) sigma_j).

    Eigenvalues in (0, floor) are lifted to the floor (integrator drift);
    non-positive eigenvalues are a genuine domain violation and raise.
    """
    rho = np.asarray(rho, dtype=complex)
    w, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    if w.min() <= 0:
        raise LogDomainError(
            f"state has eigenvalue {w.min():.3e}; the matrix logarithm "
            "requires strictly positive spectrum"
        )
    log_rho = (vecs * np.log(np.clip(w, floor, None))) @ vecs.conj().T
    return np.einsum("ab,nba->n", log_rho, basis.elements)


def expand_state(basis_left: np.ndarray, state_components: np.ndarray) -> np.ndarray:
    """Expansion weights of a coherence vector over a Jordan basis
    (rows of ``basis_left`` are the left chain vectors in flat order)."""
    return basis_left @ state_components


def propagate_weights(traj: SpectralTrajectory, weights0: np.ndarray) -> np.ndarray:
    """Adiabatic weights w_i(s) = w_i(0) exp(int (lam_i - <E_i|d_t D_i>) dt).

    Requires one-dimensional blocks.  Returns an array of shape
    (n_grid, D^2) aligned with the flat block order.
    """
    if any(d != 1 for d in traj.block_dims):
        raise BlockStructureError("weight propagation implemented for "
                                  "one-dimensional blocks only")
    s = traj.grid
    exponents = np.empty((len(s), traj.n_blocks), dtype=complex)
    for a in range(traj.n_blocks):
        rate = traj.tau * traj.lambda_path(a) - traj.coupling_path(a, 1, a, 1)
        exponents[:, a] = cumulative_trapezoid(rate, s, initial=0.0)
    return np.asarray(weights0)[None, :] * np.exp(exponents)


def _rate(traj, weights, left_vec, s):
    j = traj.index_of(s)
    state = traj.right[j] @ np.asarray(weights, dtype=complex)
    dim_s = int(round(np.sqrt(traj.dim)))
    return float(np.real(left_vec @ (traj.superoperators[j] @ state))) / dim_s


def heat_rate(traj: SpectralTrajectory, weights, H: np.ndarray, s: float,
              basis: OperatorBasis | None = None) -> float:
    """Adiabatic heat rate at grid point s for the given expansion weights.

    Numerically equal to tr(H generator[rho]) for the state the weights
    represent.
    """
    if basis is None:
        basis = pauli_basis(int(round(np.log2(np.sqrt(traj.dim)))))
    return _rate(traj, weights, h_vector(H, basis), s)


def entropy_rate(traj: SpectralTrajectory, weights, s: float,
                 basis: OperatorBasis | None = None,
                 log_state: np.ndarray | None = None) -> float:
    """Adiabatic entropy rate at grid point s.

    By default the logarithm is taken of the state the weights represent
    (giving the von Neumann entropy rate for trace-preserving dynamics);
    pass ``log_state`` to evaluate the logarithm on a reference state such
    as the instantaneous Gibbs state.
    """
    if basis is None:
        basis = pauli_basis(int(round(np.log2(np.sqrt(traj.dim)))))
    if log_state is None:
        j = traj.index_of(s)
        log_state = devectorize(traj.right[j] @ np.asarray(weights, dtype=complex),
                                basis)
    return -_rate(traj, weights, rho_log_vector(log_state, basis), s)


# ---------------------------------------------------------------------------
# Driven thermal qubit
# ---------------------------------------------------------------------------

def thermal_qubit_model(hamiltonian_path: Callable[[float], np.ndarray],
                        beta: float, horizon: float,
                        gamma: float = 1.0) -> LindbladModel:
    """Two-level thermalizing generator whose steady state is the
    instantaneous Gibbs state of ``hamiltonian_path``.

    Decay/excitation jump pair between the instantaneous energy
    eigenstates with detailed-balance rates gamma and
    gamma exp(-beta (E_e - E_g)).
    """

    def _eigenpair(t):
        H = np.asarray(hamiltonian_path(t), dtype=complex)
        if H.shape != (2, 2):
            raise DimensionMismatchError("thermal_qubit_model is two-level only")
        energies, vecs = np.linalg.eigh(H)
        return energies, vecs

    def decay(t):
        energies, vecs = _eigenpair(t)
        g, e = vecs[:, 0], vecs[:, 1]
        return np.sqrt(gamma) * np.outer(g, e.conj())

    def excite(t):
        energies, vecs = _eigenpair(t)
        g, e = vecs[:, 0], vecs[:, 1]
        rate = gamma * np.exp(-beta * (energies[1] - energies[0]))
        return np.sqrt(rate) * np.outer(e, g.conj())

    return LindbladModel(
        dim_s=2,
        hamiltonian=lambda t: np.asarray(hamiltonian_path(t), dtype=complex),
        jump_ops=[decay, excite],
        horizon=horizon,
        label="thermal_qubit",
    )


@dataclass(frozen=True)
class ThermoSample:
    """Heat and entropy rates at one time along the trajectory."""

    time: float
    dq_rate: float
    ds_rate: float
    beta: float

    @property
    def residual(self):
        return abs(self.ds_rate - self.beta * self.dq_rate)


@dataclass(frozen=True)
class EquilibriumCheck:
    """Result of the dS = beta dQ verification along a thermal trajectory."""

    samples: list
    beta: float
    max_residual: float
    max_abs_dq: float

    @property
    def relative_residual(self):
        if self.max_abs_dq == 0.0:
            return 0.0
        return self.max_residual / self.max_abs_dq


def equilibrium_check(hamiltonian_path: Callable[[float], np.ndarray],
                      beta: float, grid, gamma: float = 1.0,
                      probe: np.ndarray | None = None) -> EquilibriumCheck:
    """Verify dS = beta dQ along a driven thermal-equilibrium trajectory.

    At each grid time the rates are evaluated with the entropy logarithm
    taken on the instantaneous Gibbs state.  With the default
    ``probe=None`` the expansion weights are those of the initial Gibbs
    state propagated adiabatically, so both rates vanish identically at
    exact equilibrium.  Supplying a displaced ``probe`` density matrix
    populates the decaying blocks and makes the rates nonzero while the
    identity still holds term by term.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must hold at least three increasing times")
    horizon = float(grid[-1])
    model = thermal_qubit_model(hamiltonian_path, beta, horizon, gamma=gamma)
    basis = pauli_basis(1)
    traj = track_spectrum(model, grid / horizon)

    rho0 = gibbs_state(hamiltonian_path(grid[0]), beta) if probe is None else probe
    weights0 = expand_state(traj.left[0], vectorize(rho0, basis).components)
    weights = propagate_weights(traj, weights0)

    samples = []
    for j, t in enumerate(grid):
        s = traj.grid[j]
        H = np.asarray(hamiltonian_path(t), dtype=complex)
        rho_eq = gibbs_state(H, beta)
        dq = heat_rate(traj, weights[j], H, s, basis)
        ds = entropy_rate(traj, weights[j], s, basis, log_state=rho_eq)
        samples.append(ThermoSample(time=float(t), dq_rate=dq, ds_rate=ds,
                                    beta=beta))
    max_residual = max(sm.residual for sm in samples)
    max_abs_dq = max(abs(sm.dq_rate) for sm in samples)
    return EquilibriumCheck(samples=samples, beta=beta,
                            max_residual=max_residual, max_abs_dq=max_abs_dq)

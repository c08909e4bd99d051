"""Built-in qubit models with closed-form spectra and adiabatic solutions.

Two families are provided:

* an oracle-rotation model (Deutsch-type Hamiltonian) under pure dephasing,
      H(t) = -(omega/2) [g_c(t) sigma_x - g_s(t) sigma_y],
      g_c = cos(pi F t / 2 tau),  g_s = sin(pi F t / 2 tau),
  with jump operator sqrt(gamma0) sigma_z, and

* a Landau-Zener sweep under bit-phase flip,
      H(t) = (1/2) [omega0 sigma_z + Delta(t) sigma_x],
      theta(t) = arctan(Delta(t) / omega0),
  with jump operator sqrt(gamma0) sigma_y.

Conventions: omega (resp. omega0) is the coherence-vector rotation rate, so
the superoperators carry entries omega*g_s, omega*g_c (resp. omega0,
omega0*tan(theta)).  The closed-form eigenvalues follow from those matrices:

    Deutsch:      {0, -2 gamma, -Delta_plus, -Delta_minus},
                  Delta_pm = gamma +/- sqrt(gamma^2 - omega^2),
    Landau-Zener: {0, -2 gamma, -gamma -/+ kappa/cos(theta)},
                  kappa^2 = gamma^2 cos^2(theta) - omega0^2,

with principal complex square roots throughout.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateSpectrumError
from .lindblad import LindbladModel, sample_superoperators
from .spectral import (
    JordanBasis,
    JordanBlockChain,
    SpectralTrajectory,
    trajectory_from_arrays,
)

__all__ = [
    "DeutschParams",
    "deutsch_model",
    "deutsch_analytic_spectrum",
    "deutsch_adiabatic_state",
    "deutsch_target",
    "deutsch_trajectory",
    "LandauZenerParams",
    "lz_model",
    "lz_analytic_spectrum",
    "lz_adiabatic_state",
    "lz_target",
    "lz_trajectory",
    "gibbs_state",
]

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)
_ID = np.eye(2, dtype=complex)


# ---------------------------------------------------------------------------
# Oracle-rotation (Deutsch) model under dephasing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeutschParams:
    """Parameters of the dephased oracle-rotation model."""

    omega: float
    gamma0: float
    tau: float
    f_values: tuple = (0, 1)

    def __post_init__(self):
        if self.omega <= 0 or self.tau <= 0 or self.gamma0 < 0:
            raise ValueError("need omega > 0, tau > 0, gamma0 >= 0")
        if any(v not in (0, 1) for v in self.f_values) or len(self.f_values) != 2:
            raise ValueError("f_values must be a pair drawn from {0, 1}")

    @property
    def big_f(self):
        """Oracle weight F = 1 - (-1)^(f(0)+f(1)), either 0 or 2."""
        return 1 - (-1) ** (self.f_values[0] + self.f_values[1])

    def g_c(self, t):
        return np.cos(np.pi * self.big_f * np.asarray(t) / (2 * self.tau))

    def g_s(self, t):
        return np.sin(np.pi * self.big_f * np.asarray(t) / (2 * self.tau))


def deutsch_model(p: DeutschParams) -> LindbladModel:
    """Lindblad model of the oracle rotation with constant dephasing."""
    sqrt_g = np.sqrt(p.gamma0)

    def ham(t):
        return -0.5 * p.omega * (p.g_c(t) * _SX - p.g_s(t) * _SY)

    def ham_batch(ts):
        gc = p.g_c(ts)[:, None, None]
        gs = p.g_s(ts)[:, None, None]
        return -0.5 * p.omega * (gc * _SX - gs * _SY)

    def jump(t):
        return sqrt_g * _SZ

    def jump_batch(ts):
        return np.broadcast_to(sqrt_g * _SZ, (len(ts), 2, 2)).copy()

    return LindbladModel(
        dim_s=2,
        hamiltonian=ham,
        jump_ops=[jump],
        horizon=p.tau,
        hamiltonian_batch=ham_batch,
        jump_ops_batch=[jump_batch],
        label="deutsch",
    )


def _deutsch_roots(p: DeutschParams):
    gamma = p.gamma0
    root = np.sqrt(complex(gamma * gamma - p.omega * p.omega))
    if abs(root) < 1e-12 * p.omega:
        raise DegenerateSpectrumError(
            f"branch point gamma = omega (gamma0 = {gamma}, omega = {p.omega}): "
            "the two rotating eigenvalues coincide"
        )
    return gamma + root, gamma - root, root


def _deutsch_arrays(p: DeutschParams, times):
    """Stacked chain matrices of the closed-form spectrum.

    Returns (eigenvalues (n, 4), right (n, 4, 4) with chain vectors as
    columns, left (n, 4, 4) with left vectors as rows), in the block order
    (stationary, dephasing, -Delta_plus, -Delta_minus).
    """
    delta_p, delta_m, root = _deutsch_roots(p)
    om = p.omega
    times = np.atleast_1d(np.asarray(times, dtype=float))
    gc, gs = p.g_c(times), p.g_s(times)
    n = len(times)

    right = np.zeros((n, 4, 4), dtype=complex)
    left = np.zeros((n, 4, 4), dtype=complex)
    right[:, 0, 0] = 1.0
    right[:, 1, 1], right[:, 2, 1] = -gc, gs
    right[:, 1, 2], right[:, 2, 2], right[:, 3, 2] = delta_p * gs / om, delta_p * gc / om, 1.0
    right[:, 1, 3], right[:, 2, 3], right[:, 3, 3] = delta_m * gs / om, delta_m * gc / om, 1.0
    left[:, 0, 0] = 1.0
    left[:, 1, 1], left[:, 1, 2] = -gc, gs
    left[:, 2, 1], left[:, 2, 2], left[:, 2, 3] = (
        om * gs / (2 * root), om * gc / (2 * root), -delta_m / (2 * root))
    left[:, 3, 1], left[:, 3, 2], left[:, 3, 3] = (
        -om * gs / (2 * root), -om * gc / (2 * root), delta_p / (2 * root))

    eigenvalues = np.broadcast_to(
        np.array([0.0, -2 * p.gamma0, -delta_p, -delta_m]), (n, 4)
    ).copy()
    return eigenvalues, right, left


def _basis_from_arrays(eigenvalues, right, left, t):
    blocks = [
        JordanBlockChain(
            eigenvalue=complex(eigenvalues[a]),
            right_chain=right[:, a][None, :].copy(),
            left_chain=left[a][None, :].copy(),
        )
        for a in range(len(eigenvalues))
    ]
    return JordanBasis(blocks=blocks, time=t)


def deutsch_analytic_spectrum(p: DeutschParams, t: float) -> JordanBasis:
    """Closed-form Jordan basis (four one-dimensional blocks) at time t.

    Normalization fixed so that the left/right chains are bi-orthonormal;
    this is the gauge the closed-form adiabaticity coefficients refer to.
    """
    eigenvalues, right, left = _deutsch_arrays(p, t)
    return _basis_from_arrays(eigenvalues[0], right[0], left[0], t)


def deutsch_adiabatic_state(p: DeutschParams, t: float) -> np.ndarray:
    """Closed-form adiabatic density matrix
    (1/2)[1 + e^(-2 gamma0 t) (g_c sigma_x - g_s sigma_y)]."""
    damp = np.exp(-2 * p.gamma0 * t)
    return 0.5 * (_ID + damp * (p.g_c(t) * _SX - p.g_s(t) * _SY))


def deutsch_target(p: DeutschParams) -> np.ndarray:
    """Adiabatic solution at t = tau (the sweep target state)."""
    return deutsch_adiabatic_state(p, p.tau)


def deutsch_trajectory(p: DeutschParams, grid) -> SpectralTrajectory:
    """Trajectory built from the closed-form spectra (fixed analytic gauge)."""
    grid = np.asarray(grid, dtype=float)
    superops = sample_superoperators(deutsch_model(p), grid * p.tau)
    eigenvalues, right, left = _deutsch_arrays(p, grid * p.tau)
    return trajectory_from_arrays(grid, p.tau, (1, 1, 1, 1), eigenvalues,
                                  right, left, superops)


# ---------------------------------------------------------------------------
# Landau-Zener model under bit-phase flip
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LandauZenerParams:
    """Parameters of the Landau-Zener sweep.

    ``delta_profile`` maps t to the transverse drive Delta(t) and must
    satisfy Delta(0) = 0; the default is the linear ramp reaching
    theta(tau) = theta_final.
    """

    omega0: float
    theta_final: float
    gamma0: float
    tau: float
    delta_profile: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.omega0 <= 0 or self.tau <= 0 or self.gamma0 < 0:
            raise ValueError("need omega0 > 0, tau > 0, gamma0 >= 0")
        if not 0 <= self.theta_final < np.pi / 2:
            raise ValueError("theta_final must lie in [0, pi/2): tan(theta) diverges")

    def delta(self, t):
        if self.delta_profile is not None:
            return np.asarray(self.delta_profile(np.asarray(t, dtype=float)))
        return np.tan(self.theta_final) * self.omega0 * np.asarray(t, dtype=float) / self.tau

    def theta(self, t):
        return np.arctan(self.delta(t) / self.omega0)


def lz_model(p: LandauZenerParams) -> LindbladModel:
    """Lindblad model of the sweep with constant bit-phase-flip rate."""
    if abs(float(p.delta(0.0))) > 1e-12 * p.omega0:
        raise ValueError("delta_profile must vanish at t = 0")
    sqrt_g = np.sqrt(p.gamma0)

    def ham(t):
        return 0.5 * (p.omega0 * _SZ + p.delta(t) * _SX)

    def ham_batch(ts):
        d = np.asarray(p.delta(ts))[:, None, None]
        return 0.5 * (p.omega0 * _SZ + d * _SX)

    def jump(t):
        return sqrt_g * _SY

    def jump_batch(ts):
        return np.broadcast_to(sqrt_g * _SY, (len(ts), 2, 2)).copy()

    return LindbladModel(
        dim_s=2,
        hamiltonian=ham,
        jump_ops=[jump],
        horizon=p.tau,
        hamiltonian_batch=ham_batch,
        jump_ops_batch=[jump_batch],
        label="landau_zener",
    )


def _lz_arrays(p: LandauZenerParams, times):
    """Stacked chain matrices of the closed-form sweep spectrum."""
    gamma, om0 = p.gamma0, p.omega0
    times = np.atleast_1d(np.asarray(times, dtype=float))
    th = np.asarray(p.theta(times), dtype=float)
    c, s = np.cos(th), np.sin(th)
    kappa = np.sqrt((gamma * c) ** 2 - om0**2 + 0j)
    if np.min(np.abs(kappa)) < 1e-12 * om0:
        j = int(np.argmin(np.abs(kappa)))
        raise DegenerateSpectrumError(
            f"kappa vanishes at t = {times[j]} (gamma cos(theta) = omega0)"
        )
    if gamma < 1e-12 * om0:
        raise DegenerateSpectrumError(
            "gamma0 = 0 makes the stationary and dephasing eigenvalues coincide"
        )
    kt_plus = 1 + c * gamma / kappa
    kt_minus = 1 - c * gamma / kappa
    n = len(times)

    right = np.zeros((n, 4, 4), dtype=complex)
    left = np.zeros((n, 4, 4), dtype=complex)
    right[:, 0, 0] = 1.0
    right[:, 1, 1], right[:, 3, 1] = s, c
    right[:, 1, 2], right[:, 2, 2], right[:, 3, 2] = -c, (gamma * c - kappa) / om0, s
    right[:, 1, 3], right[:, 2, 3], right[:, 3, 3] = -c, (gamma * c + kappa) / om0, s
    left[:, 0, 0] = 1.0
    left[:, 1, 1], left[:, 1, 3] = s, c
    left[:, 2, 1], left[:, 2, 2], left[:, 2, 3] = (
        -0.5 * c * kt_plus, -0.5 * om0 / kappa, 0.5 * s * kt_plus)
    left[:, 3, 1], left[:, 3, 2], left[:, 3, 3] = (
        -0.5 * c * kt_minus, 0.5 * om0 / kappa, 0.5 * s * kt_minus)

    eigenvalues = np.zeros((n, 4), dtype=complex)
    eigenvalues[:, 1] = -2 * gamma
    eigenvalues[:, 2] = -gamma - kappa / c
    eigenvalues[:, 3] = -gamma + kappa / c
    return eigenvalues, right, left


def lz_analytic_spectrum(p: LandauZenerParams, t: float) -> JordanBasis:
    """Closed-form Jordan basis of the sweep superoperator at time t."""
    eigenvalues, right, left = _lz_arrays(p, t)
    return _basis_from_arrays(eigenvalues[0], right[0], left[0], t)


def lz_adiabatic_state(p: LandauZenerParams, t: float) -> np.ndarray:
    """Closed-form adiabatic state
    (1/2)[1 - e^(-2 gamma0 t)(sin(theta) sigma_x + cos(theta) sigma_z)]."""
    damp = np.exp(-2 * p.gamma0 * t)
    th = float(p.theta(t))
    return 0.5 * (_ID - damp * (np.sin(th) * _SX + np.cos(th) * _SZ))


def lz_target(p: LandauZenerParams) -> np.ndarray:
    return lz_adiabatic_state(p, p.tau)


def lz_trajectory(p: LandauZenerParams, grid) -> SpectralTrajectory:
    """Trajectory built from the closed-form spectra (fixed analytic gauge)."""
    grid = np.asarray(grid, dtype=float)
    superops = sample_superoperators(lz_model(p), grid * p.tau)
    eigenvalues, right, left = _lz_arrays(p, grid * p.tau)
    return trajectory_from_arrays(grid, p.tau, (1, 1, 1, 1), eigenvalues,
                                  right, left, superops)


# ---------------------------------------------------------------------------
# Thermal states
# ---------------------------------------------------------------------------

def gibbs_state(H: np.ndarray, beta: float) -> np.ndarray:
    """Thermal state exp(-beta H)/Z of a Hermitian Hamiltonian."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    H = np.asarray(H, dtype=complex)
    energies, vecs = np.linalg.eigh(H)
    weights = np.exp(-beta * (energies - energies.min()))
    weights /= weights.sum()
    return (vecs * weights) @ vecs.conj().T

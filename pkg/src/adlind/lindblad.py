"""Time-dependent Lindblad models and their superoperator matrices.

A model is the generator of a time-local master equation (hbar = 1)

    drho/dt = -i [H(t), rho] + (1/2) sum_n (2 G_n rho G_n^dag
                                            - {G_n^dag G_n, rho}),

with jump operators G_n(t).  In a fixed operator basis the generator acts
on coherence vectors through the matrix

    L_ki(t) = (1/D) tr(sigma_k^dag  generator[sigma_i]),

whose first row vanishes for trace-preserving dynamics.
"""

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .basis import OperatorBasis, pauli_basis
from .errors import DimensionMismatchError, HorizonError

__all__ = [
    "LindbladModel",
    "Superoperator",
    "generator_action",
    "superoperator_matrix",
    "sample_superoperators",
]

_HORIZON_SLACK = 1e-12


@dataclass(frozen=True)
class Superoperator:
    """Matrix of a superoperator on coherence vectors, optionally stamped
    with the sample time it was built at."""

    matrix: np.ndarray
    time: float | None = None

    @property
    def dim(self):
        return self.matrix.shape[0]


@dataclass(frozen=True)
class LindbladModel:
    """Time-dependent Lindblad generator on a D-dimensional system.

    ``hamiltonian`` and each entry of ``jump_ops`` map a time in [0, tau]
    to a D x D matrix and must be pure (same t -> same matrix).  The
    optional ``*_batch`` callables map an array of times to a stacked
    (n, D, D) array; they exist so grid sampling of closed-form models does
    not pay one Python call per time point.
    """

    dim_s: int
    hamiltonian: Callable[[float], np.ndarray]
    jump_ops: Sequence[Callable[[float], np.ndarray]]
    horizon: float
    hamiltonian_batch: Callable[[np.ndarray], np.ndarray] | None = None
    jump_ops_batch: Sequence[Callable[[np.ndarray], np.ndarray]] | None = None
    label: str = ""

    def _check_time(self, t: float):
        if not (-_HORIZON_SLACK <= t <= self.horizon + _HORIZON_SLACK * max(1.0, self.horizon)):
            raise HorizonError(f"t = {t} outside the model horizon [0, {self.horizon}]")

    def hamiltonian_at(self, times: np.ndarray) -> np.ndarray:
        """H(t) stacked over an array of times, shape (n, D, D)."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.hamiltonian_batch is not None:
            return np.asarray(self.hamiltonian_batch(times), dtype=complex)
        return np.array([self.hamiltonian(t) for t in times], dtype=complex)

    def jumps_at(self, times: np.ndarray) -> list[np.ndarray]:
        """Each jump operator stacked over ``times``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.jump_ops_batch is not None:
            return [np.asarray(f(times), dtype=complex) for f in self.jump_ops_batch]
        return [np.array([f(t) for t in times], dtype=complex) for f in self.jump_ops]


def generator_action(model: LindbladModel, t: float, rho: np.ndarray) -> np.ndarray:
    """Apply the generator at time t to a (not necessarily normalized) rho."""
    model._check_time(t)
    rho = np.asarray(rho, dtype=complex)
    d = model.dim_s
    if rho.shape != (d, d):
        raise DimensionMismatchError(f"rho has shape {rho.shape}, expected ({d}, {d})")
    H = np.asarray(model.hamiltonian(t), dtype=complex)
    out = -1j * (H @ rho - rho @ H)
    for jump in model.jump_ops:
        G = np.asarray(jump(t), dtype=complex)
        GdG = G.conj().T @ G
        out += G @ rho @ G.conj().T - 0.5 * (GdG @ rho + rho @ GdG)
    return out


_TENSOR_CACHE = {}


def _structure_tensors(basis: OperatorBasis):
    """Linear/bilinear maps from (H, G) entries to superoperator entries.

    The commutator part is linear in H and the dissipator bilinear in each
    jump operator, so a grid of superoperators reduces to two BLAS matmuls
    per sample batch.  Cached per basis (keyed by content hash).
    """
    key = (basis.dim_s, basis.elements.tobytes())
    if key in _TENSOR_CACHE:
        return _TENSOR_CACHE[key]
    sig = basis.elements
    sig_dag = basis.conj_transposed()
    d, d2 = basis.dim_s, basis.dim_hs
    left = np.einsum("iab,kbc->kiac", sig, sig_dag)  # (sigma_i sigma_k^dag)
    right = np.einsum("kab,ibc->kiac", sig_dag, sig)  # (sigma_k^dag sigma_i)
    # coefficient of H[a, b] in L_comm[k, i]
    comm = (-1j / d) * (left - right).transpose(3, 2, 0, 1)  # (a, b, k, i)
    # coefficient of G[a, b] conj(G[c, d']) in L_diss[k, i]
    diss = np.einsum("kca,ibd->abcdki", sig_dag, sig).astype(complex)
    diss -= 0.5 * np.einsum("ac,kibd->abcdki", np.eye(d), (left + right))
    diss /= d
    tensors = (comm.reshape(d * d, d2 * d2), diss.reshape(d**4, d2 * d2))
    _TENSOR_CACHE[key] = tensors
    return tensors


def _assemble(H_stack, jump_stacks, basis: OperatorBasis) -> np.ndarray:
    """Superoperator matrices for stacked H / jump samples, shape (n, D^2, D^2)."""
    d, d2 = basis.dim_s, basis.dim_hs
    n = H_stack.shape[0]
    if d <= 4:
        comm, diss = _structure_tensors(basis)
        out = H_stack.reshape(n, d * d) @ comm
        for G_stack in jump_stacks:
            gv = G_stack.reshape(n, d * d)
            pairs = (gv[:, :, None] * gv.conj()[:, None, :]).reshape(n, d**4)
            out = out + pairs @ diss
        return out.reshape(n, d2, d2)

    sig = basis.elements[None]  # (1, D^2, D, D) broadcast over t
    H = H_stack[:, None]
    action = -1j * (H @ sig - sig @ H)
    for G_stack in jump_stacks:
        G = G_stack[:, None]
        Gd = G.conj().swapaxes(-1, -2)
        GdG = Gd @ G
        action += G @ sig @ Gd - 0.5 * (GdG @ sig + sig @ GdG)
    flat = action.swapaxes(-1, -2).reshape(n, d2, -1)
    proj = basis.conj_transposed().reshape(d2, -1)
    return (flat @ proj.T).swapaxes(-1, -2) / basis.dim_s


def superoperator_matrix(model: LindbladModel, t: float,
                         basis: OperatorBasis | None = None) -> Superoperator:
    """Matrix of the generator at time t in the given operator basis."""
    model._check_time(t)
    if basis is None:
        basis = pauli_basis(int(np.log2(model.dim_s)))
    if basis.dim_s != model.dim_s:
        raise DimensionMismatchError("basis dimension does not match the model")
    ts = np.array([t], dtype=float)
    mat = _assemble(model.hamiltonian_at(ts), model.jumps_at(ts), basis)[0]
    return Superoperator(matrix=mat, time=t)


def sample_superoperators(model: LindbladModel, times: np.ndarray,
                          basis: OperatorBasis | None = None) -> np.ndarray:
    """Superoperator matrices over an array of times, shape (n, D^2, D^2).

    Uses the model's batch samplers when present, so closed-form models
    vectorize over the whole grid.
    """
    times = np.asarray(times, dtype=float)
    for t in (times.min(initial=0.0), times.max(initial=0.0)):
        model._check_time(float(t))
    if basis is None:
        basis = pauli_basis(int(np.log2(model.dim_s)))
    if basis.dim_s != model.dim_s:
        raise DimensionMismatchError("basis dimension does not match the model")
    return _assemble(model.hamiltonian_at(times), model.jumps_at(times), basis)

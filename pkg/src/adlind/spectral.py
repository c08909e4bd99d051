"""Quasi-eigenstructure of Lindblad superoperators.

A superoperator L generally fails to be diagonalizable, so its spectral
data are organised in Jordan chains: right chains obey

    L |D^n> = |D^(n-1)> + lam |D^n>,      |D^0> = 0,

left chains obey <E^n| L = <E^(n+1)| + lam <E^n| with <E^(N+1)| = 0, and
the two families are bi-orthonormal, <E_b^m | D_a^n> = delta_ab delta_mn,
under the plain (bilinear) component pairing.  This module computes such
decompositions for a single matrix and tracks them smoothly along a time
grid, producing the derivative couplings <E_b^k | d_s D_a^n> needed by the
adiabaticity conditions.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .errors import (
    CrossingError,
    DefectiveDecompositionError,
    DimensionMismatchError,
    TrackingError,
)
from .lindblad import LindbladModel, Superoperator, sample_superoperators

__all__ = [
    "JordanBlockChain",
    "JordanBasis",
    "SpectralTrajectory",
    "decompose",
    "left_right_residual",
    "biorthonormality_residual",
    "completeness_residual",
    "reconstruct",
    "track_spectrum",
    "trajectory_from_bases",
    "trajectory_from_arrays",
]


@dataclass
class JordanBlockChain:
    """One Jordan block: eigenvalue plus right/left chains.

    ``right_chain[n - 1]`` is the n-th right quasi-eigenvector (n = 1 is the
    true eigenvector); ``left_chain`` is ordered the same way.
    """

    eigenvalue: complex
    right_chain: np.ndarray  # (N, d2)
    left_chain: np.ndarray  # (N, d2)

    @property
    def block_dim(self):
        return self.right_chain.shape[0]


@dataclass
class JordanBasis:
    """Complete set of Jordan chains of one superoperator sample."""

    blocks: list
    time: float | None = None

    @property
    def total_dim(self):
        return sum(b.block_dim for b in self.blocks)

    @property
    def block_dims(self):
        return tuple(b.block_dim for b in self.blocks)

    def right_matrix(self):
        """Columns are the right chain vectors in flat block order."""
        return np.concatenate([b.right_chain for b in self.blocks], axis=0).T

    def left_matrix(self):
        """Rows are the left chain vectors in flat block order."""
        return np.concatenate([b.left_chain for b in self.blocks], axis=0)

    def flat_eigenvalues(self):
        return np.concatenate(
            [np.full(b.block_dim, b.eigenvalue) for b in self.blocks]
        )

    def block_slices(self):
        out, start = [], 0
        for b in self.blocks:
            out.append(slice(start, start + b.block_dim))
            start += b.block_dim
        return out


def _cluster_indices(eigvals, tol):
    """Connected components of eigenvalues under |w_i - w_j| < tol."""
    n = len(eigvals)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigvals[i] - eigvals[j]) < tol:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _nullspace(mat, tol):
    """Orthonormal basis of the numerical kernel, singular values below tol."""
    _, s, vh = np.linalg.svd(mat)
    rank = int(np.sum(s > tol))
    return vh[rank:].conj().T


def _chains_for_cluster(M, lam, multiplicity, tol):
    """Jordan chains of the (shifted) matrix M = L - lam*I for one cluster.

    Returns a list of (chain_length, top_vector); rank decisions that do
    not close on the algebraic multiplicity raise
    DefectiveDecompositionError.
    """
    d2 = M.shape[0]
    kernels = [np.zeros((d2, 0))]
    power = np.eye(d2)
    while kernels[-1].shape[1] < multiplicity:
        if len(kernels) > multiplicity:
            raise DefectiveDecompositionError(
                f"cluster at lambda = {lam}: generalized eigenspace does not "
                f"close on multiplicity {multiplicity} (rank decisions "
                f"ambiguous at tolerance {tol:g})"
            )
        power = power @ M
        kernels.append(_nullspace(power, tol))

    depth = len(kernels) - 1
    # weyr[k] = number of chains of length >= k
    weyr = [kernels[k].shape[1] - kernels[k - 1].shape[1] for k in range(1, depth + 1)]
    if any(weyr[k] > weyr[k - 1] for k in range(1, depth)):
        raise DefectiveDecompositionError(
            f"cluster at lambda = {lam}: inconsistent kernel growth {weyr} "
            f"at tolerance {tol:g}"
        )

    chains = []  # (length, top vector)
    for k in range(depth, 0, -1):
        n_needed = weyr[k - 1] - (weyr[k] if k < depth else 0)
        if n_needed == 0:
            continue
        # Occupied directions at height k: kernel of M^(k-1) plus the
        # height-k members of the longer chains already constructed.
        occupied = [kernels[k - 1]]
        for length, top in chains:
            occupied.append(np.linalg.matrix_power(M, length - k) @ top[:, None])
        occ = np.column_stack(occupied) if occupied else np.zeros((d2, 0))
        cand = kernels[k]
        if occ.shape[1]:
            q, _ = np.linalg.qr(occ)
            cand = cand - q @ (q.conj().T @ cand)
        u, s, _ = np.linalg.svd(cand, full_matrices=False)
        if int(np.sum(s > 0.5)) < n_needed:
            raise DefectiveDecompositionError(
                f"cluster at lambda = {lam}: could not isolate {n_needed} "
                f"chain top(s) at height {k}"
            )
        for i in range(n_needed):
            chains.append((k, u[:, i]))
    return chains


def decompose(L, cluster_tol: float | None = None) -> JordanBasis:
    """Jordan decomposition with bi-orthonormal left/right chains.

    Eigenvalues closer than ``cluster_tol`` (default 1e-7 * ||L||) are
    merged into one candidate eigenvalue before chains are built.  Blocks
    are ordered by (Re lam descending, Im lam ascending).
    """
    time = None
    if isinstance(L, Superoperator):
        time = L.time
        L = L.matrix
    L = np.asarray(L, dtype=complex)
    if L.ndim != 2 or L.shape[0] != L.shape[1]:
        raise DimensionMismatchError(f"superoperator must be square, got {L.shape}")
    if not np.all(np.isfinite(L)):
        raise ValueError("superoperator contains non-finite entries")

    scale = max(np.linalg.norm(L, 2), 1e-300)
    if cluster_tol is None:
        cluster_tol = 1e-7 * scale
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")

    Lh = L / scale
    tol_h = cluster_tol / scale
    w, vr = scipy.linalg.eig(Lh)

    entries = []  # (lam_scaled, (N, d2) right chain rows)
    for idx in _cluster_indices(w, tol_h):
        lam = w[idx].mean()
        if len(idx) == 1:
            entries.append((lam, vr[:, idx[0]][None, :]))
            continue
        M = Lh - lam * np.eye(Lh.shape[0])
        for length, top in _chains_for_cluster(M, lam, len(idx), tol_h):
            # Chain members obey D^(n-1) = (L - lam_true) D^n, so walk down
            # with the unscaled shift scale*M.
            chain = [top]
            for _ in range(length - 1):
                chain.append(scale * (M @ chain[-1]))
            chain.reverse()  # position 1 (eigenvector) first
            entries.append((lam, np.array(chain)))

    entries.sort(key=lambda e: (-e[0].real, e[0].imag))
    S = np.concatenate([chain for _, chain in entries], axis=0).T
    try:
        Sinv = np.linalg.inv(S)
    except np.linalg.LinAlgError as exc:
        raise DefectiveDecompositionError(
            f"chain matrix is singular at tolerance {cluster_tol:g}"
        ) from exc

    blocks, start = [], 0
    for lam, chain in entries:
        n = chain.shape[0]
        blocks.append(
            JordanBlockChain(
                eigenvalue=complex(lam) * scale,
                right_chain=chain,
                left_chain=Sinv[start : start + n],
            )
        )
        start += n
    basis = JordanBasis(blocks=blocks, time=time)
    residual = left_right_residual(basis, L)
    if residual > max(100 * cluster_tol, 1e-8 * scale):
        raise DefectiveDecompositionError(
            f"chain residual {residual:.3e} exceeds what clustering at "
            f"{cluster_tol:g} can support"
        )
    return basis


def left_right_residual(basis: JordanBasis, L) -> float:
    """Worst quasi-eigenvector defect over all blocks and chain positions."""
    if isinstance(L, Superoperator):
        L = L.matrix
    L = np.asarray(L, dtype=complex)
    worst = 0.0
    for b in basis.blocks:
        lam = b.eigenvalue
        n = b.block_dim
        for k in range(n):
            below = b.right_chain[k - 1] if k > 0 else 0.0
            worst = max(worst, np.linalg.norm(L @ b.right_chain[k] - lam * b.right_chain[k] - below))
            above = b.left_chain[k + 1] if k < n - 1 else 0.0
            worst = max(worst, np.linalg.norm(b.left_chain[k] @ L - lam * b.left_chain[k] - above))
    return float(worst)


def biorthonormality_residual(basis: JordanBasis) -> float:
    """max |<E_b^m | D_a^n> - delta_ab delta_mn| over all index pairs."""
    gram = basis.left_matrix() @ basis.right_matrix()
    return float(np.max(np.abs(gram - np.eye(basis.total_dim))))


def completeness_residual(basis: JordanBasis) -> float:
    """Deviation of sum_a,n |D_a^n><E_a^n| from the identity."""
    resolved = basis.right_matrix() @ basis.left_matrix()
    return float(np.max(np.abs(resolved - np.eye(basis.total_dim))))


def reconstruct(basis: JordanBasis) -> np.ndarray:
    """Rebuild the superoperator from its chains and Jordan structure."""
    d2 = basis.total_dim
    out = np.zeros((d2, d2), dtype=complex)
    for b in basis.blocks:
        for k in range(b.block_dim):
            out += b.eigenvalue * np.outer(b.right_chain[k], b.left_chain[k])
            if k > 0:
                out += np.outer(b.right_chain[k - 1], b.left_chain[k])
    return out


@dataclass
class SpectralTrajectory:
    """Smoothly tracked Jordan data over a normalized time grid s = t/tau.

    ``right[j]`` has the chain vectors of grid point j as columns (flat
    block order), ``left[j]`` has the left vectors as rows, and
    ``couplings[j] = left[j] @ d_s right[j]`` holds every derivative
    coupling <E_b^k | d_s D_a^n>.
    """

    grid: np.ndarray
    tau: float
    block_dims: tuple
    eigenvalues: np.ndarray  # (n_grid, n_blocks)
    right: np.ndarray  # (n_grid, d2, d2)
    left: np.ndarray  # (n_grid, d2, d2)
    couplings: np.ndarray  # (n_grid, d2, d2)
    superoperators: np.ndarray  # (n_grid, d2, d2)

    @property
    def n_blocks(self):
        return len(self.block_dims)

    @property
    def dim(self):
        return self.right.shape[1]

    def block_slice(self, alpha: int) -> slice:
        start = sum(self.block_dims[:alpha])
        return slice(start, start + self.block_dims[alpha])

    def flat_index(self, alpha: int, n: int = 1) -> int:
        """Flat position of chain member n (1-based) of block alpha."""
        if not 1 <= n <= self.block_dims[alpha]:
            raise IndexError(f"chain index {n} out of range for block {alpha}")
        return sum(self.block_dims[:alpha]) + n - 1

    def lambda_path(self, alpha: int) -> np.ndarray:
        return self.eigenvalues[:, alpha]

    def coupling_path(self, beta: int, k: int, alpha: int, n: int) -> np.ndarray:
        """<E_beta^k | d_s D_alpha^n> over the whole grid."""
        return self.couplings[:, self.flat_index(beta, k), self.flat_index(alpha, n)]

    def basis_at(self, j: int) -> JordanBasis:
        blocks = []
        for alpha, dim in enumerate(self.block_dims):
            sl = self.block_slice(alpha)
            blocks.append(
                JordanBlockChain(
                    eigenvalue=complex(self.eigenvalues[j, alpha]),
                    right_chain=self.right[j][:, sl].T.copy(),
                    left_chain=self.left[j][sl].copy(),
                )
            )
        return JordanBasis(blocks=blocks, time=float(self.grid[j]) * self.tau)

    def index_of(self, s: float) -> int:
        j = int(np.argmin(np.abs(self.grid - s)))
        if abs(self.grid[j] - s) > 1e-9 * max(1.0, abs(s)):
            raise ValueError(f"s = {s} is not a grid point of this trajectory")
        return j


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 3:
        raise ValueError("grid must contain at least three points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    if grid[0] < -1e-12 or grid[-1] > 1 + 1e-12:
        raise ValueError("grid must lie inside [0, 1]")
    return grid


def _match_blocks(prev_left, prev_dims, basis: JordanBasis, s):
    """Permutation of ``basis.blocks`` maximizing overlap with the previous
    grid point, matched only among blocks of equal dimension."""
    dims = basis.block_dims
    if sorted(dims) != sorted(prev_dims):
        raise TrackingError(f"block structure changed at s = {s}: {prev_dims} -> {dims}")
    n_blocks = len(dims)
    right = basis.right_matrix()
    slices = basis.block_slices()
    prev_starts = np.cumsum((0,) + tuple(prev_dims))[:-1]
    score = np.full((n_blocks, n_blocks), -np.inf)
    for b in range(n_blocks):
        rows = prev_left[prev_starts[b] : prev_starts[b] + prev_dims[b]]
        for a in range(n_blocks):
            if dims[a] != prev_dims[b]:
                continue
            score[b, a] = np.linalg.norm(rows @ right[:, slices[a]])
    row, col = linear_sum_assignment(-score)
    order = np.empty(n_blocks, dtype=int)
    for b, a in zip(row, col):
        others = [score[b, x] for x in range(n_blocks) if x != a and np.isfinite(score[b, x])]
        if not np.isfinite(score[b, a]) or (others and score[b, a] < 1.2 * max(others)):
            raise TrackingError(
                f"ambiguous block matching at s = {s}: overlaps {score[b]} for block {b}"
            )
        order[b] = a
    return [basis.blocks[a] for a in order]


def _gauge_align(prev_right, blocks, dims):
    """Rescale each chain so its top has real-positive overlap with the
    previous grid point; one scalar per chain keeps the chain relation."""
    start = 0
    for b, dim in zip(blocks, dims):
        top_prev = prev_right[:, start + dim - 1]
        c = np.vdot(top_prev, b.right_chain[-1])
        if abs(c) < 1e-12:
            raise TrackingError("vanishing eigenvector overlap while tracking")
        b.right_chain = b.right_chain * (c.conjugate() / abs(c))
        start += dim


def trajectory_from_arrays(grid, tau, block_dims, eigenvalues, right, left,
                           superops, crossing_tol=None) -> SpectralTrajectory:
    """Assemble a trajectory from pre-stacked chain matrices.

    ``right[j]`` must hold the (smoothly gauged) chain vectors as columns in
    flat block order and ``left[j]`` the left vectors as rows.  Derivative
    couplings are formed by central differences on the grid (second-order
    one-sided at the ends).
    """
    grid = np.asarray(grid, dtype=float)
    eigenvalues = np.asarray(eigenvalues, dtype=complex)
    if crossing_tol is not None:
        n_blocks = len(block_dims)
        for a in range(n_blocks):
            for b in range(a + 1, n_blocks):
                gaps = np.abs(eigenvalues[:, a] - eigenvalues[:, b])
                if np.any(gaps < crossing_tol):
                    j = int(np.argmin(gaps))
                    raise CrossingError(
                        f"eigenvalue paths {a} and {b} cross at s = {grid[j]}"
                    )
    right = np.asarray(right, dtype=complex)
    left = np.asarray(left, dtype=complex)
    d_right = np.gradient(right, grid, axis=0, edge_order=2)
    return SpectralTrajectory(
        grid=grid,
        tau=float(tau),
        block_dims=tuple(block_dims),
        eigenvalues=eigenvalues,
        right=right,
        left=left,
        couplings=left @ d_right,
        superoperators=np.asarray(superops, dtype=complex),
    )


def _stack_trajectory(grid, tau, bases, superops, cluster_tol=None):
    dims = bases[0].block_dims
    n_grid = len(bases)
    d2 = bases[0].total_dim
    right = np.empty((n_grid, d2, d2), dtype=complex)
    left = np.empty((n_grid, d2, d2), dtype=complex)
    eigvals = np.empty((n_grid, len(dims)), dtype=complex)
    for j, basis in enumerate(bases):
        if basis.block_dims != dims:
            raise TrackingError(
                f"block structure changed along the grid: {dims} -> {basis.block_dims}"
            )
        right[j] = basis.right_matrix()
        left[j] = basis.left_matrix()
        eigvals[j] = [b.eigenvalue for b in basis.blocks]
    return trajectory_from_arrays(grid, tau, dims, eigvals, right, left,
                                  superops, crossing_tol=cluster_tol)


def track_spectrum(model: LindbladModel, grid, cluster_tol: float | None = None,
                   basis=None) -> SpectralTrajectory:
    """Decompose L(s*tau) on every grid point and join the results smoothly.

    Blocks are matched between neighbouring points by left/right overlap,
    the chain gauge is fixed by real-positive continuity of the chain tops,
    and left chains are rebuilt from the exact inverse so bi-orthonormality
    is preserved.  Derivative couplings come from central differences on
    the grid (second-order one-sided at the ends).
    """
    grid = _check_grid(grid)
    tau = model.horizon
    superops = sample_superoperators(model, grid * tau, basis=basis)
    if cluster_tol is None:
        cluster_tol = 1e-7 * max(np.linalg.norm(superops[0], 2), 1.0)

    bases = []
    prev = None
    for j, s in enumerate(grid):
        current = decompose(Superoperator(superops[j], time=s * tau), cluster_tol)
        if prev is not None:
            blocks = _match_blocks(prev.left_matrix(), prev.block_dims, current, s)
            current = JordanBasis(blocks=blocks, time=current.time)
            _gauge_align(prev.right_matrix(), current.blocks, current.block_dims)
            gauged = current.right_matrix()
            left = np.linalg.inv(gauged)
            start = 0
            for b in current.blocks:
                b.left_chain = left[start : start + b.block_dim]
                start += b.block_dim
        bases.append(current)
        prev = current
    return _stack_trajectory(grid, tau, bases, superops, cluster_tol=cluster_tol)


def trajectory_from_bases(grid, tau, bases, superops) -> SpectralTrajectory:
    """Assemble a trajectory from externally supplied (already smoothly
    gauged) bases, e.g. closed-form model spectra."""
    grid = _check_grid(grid)
    return _stack_trajectory(grid, float(tau), list(bases), superops)

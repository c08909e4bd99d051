"""Operator-space bases and density-matrix vectorization.

A density operator on a D-dimensional Hilbert space is expanded in an
orthogonal matrix basis {sigma_n} with sigma_0 = identity, tr(sigma_n) = 0
for n >= 1, and tr(sigma_n sigma_m^dag) = D delta_nm.  Its coherence vector
has components

    rho_n = tr(rho sigma_n^dag),      n = 0 .. D^2 - 1,

so that rho = (1/D) sum_n rho_n sigma_n.  The Hilbert-Schmidt inner product
used for physical overlaps is <xi1, xi2> = (1/D) tr(xi1^dag xi2).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

__all__ = [
    "OperatorBasis",
    "CoherenceVector",
    "pauli_basis",
    "vectorize",
    "devectorize",
    "hs_inner",
]

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class OperatorBasis:
    """Orthogonal matrix basis of the operator space.

    Attributes
    ----------
    dim_s : int
        Hilbert-space dimension D.
    elements : np.ndarray
        Stack of shape (D^2, D, D); ``elements[0]`` is the identity.
    """

    dim_s: int
    elements: np.ndarray

    def __post_init__(self):
        d = self.dim_s
        if self.elements.shape != (d * d, d, d):
            raise DimensionMismatchError(
                f"basis stack must have shape ({d * d}, {d}, {d}), "
                f"got {self.elements.shape}"
            )

    @property
    def dim_hs(self):
        """Dimension D^2 of the Hilbert-Schmidt (coherence-vector) space."""
        return self.dim_s * self.dim_s

    def conj_transposed(self):
        """Stack of sigma_n^dag, shape (D^2, D, D)."""
        return self.elements.conj().transpose(0, 2, 1)


@dataclass(frozen=True)
class CoherenceVector:
    """Expansion coefficients tr(rho sigma_n^dag) of an operator."""

    components: np.ndarray
    basis_dim: int

    def __post_init__(self):
        n = self.basis_dim * self.basis_dim
        if self.components.shape != (n,):
            raise DimensionMismatchError(
                f"expected {n} components, got shape {self.components.shape}"
            )

    @property
    def trace_component(self):
        return self.components[0]


def pauli_basis(n_qubits: int) -> OperatorBasis:
    """Tensor-product Pauli basis {1, X, Y, Z}^(x n), lexicographic order.

    Satisfies tr(sigma_n sigma_m^dag) = 2^n delta_nm with traceless
    elements for n >= 1.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    mats = [_PAULI["I"], _PAULI["X"], _PAULI["Y"], _PAULI["Z"]]
    elements = mats
    for _ in range(n_qubits - 1):
        elements = [np.kron(a, b) for a in elements for b in mats]
    return OperatorBasis(dim_s=2**n_qubits, elements=np.array(elements))


def _as_matrix(x, basis: OperatorBasis):
    if isinstance(x, CoherenceVector):
        return devectorize(x, basis)
    return np.asarray(x, dtype=complex)


def vectorize(rho: np.ndarray, basis: OperatorBasis) -> CoherenceVector:
    """Coherence vector of ``rho``: components tr(rho sigma_n^dag)."""
    rho = np.asarray(rho, dtype=complex)
    d = basis.dim_s
    if rho.shape != (d, d):
        raise DimensionMismatchError(
            f"rho has shape {rho.shape}, basis expects ({d}, {d})"
        )
    comps = np.einsum("ab,nba->n", rho, basis.conj_transposed())
    return CoherenceVector(components=comps, basis_dim=d)


def devectorize(v, basis: OperatorBasis) -> np.ndarray:
    """Reconstruct the operator (1/D) sum_n v_n sigma_n."""
    comps = v.components if isinstance(v, CoherenceVector) else np.asarray(v, dtype=complex)
    if comps.shape != (basis.dim_hs,):
        raise DimensionMismatchError(
            f"expected {basis.dim_hs} components, got shape {comps.shape}"
        )
    return np.einsum("n,nab->ab", comps, basis.elements) / basis.dim_s


def hs_inner(xi1, xi2, basis: OperatorBasis | None = None) -> complex:
    """Hilbert-Schmidt inner product (1/D) tr(xi1^dag xi2).

    Accepts matrices or CoherenceVectors.  In component form the same
    product reads (1/D^2) sum_n conj(v1_n) v2_n, so both representations
    agree; mixing a matrix with a CoherenceVector requires ``basis``.
    """
    if isinstance(xi1, CoherenceVector) and isinstance(xi2, CoherenceVector):
        if xi1.basis_dim != xi2.basis_dim:
            raise DimensionMismatchError("coherence vectors live in different spaces")
        d = xi1.basis_dim
        return complex(np.vdot(xi1.components, xi2.components) / (d * d))
    if isinstance(xi1, CoherenceVector) or isinstance(xi2, CoherenceVector):
        if basis is None:
            raise DimensionMismatchError(
                "mixing matrix and CoherenceVector arguments requires a basis"
            )
        xi1 = _as_matrix(xi1, basis)
        xi2 = _as_matrix(xi2, basis)
    xi1 = np.asarray(xi1, dtype=complex)
    xi2 = np.asarray(xi2, dtype=complex)
    if xi1.shape != xi2.shape or xi1.ndim != 2:
        raise DimensionMismatchError(
            f"operands must be equal-shape square matrices, got {xi1.shape} vs {xi2.shape}"
        )
    return complex(np.trace(xi1.conj().T @ xi2) / xi1.shape[0])

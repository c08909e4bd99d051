"""Sufficient-condition coefficients for adiabatic open-system dynamics.

For an ordered block pair (alpha, beta) with gap
G_ab(s) = lam_alpha(s) - lam_beta(s) != 0 and gauged coupling

    F_ab(s) = exp(-int_{s0}^{s} <E_b | d_s D_b>) <E_b(s) | d_s D_a(s)>,

the two coefficients

    xi1(s) = | F_ab(s) e^(tau int_{s0}^s G_ab) / (tau G_ab(s)) |,
    xi2(s) = | (1/tau) d/ds[F_ab/G_ab](s) e^(tau int_{s0}^s G_ab) |

must stay well below 1 for the beta block to evolve decoupled from alpha.
The direct transition integral

    g(s) = | int_{s0}^s F_ab(s') e^(tau int_{s0}^{s'} G_ab) ds' |

is the quantity those coefficients bound (integration by parts plus the
triangle inequality); it is exposed as an independent oracle.  For blocks
of dimension > 1 the coupling is summed over the source chain,
optionally with per-member weights.

All quadrature is composite trapezoid on the trajectory grid and all
s-derivatives are central differences, so results converge at second
order under grid refinement.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import GapDegenerateError
from .spectral import SpectralTrajectory

__all__ = [
    "GridFunction",
    "GapFunction",
    "gap_function",
    "PairCoefficients",
    "AdiabaticityReport",
    "f_tilde",
    "f_tilde_multi",
    "xi_coefficients",
    "xi_max",
    "g_oracle",
    "g_oracle_curve",
    "condition_bound_curve",
]


@dataclass(frozen=True)
class GridFunction:
    """Values of a scalar function sampled on the trajectory grid."""

    grid: np.ndarray
    values: np.ndarray

    def __call__(self, s: float):
        j = int(np.argmin(np.abs(self.grid - s)))
        if abs(self.grid[j] - s) > 1e-9:
            raise ValueError(f"s = {s} is not a grid point")
        return self.values[j]

    def max(self):
        return float(np.max(self.values))


@dataclass(frozen=True)
class GapFunction:
    """Eigenvalue gap G_ab(s) = lam_alpha(s) - lam_beta(s) on the grid."""

    grid: np.ndarray
    values: np.ndarray
    alpha: int
    beta: int

    def __call__(self, s: float):
        j = int(np.argmin(np.abs(self.grid - s)))
        if abs(self.grid[j] - s) > 1e-9:
            raise ValueError(f"s = {s} is not a grid point")
        return complex(self.values[j])


def _cumint(y, x):
    return cumulative_trapezoid(y, x, initial=0.0)


def _gap(traj: SpectralTrajectory, alpha, beta, gap_tol=None):
    gap = traj.eigenvalues[:, alpha] - traj.eigenvalues[:, beta]
    if gap_tol is None:
        scale = max(1.0, float(np.max(np.abs(traj.eigenvalues))))
        gap_tol = 1e-10 * scale
    bad = np.abs(gap) < gap_tol
    if np.any(bad):
        where = traj.grid[bad][:5]
        raise GapDegenerateError(
            f"gap between blocks {alpha} and {beta} vanishes at s = {list(where)}"
        )
    return gap


def gap_function(traj: SpectralTrajectory, alpha: int, beta: int,
                 gap_tol=None) -> GapFunction:
    """Nonvanishing gap of an ordered block pair as a grid function."""
    return GapFunction(grid=traj.grid, values=_gap(traj, alpha, beta, gap_tol),
                       alpha=alpha, beta=beta)


def _slice_from(traj, s0):
    j0 = traj.index_of(s0)
    if j0 > len(traj.grid) - 3:
        raise ValueError("s0 leaves fewer than three grid points")
    return j0


def _coupling_sum(traj, k, alpha, beta, weights):
    """Sum over source-chain members of <E_beta^k | d_s D_alpha^n>."""
    n_alpha = traj.block_dims[alpha]
    if weights is None:
        w = np.ones((len(traj.grid), n_alpha))
    else:
        w = np.asarray(weights, dtype=complex)
        if w.ndim == 1:
            w = np.broadcast_to(w, (len(traj.grid), n_alpha))
        if w.shape != (len(traj.grid), n_alpha):
            raise ValueError(
                f"weights must have shape ({n_alpha},) or "
                f"({len(traj.grid)}, {n_alpha})"
            )
    total = np.zeros(len(traj.grid), dtype=complex)
    for n in range(1, n_alpha + 1):
        total += w[:, n - 1] * traj.coupling_path(beta, k, alpha, n)
    return total


def _f_tilde_curve(traj, alpha, beta, k=1, s0=0.0, weights=None):
    """Gauged coupling on the grid restricted to s >= s0.

    Returns (s array, F values) with the gauge integral started at s0.
    """
    j0 = _slice_from(traj, s0)
    s = traj.grid[j0:]
    gauge_rate = traj.coupling_path(beta, k, beta, k)[j0:]
    coupling = _coupling_sum(traj, k, alpha, beta, weights)[j0:]
    return s, np.exp(-_cumint(gauge_rate, s)) * coupling


def f_tilde(traj: SpectralTrajectory, alpha: int, beta: int, s: float,
            s0: float = 0.0) -> complex:
    """Gauged coupling of two one-dimensional blocks at grid point s."""
    if traj.block_dims[alpha] != 1 or traj.block_dims[beta] != 1:
        raise ValueError("f_tilde requires one-dimensional blocks; use f_tilde_multi")
    return f_tilde_multi(traj, 1, alpha, beta, s, s0)


def f_tilde_multi(traj: SpectralTrajectory, k: int, alpha: int, beta: int,
                  s: float, s0: float = 0.0, weights=None) -> complex:
    """Chain-summed gauged coupling into member k of block beta."""
    if not 1 <= k <= traj.block_dims[beta]:
        raise IndexError(f"chain index {k} out of range for block {beta}")
    grid_s, values = _f_tilde_curve(traj, alpha, beta, k=k, s0=s0, weights=weights)
    j = int(np.argmin(np.abs(grid_s - s)))
    if abs(grid_s[j] - s) > 1e-9:
        raise ValueError(f"s = {s} is not a grid point at or after s0 = {s0}")
    return complex(values[j])


def _pair_curves(traj, alpha, beta, tau, k=1, s0=0.0, weights=None, gap_tol=None):
    """All per-pair arrays on the restricted grid: s, F, gap, exp factor."""
    gap_full = _gap(traj, alpha, beta, gap_tol)
    j0 = _slice_from(traj, s0)
    s, f_vals = _f_tilde_curve(traj, alpha, beta, k=k, s0=s0, weights=weights)
    gap = gap_full[j0:]
    expo = np.exp(tau * _cumint(gap, s))
    return s, f_vals, gap, expo


def xi_coefficients(traj: SpectralTrajectory, alpha: int, beta: int,
                    tau: float | None = None, s0: float = 0.0, k: int = 1,
                    weights=None, gap_tol=None):
    """The two condition coefficients as functions on the grid.

    The exponential carries the full complex gap integral; only its
    magnitude survives the absolute value.  Defaults evaluate from s0 = 0,
    matching how the coefficients are reduced to a single number.
    """
    tau = traj.tau if tau is None else float(tau)
    s, f_vals, gap, expo = _pair_curves(
        traj, alpha, beta, tau, k=k, s0=s0, weights=weights, gap_tol=gap_tol
    )
    xi1 = np.abs(f_vals * expo / (tau * gap))
    ratio_deriv = np.gradient(f_vals / gap, s, edge_order=2)
    xi2 = np.abs(ratio_deriv * expo) / tau
    return GridFunction(s, xi1), GridFunction(s, xi2)


def g_oracle_curve(traj: SpectralTrajectory, alpha: int, beta: int,
                   tau: float | None = None, s0: float = 0.0, k: int = 1,
                   weights=None) -> GridFunction:
    """Direct transition integral |int F e^(tau int G)| as a grid function."""
    tau = traj.tau if tau is None else float(tau)
    s, f_vals, _, expo = _pair_curves(traj, alpha, beta, tau, k=k, s0=s0,
                                      weights=weights)
    return GridFunction(s, np.abs(_cumint(f_vals * expo, s)))


def g_oracle(traj: SpectralTrajectory, alpha: int, beta: int, s: float,
             tau: float | None = None, s0: float = 0.0, k: int = 1) -> float:
    """Direct transition integral up to grid point s (ground-truth measure)."""
    return float(g_oracle_curve(traj, alpha, beta, tau=tau, s0=s0, k=k)(s))


def condition_bound_curve(traj: SpectralTrajectory, alpha: int, beta: int,
                          tau: float | None = None, s0: float = 0.0,
                          k: int = 1):
    """Oracle integral and its boundary-plus-derivative bound, pointwise.

    Integration by parts splits the transition integral into a boundary
    term (the xi1 expression at s and at s0) plus the integral bounded by
    xi2; the triangle inequality then gives, for every grid point,

        g(s) <= xi1(s) + |F(s0)/(tau G(s0))| + (1/tau) int_{s0}^s |d/ds[F/G] e^(tau int G)|.

    Returns (g, bound) as GridFunctions for a pointwise comparison.
    """
    tau = traj.tau if tau is None else float(tau)
    s, f_vals, gap, expo = _pair_curves(traj, alpha, beta, tau, k=k, s0=s0)
    g_vals = np.abs(_cumint(f_vals * expo, s))
    xi1 = np.abs(f_vals * expo / (tau * gap))
    ratio_deriv = np.gradient(f_vals / gap, s, edge_order=2)
    tail = _cumint(np.abs(ratio_deriv * expo), s) / tau
    bound = xi1 + np.abs(f_vals[0] / (tau * gap[0])) + tail
    return GridFunction(s, g_vals), GridFunction(s, bound)


@dataclass(frozen=True)
class PairCoefficients:
    """Condition maxima for one ordered block pair and target chain index."""

    alpha: int
    beta: int
    k: int
    xi1_max: float
    xi2_max: float
    xi_max: float
    g_max: float
    relevant: bool | None = None


@dataclass
class AdiabaticityReport:
    """Coefficients for every admissible ordered block pair of a trajectory."""

    tau: float
    grid: np.ndarray
    pairs: list = field(default_factory=list)
    excluded: list = field(default_factory=list)  # (alpha, beta, reason)

    def pair(self, alpha, beta, k=1) -> PairCoefficients:
        for row in self.pairs:
            if (row.alpha, row.beta, row.k) == (alpha, beta, k):
                return row
        raise KeyError(f"pair ({alpha}, {beta}, k={k}) not in report")

    def worst(self) -> PairCoefficients:
        return max(self.pairs, key=lambda r: r.xi_max)

    def to_table(self):
        """Flat rows (alpha, beta, k, xi1_max, xi2_max, xi_max, g_max)."""
        return [
            (r.alpha, r.beta, r.k, r.xi1_max, r.xi2_max, r.xi_max, r.g_max)
            for r in self.pairs
        ]


def xi_max(traj: SpectralTrajectory, tau: float | None = None,
           s0_mode: str = "zero", s0_stride: int = 16,
           initial_support=None, gap_tol=None) -> AdiabaticityReport:
    """Condition coefficients for every ordered pair of distinct blocks.

    ``s0_mode='zero'`` evaluates from s0 = 0 only; ``'scan'`` additionally
    maximizes over coarse-subsampled starting points (stricter audit,
    O(grid^2 / stride) work).  Pairs whose gap vanishes on the grid are
    excluded and listed with the reason.  When ``initial_support`` (a set
    of block indices populated by the initial state) is given, each row is
    flagged relevant/irrelevant; nothing is dropped silently.
    """
    tau = traj.tau if tau is None else float(tau)
    if s0_mode not in ("zero", "scan"):
        raise ValueError("s0_mode must be 'zero' or 'scan'")
    support = None if initial_support is None else set(initial_support)

    report = AdiabaticityReport(tau=tau, grid=traj.grid)
    n_grid = len(traj.grid)
    for alpha in range(traj.n_blocks):
        for beta in range(traj.n_blocks):
            if alpha == beta:
                continue
            try:
                _gap(traj, alpha, beta, gap_tol)
            except GapDegenerateError as exc:
                report.excluded.append((alpha, beta, str(exc)))
                continue
            for k in range(1, traj.block_dims[beta] + 1):
                starts = [0.0]
                if s0_mode == "scan":
                    starts = list(traj.grid[: n_grid - 2 : s0_stride])
                xi1_m = xi2_m = g_m = 0.0
                for start in starts:
                    xi1, xi2 = xi_coefficients(traj, alpha, beta, tau=tau,
                                               s0=start, k=k, gap_tol=gap_tol)
                    g_curve = g_oracle_curve(traj, alpha, beta, tau=tau,
                                             s0=start, k=k)
                    xi1_m = max(xi1_m, xi1.max())
                    xi2_m = max(xi2_m, xi2.max())
                    g_m = max(g_m, g_curve.max())
                report.pairs.append(
                    PairCoefficients(
                        alpha=alpha, beta=beta, k=k,
                        xi1_max=xi1_m, xi2_max=xi2_m,
                        xi_max=max(xi1_m, xi2_m), g_max=g_m,
                        relevant=None if support is None else alpha in support,
                    )
                )
    return report

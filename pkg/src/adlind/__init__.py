"""Adiabatic dynamics of open quantum systems in superoperator form.

The package builds Lindblad superoperators over an orthogonal operator
basis, extracts their Jordan spectral data with bi-orthonormal left/right
chains, evaluates sufficient adiabaticity conditions, assembles adiabatic
evolution superoperators, and cross-checks everything against a full
master-equation integrator.
"""

from ._core import BACKEND as kernel_backend
from .basis import (
    CoherenceVector,
    OperatorBasis,
    devectorize,
    hs_inner,
    pauli_basis,
    vectorize,
)
from .conditions import (
    AdiabaticityReport,
    GapFunction,
    GridFunction,
    PairCoefficients,
    condition_bound_curve,
    f_tilde,
    f_tilde_multi,
    g_oracle,
    gap_function,
    g_oracle_curve,
    xi_coefficients,
    xi_max,
)
from .errors import *  # noqa: F401,F403  (exception names)
from .evolution import (
    AdiabaticPropagator,
    BlockCoefficients,
    MasterSolution,
    adiabatic_phase,
    block_coefficients,
    fidelity,
    frozen_representation,
    infidelity,
    infidelity_curve,
    propagator_1d,
    propagator_1d_inverse,
    propagator_multiblock,
    propagator_multiblock_inverse,
    solve_master,
    write_curve_csv,
)
from .lindblad import (
    LindbladModel,
    Superoperator,
    generator_action,
    sample_superoperators,
    superoperator_matrix,
)
from .models import (
    DeutschParams,
    LandauZenerParams,
    deutsch_adiabatic_state,
    deutsch_analytic_spectrum,
    deutsch_model,
    deutsch_target,
    deutsch_trajectory,
    gibbs_state,
    lz_adiabatic_state,
    lz_analytic_spectrum,
    lz_model,
    lz_target,
    lz_trajectory,
)
from .spectral import (
    JordanBasis,
    JordanBlockChain,
    SpectralTrajectory,
    biorthonormality_residual,
    completeness_residual,
    decompose,
    left_right_residual,
    reconstruct,
    track_spectrum,
    trajectory_from_bases,
)
from .thermo import (
    EquilibriumCheck,
    ThermoSample,
    entropy_rate,
    equilibrium_check,
    expand_state,
    h_vector,
    heat_rate,
    propagate_weights,
    rho_log_vector,
    thermal_qubit_model,
)

__version__ = "0.1.0"

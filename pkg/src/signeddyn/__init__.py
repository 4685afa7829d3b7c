"""Collective decision dynamics on signed networks.

Library plus CLI for signed-graph spectral thresholds, frustration-index
computation, continuous- and discrete-time bifurcation analysis, equilibrium
bounds, and bifurcation-diagram sweeps over reproducible random ensembles.
"""

from .dynamics_ct import (
    EquilibriumRecord,
    EquilibriumSet,
    Trajectory,
    check_norm_bound,
    classify_stability,
    find_equilibria,
    integrate,
    jacobian,
    lyapunov_value,
    vector_field,
)
from .dynamics_dt import DtOutcome, classify_first_bifurcation, simulate, step
from .frustration import (
    BoundReport,
    FrustrationResult,
    check_pi1_bounds,
    energy,
    frustration_exact,
    frustration_heuristic,
)
from .graph import (
    OperatorBundle,
    SignedGraph,
    build_graph,
    derive_operators,
    is_structurally_balanced,
    load_graph_csv,
    load_graph_json,
    random_signed_graph,
    regularize_degrees,
    save_graph_json,
    switch,
)
from .nonlinearity import NonlinearityProfile, make_profile, validate_profile
from .spectra import (
    SpectralSummary,
    eigh,
    solve_pi1d,
    spectrum_of_normalized_laplacian,
    thresholds,
    thresholds_from_eigs,
)
from .sweep import BranchRecord, SweepResult, estimate_onset, sweep_ct, sweep_dt

__version__ = "1.0.0"

__all__ = [
    "BoundReport",
    "BranchRecord",
    "DtOutcome",
    "EquilibriumRecord",
    "EquilibriumSet",
    "FrustrationResult",
    "NonlinearityProfile",
    "OperatorBundle",
    "SignedGraph",
    "SpectralSummary",
    "SweepResult",
    "Trajectory",
    "build_graph",
    "check_norm_bound",
    "check_pi1_bounds",
    "classify_first_bifurcation",
    "classify_stability",
    "derive_operators",
    "eigh",
    "energy",
    "estimate_onset",
    "find_equilibria",
    "frustration_exact",
    "frustration_heuristic",
    "integrate",
    "is_structurally_balanced",
    "jacobian",
    "load_graph_csv",
    "load_graph_json",
    "lyapunov_value",
    "make_profile",
    "random_signed_graph",
    "regularize_degrees",
    "save_graph_json",
    "simulate",
    "solve_pi1d",
    "spectrum_of_normalized_laplacian",
    "step",
    "sweep_ct",
    "sweep_dt",
    "switch",
    "thresholds",
    "thresholds_from_eigs",
    "validate_profile",
    "vector_field",
]

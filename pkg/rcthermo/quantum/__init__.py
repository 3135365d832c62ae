from .operators import HilbertSpace, OperatorMatrix, load_operator, save_operator
from .states import (
    GibbsState,
    check_truncation,
    gibbs,
    hamiltonian_of_mean_force,
    mean_force_state,
    partial_trace,
    trace_distance,
)
from .supersystem import (
    Supersystem,
    SupersystemSpec,
    TlsRcSpec,
    TripleDotSpec,
    adaptive_n_max,
    build_supersystem,
    jordan_wigner,
    sector_energies,
    transition_energies,
)

__all__ = [
    "GibbsState",
    "HilbertSpace",
    "OperatorMatrix",
    "Supersystem",
    "SupersystemSpec",
    "TlsRcSpec",
    "TripleDotSpec",
    "adaptive_n_max",
    "build_supersystem",
    "check_truncation",
    "gibbs",
    "hamiltonian_of_mean_force",
    "jordan_wigner",
    "load_operator",
    "mean_force_state",
    "partial_trace",
    "save_operator",
    "sector_energies",
    "trace_distance",
    "transition_energies",
]

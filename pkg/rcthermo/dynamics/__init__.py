from .redfield import (
    Liouvillian,
    ReservoirSpec,
    SteadyReport,
    build_redfield,
    entropy_production,
    steady_state,
)

__all__ = [
    "Liouvillian",
    "ReservoirSpec",
    "SteadyReport",
    "build_redfield",
    "entropy_production",
    "steady_state",
]

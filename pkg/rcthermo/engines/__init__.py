from .continuous import (
    CellResult,
    EngineMapGrid,
    EngineMetrics,
    GridComparison,
    Mode,
    carnot_cop,
    carnot_efficiency,
    compare_grids,
    engine_metrics,
    mode_boundaries,
    solve_rc,
    sweep_map,
)
from .otto import (
    CycleReport,
    Decoupling,
    OttoConfig,
    OttoCurve,
    RcCoupling,
    Treatment,
    otto_sweep,
    run_otto,
)

__all__ = [
    "CellResult",
    "CycleReport",
    "Decoupling",
    "EngineMapGrid",
    "EngineMetrics",
    "GridComparison",
    "Mode",
    "OttoConfig",
    "OttoCurve",
    "RcCoupling",
    "Treatment",
    "carnot_cop",
    "carnot_efficiency",
    "compare_grids",
    "engine_metrics",
    "mode_boundaries",
    "otto_sweep",
    "run_otto",
    "solve_rc",
    "sweep_map",
]

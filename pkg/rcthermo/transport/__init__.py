from .exactset import (
    LeadSpec,
    SetModel,
    TransportResult,
    currents,
    integration_window,
    level_shift,
    transmission,
)

__all__ = [
    "LeadSpec",
    "SetModel",
    "TransportResult",
    "currents",
    "integration_window",
    "level_shift",
    "transmission",
]

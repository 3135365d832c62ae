#!/usr/bin/env python3
from __future__ import annotations

from typing import Optional, Tuple


class RCThermoError(Exception):
    exit_code: int = 1

    def __init__(self, message: str, *, step: Optional[int] = None, cell: Optional[Tuple[int, int]] = None) -> None:
        super().__init__(message)
        self.step = step
        self.cell = cell

    def __str__(self) -> str:
        text = super().__str__()
        if self.step is not None:
            text = f"step {self.step}: {text}"
        if self.cell is not None:
            text = f"cell {self.cell}: {text}"
        return text


class ValidationError(RCThermoError):
    exit_code = 2


class NumericalError(RCThermoError):
    exit_code = 3


class UnknownFamily(ValidationError):
    pass


class UnknownLabel(ValidationError):
    pass


class DimensionCap(ValidationError):
    pass


class DegenerateDensity(ValidationError):
    pass


class NonConvergent(NumericalError):
    pass


class EndpointSingularity(NumericalError):
    pass


class Divergent(NumericalError):
    pass


class NeedsPrincipalValue(NumericalError):
    pass


class Breakdown(NumericalError):
    pass


class NonUniqueSteadyState(NumericalError):
    pass


class NotRelaxing(NumericalError):
    pass


class PositivityViolation(NumericalError):
    pass


class TruncationNotConverged(NumericalError):
    pass


class DegenerateBasisWarning(UserWarning):
    pass

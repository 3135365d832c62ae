#!/usr/bin/env python3
from __future__ import annotations

import math
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from ..errors import ValidationError
from ..mapping.specdens import SpectralDensity, Statistics


class BaseFamily:
    """One closed-form row: input density, RC coupling and energy, residual density."""

    name: str = "base"
    statistics: Statistics = Statistics.FERMIONIC_FULL_AXIS
    parameters: Tuple[str, ...] = ()
    signed: Tuple[str, ...] = ()
    rigid: bool = True
    decay: float = math.inf
    residual_decay: float = math.inf
    description: str = ""
    # CLI fallbacks for parameters left off the command line
    defaults: Mapping[str, float] = {}

    @property
    def recursable(self) -> bool:
        return self.rigid

    def validate(self, params: Mapping[str, float]) -> Dict[str, float]:
        missing = [key for key in self.parameters if key not in params]
        if missing:
            raise ValidationError(f"family '{self.name}' needs parameters {', '.join(missing)}")
        clean: Dict[str, float] = {}
        for key in self.parameters:
            try:
                value = float(params[key])
            except (TypeError, ValueError) as error:
                raise ValidationError(f"parameter {key} must be a number") from error
            if not math.isfinite(value):
                raise ValidationError(f"parameter {key} must be finite")
            if key not in self.signed and value <= 0:
                raise ValidationError(f"parameter {key} of '{self.name}' must be positive")
            clean[key] = value
        return clean

    def with_defaults(self, params: Mapping[str, Optional[float]]) -> Dict[str, float]:
        merged = {key: value for key, value in self.defaults.items() if key in self.parameters}
        merged.update({key: value for key, value in params.items() if key in self.parameters and value is not None})
        return self.validate(merged)

    # ------------------------------------------------------------------
    # Closed forms, overridden per row
    # ------------------------------------------------------------------

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def lambda_sq(self, params: Mapping[str, float]) -> float:  # pragma: no cover
        raise NotImplementedError

    def rc_energy(self, params: Mapping[str, float]) -> float:  # pragma: no cover
        raise NotImplementedError

    def support(self, p: Dict[str, float]) -> Tuple[float, float]:
        return (0.0, math.inf) if self.statistics.bosonic else (-math.inf, math.inf)

    def center(self, p: Dict[str, float]) -> float:
        return p.get("eps", 0.0)

    def scale(self, p: Dict[str, float]) -> float:
        return p.get("delta", 1.0)

    def flat_density(self, p: Dict[str, float]) -> Optional[float]:
        return None

    def flat_residual(self, p: Dict[str, float]) -> Optional[float]:
        return None

    # ------------------------------------------------------------------
    # Densities
    # ------------------------------------------------------------------

    def _peak(self, func, p: Dict[str, float]) -> float:
        lo, hi = self.support(p)
        c, s = self.center(p), self.scale(p)
        lo = lo if math.isfinite(lo) else c - 10 * s
        hi = hi if math.isfinite(hi) else max(c, 0.0) + 10 * s
        grid = np.linspace(lo, hi, 2001)[1:-1]
        with np.errstate(all="ignore"):
            values = np.nan_to_num(func(grid))
        peak = float(np.max(np.abs(values))) if values.size else 0.0
        return peak if peak > 0 else 1.0

    def density(self, params: Mapping[str, float]) -> SpectralDensity:
        p = self.validate(params)
        flat = self.flat_density(p)
        func = lambda x: self.profile(x, p)
        return SpectralDensity.analytic(
            self.name,
            p,
            func,
            self.statistics,
            self.support(p),
            rigid=self.rigid,
            center=self.center(p),
            scale=self.scale(p),
            decay=self.decay,
            peak=flat if flat is not None else self._peak(func, p),
            flat_value=flat,
            recursable=self.recursable,
        )

    def residual(self, params: Mapping[str, float]) -> SpectralDensity:
        p = self.validate(params)
        flat = self.flat_residual(p)

        def func(x, p=p):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.nan_to_num(self.residual_profile(x, p), nan=0.0, posinf=0.0)

        return SpectralDensity.analytic(
            f"{self.name}:residual",
            p,
            func,
            self.statistics,
            self.support(p),
            rigid=self.rigid,
            center=self.center(p),
            scale=self.scale(p),
            decay=self.residual_decay,
            peak=flat if flat is not None else self._peak(func, p),
            flat_value=flat,
            recursable=self.recursable,
        )


CatalogEntry = BaseFamily

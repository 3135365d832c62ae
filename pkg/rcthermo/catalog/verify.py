#!/usr/bin/env python3
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Mapping, Optional

import numpy as np

from ..errors import ValidationError
from ..mapping.rcmap import map_fermionic, map_phonon
from ..mapping.specdens import GridSpec, Statistics, default_window
from .base import BaseFamily

VERIFY_POINTS = 100
# Soft families are compared on center +- this many widths.
SOFT_SPAN = 10.0


@dataclass
class VerificationReport:
    family_id: str
    params: Dict[str, float]
    lambda_sq: float
    lambda_sq_expected: float
    rc_energy: float
    rc_energy_expected: float
    lambda_sq_error: float
    rc_energy_error: float
    residual_error: float
    tol: float

    @property
    def passed(self) -> bool:
        return max(self.lambda_sq_error, self.rc_energy_error, self.residual_error) <= self.tol

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["passed"] = self.passed
        return payload


def _relative(value: float, expected: float, scale: float) -> float:
    return abs(value - expected) / max(abs(expected), 1e-12 * scale)


def comparison_grid(entry: BaseFamily, p: Dict[str, float], points: int = VERIFY_POINTS) -> np.ndarray:
    """Half-cell-offset interior points; edge cells of rigid supports never coincide with a sample."""
    density = entry.density(p)
    lo, hi = default_window(density)
    if not entry.rigid:
        reach = SOFT_SPAN * density.scale
        lo = max(lo, density.center - reach)
        hi = min(hi, density.center + reach)
    return GridSpec(points).samples((lo, hi))


def verify_against_numeric(
    entry: BaseFamily,
    params: Mapping[str, float],
    tol: float = 1e-3,
    points: int = VERIFY_POINTS,
    quad_tol: Optional[float] = None,
) -> VerificationReport:
    """Map the sampled family numerically and compare with its closed forms."""
    if tol <= 0:
        raise ValidationError("verification tolerance must be positive")
    p = entry.validate(params)
    density = entry.density(p)
    grid = comparison_grid(entry, p, points)
    quad_tol = tol * 1e-3 if quad_tol is None else quad_tol
    if entry.statistics is Statistics.BOSONIC_ODD:
        result = map_phonon(density, grid=grid, tol=quad_tol)
    else:
        result = map_fermionic(density, grid=grid, tol=quad_tol)

    expected = entry.residual(p)
    exact = expected.raw(grid)
    numeric = result.residual.raw(grid)
    peak = float(np.max(np.abs(exact))) if exact.size else 0.0
    residual_error = float(np.max(np.abs(numeric - exact)) / peak) if peak > 0 else float(np.max(np.abs(numeric)))

    lam_sq_expected = entry.lambda_sq(p)
    energy_expected = entry.rc_energy(p)
    scale = max(density.scale, abs(density.center), 1.0)
    return VerificationReport(
        family_id=entry.name,
        params=p,
        lambda_sq=result.lambda_sq,
        lambda_sq_expected=lam_sq_expected,
        rc_energy=result.rc_energy,
        rc_energy_expected=energy_expected,
        lambda_sq_error=_relative(result.lambda_sq, lam_sq_expected, scale * scale),
        # eps may vanish for fermionic rows, so energies are compared against the family scale
        rc_energy_error=abs(result.rc_energy - energy_expected) / max(abs(energy_expected), density.scale),
        residual_error=residual_error,
        tol=tol,
    )


def random_parameters(entry: BaseFamily, rng: np.random.Generator) -> Dict[str, float]:
    """Positive parameters of order one; eps stays clear of zero so the relative checks stay meaningful."""
    params: Dict[str, float] = {}
    for key in entry.parameters:
        if key == "eps":
            params[key] = float(rng.uniform(1.0, 3.0))
        elif key == "gamma":
            params[key] = float(rng.uniform(0.5, 2.0))
        else:
            params[key] = float(rng.uniform(0.5, 1.5))
    return params


def verify_family(entry: BaseFamily, rng: np.random.Generator, sets: int = 3, tol: float = 1e-3):
    return [verify_against_numeric(entry, random_parameters(entry, rng), tol) for _ in range(sets)]


__all__ = ["VerificationReport", "comparison_grid", "random_parameters", "verify_against_numeric", "verify_family"]

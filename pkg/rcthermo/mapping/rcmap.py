#!/usr/bin/env python3
"""Single reaction-coordinate extraction steps and their recursion into chains."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..config import Config
from ..errors import DegenerateDensity, Divergent, NeedsPrincipalValue, RCThermoError, ValidationError
from ..ui import console
from .chain import ChainCoefficients
from .specdens import (
    GridSpec,
    SpectralDensity,
    Statistics,
    default_window,
    hilbert_pv,
    hilbert_transform,
    moment,
    sample,
)

FLAT_TOL = 1e-4


@dataclass(frozen=True, eq=False)
class RCMapResult:
    lambda_: float
    rc_energy: float
    residual: SpectralDensity
    mapping: str
    principal_value: bool = False

    @property
    def lambda_sq(self) -> float:
        return self.lambda_ ** 2

    @property
    def residual_flat_value(self) -> Optional[float]:
        """The constant value of a flat residual, None when it varies."""
        if self.residual.flat_value is not None:
            return self.residual.flat_value
        values = self.residual.values
        if values is None or values.size == 0:
            return None
        top = float(np.max(values))
        if top > 0 and float(np.ptp(values)) <= FLAT_TOL * top:
            return float(np.mean(values))
        return None

    def to_dict(self) -> Dict[str, object]:
        return {
            "mapping": self.mapping,
            "lambda": self.lambda_,
            "lambda_sq": self.lambda_sq,
            "rc_energy": self.rc_energy,
            "principal_value": self.principal_value,
            "residual_flat_value": self.residual_flat_value,
        }


def _positive(value: float, what: str) -> float:
    if not value > 0.0:
        raise DegenerateDensity(f"{what} is {value:.6g}; the density has no reaction coordinate")
    return value


def _residual_values(gamma: np.ndarray, transform: np.ndarray, lam_sq: float) -> np.ndarray:
    denom = transform ** 2 + gamma ** 2
    out = np.zeros_like(gamma)
    np.divide(4.0 * lam_sq * gamma, denom, out=out, where=denom > 0)
    return np.clip(out, 0.0, None)


def _residual(
    d: SpectralDensity,
    lam_sq: float,
    statistics: Statistics,
    grid: Optional[Sequence[float]],
    tol: Optional[float],
) -> SpectralDensity:
    if d.is_grid and grid is None:
        x = d.omega
        gamma = np.asarray(d.values, dtype=float)
        transform = hilbert_transform(d).values
        support = d.support
    else:
        window = default_window(d)
        x = np.asarray(grid, dtype=float) if grid is not None else GridSpec(Config.RESIDUAL_POINTS).samples(window)
        gamma = d.raw(x)
        transform = np.array([hilbert_pv(d, w, tol) for w in x])
        support = (min(window[0], float(x[0])), max(window[1], float(x[-1])))
    values = _residual_values(gamma, transform, lam_sq)
    return SpectralDensity.grid(
        x,
        values,
        statistics,
        support=support,
        edge_zero=d.rigid,
        family_id=None if d.family_id is None else f"{d.family_id}:residual",
        params=d.params,
    )


def map_phonon(
    d: SpectralDensity, grid: Optional[Sequence[float]] = None, tol: Optional[float] = None
) -> RCMapResult:
    if d.statistics is not Statistics.BOSONIC_ODD:
        raise ValidationError("phonon mappings need a bosonic density with odd continuation")
    m1 = _positive(moment(d, 1, tol=tol), "the first moment")
    m3 = _positive(moment(d, 3, tol=tol), "the third moment")
    omega = math.sqrt(m3 / m1)
    lam_sq = m1 / (2.0 * math.pi * omega)
    residual = _residual(d, lam_sq, Statistics.BOSONIC_ODD, grid, tol)
    return RCMapResult(math.sqrt(lam_sq), omega, residual, "phonon")


def _half_axis(d: SpectralDensity) -> SpectralDensity:
    lo, hi = d.support
    if hi <= 0.0:
        raise DegenerateDensity("the density vanishes on omega > 0")
    if d.is_grid:
        keep = d.omega > 0.0
        if np.count_nonzero(keep) < 2:
            raise DegenerateDensity("fewer than two positive-frequency samples")
        return SpectralDensity.grid(
            d.omega[keep],
            d.values[keep],
            Statistics.BOSONIC_HALF_AXIS,
            support=(max(lo, 0.0), hi),
            edge_zero=d.edge_zero,
            family_id=d.family_id,
            params=d.params,
        )
    return replace(d, statistics=Statistics.BOSONIC_HALF_AXIS, support=(max(lo, 0.0), hi))


def _particle_like(
    d: SpectralDensity,
    statistics: Statistics,
    name: str,
    grid: Optional[Sequence[float]],
    tol: Optional[float],
) -> RCMapResult:
    m0 = _positive(moment(d, 0, tol=tol), "the zeroth moment")
    principal = False
    try:
        m1 = moment(d, 1, tol=tol)
    except NeedsPrincipalValue:
        m1 = moment(d, 1, principal_value=True, tol=tol)
        principal = True
    lam_sq = m0 / (2.0 * math.pi)
    energy = m1 / (2.0 * math.pi * lam_sq)
    residual = _residual(d, lam_sq, statistics, grid, tol)
    return RCMapResult(math.sqrt(lam_sq), energy, residual, name, principal)


def map_particle(
    d: SpectralDensity, grid: Optional[Sequence[float]] = None, tol: Optional[float] = None
) -> RCMapResult:
    view = _half_axis(d)
    if grid is not None:
        grid = [w for w in grid if w > 0.0]
    return _particle_like(view, Statistics.BOSONIC_HALF_AXIS, "particle", grid, tol)


def map_fermionic(
    d: SpectralDensity, grid: Optional[Sequence[float]] = None, tol: Optional[float] = None
) -> RCMapResult:
    if d.statistics is not Statistics.FERMIONIC_FULL_AXIS:
        raise ValidationError("fermionic mappings need a full-axis fermionic density")
    return _particle_like(d, Statistics.FERMIONIC_FULL_AXIS, "fermionic", grid, tol)


MAPPINGS: Dict[str, Callable[..., RCMapResult]] = {
    "phonon": map_phonon,
    "particle": map_particle,
    "fermionic": map_fermionic,
}


def default_mapping(d: SpectralDensity) -> str:
    if d.statistics is Statistics.FERMIONIC_FULL_AXIS:
        return "fermionic"
    if d.statistics is Statistics.BOSONIC_HALF_AXIS:
        return "particle"
    return "phonon"


def fixed_point_shape(d: SpectralDensity) -> np.ndarray:
    """Rubin (phonon) or semicircle (fermionic/particle) shape on the density's own grid."""
    lo, hi = d.support
    x = d.omega
    if d.statistics is Statistics.BOSONIC_ODD:
        u = x / hi
        return x / math.sqrt(2.0) * np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    half = 0.5 * (hi - lo)
    u = (x - 0.5 * (hi + lo)) / half
    return half * np.sqrt(np.clip(1.0 - u * u, 0.0, None))


def fixed_point_deviation(d: SpectralDensity, margin: float = 0.0) -> float:
    """Normalized L-infinity distance to the fixed-point shape, skipping edge cells."""
    if not d.is_grid:
        raise ValidationError("fixed-point comparisons need a sampled residual")
    target = fixed_point_shape(d)
    lo, hi = d.support
    keep = np.ones(d.omega.size, dtype=bool)
    keep[0] = keep[-1] = False
    if margin > 0.0:
        span = hi - lo
        keep &= (d.omega > lo + margin * span) & (d.omega < hi - margin * span)
    scale = float(np.max(np.abs(target)))
    return float(np.max(np.abs(d.values[keep] - target[keep])) / scale)


def recurse(
    d: SpectralDensity,
    steps: int,
    grid_spec: Optional[GridSpec] = None,
    mapping: Optional[str] = None,
    tol: Optional[float] = None,
) -> ChainCoefficients:
    if steps < 1:
        raise ValidationError("recursion needs at least one step")
    mapping = mapping or default_mapping(d)
    if mapping not in MAPPINGS:
        raise ValidationError(f"unknown mapping '{mapping}'")
    if steps > 1 and not d.recursable:
        raise Divergent(
            f"the residual of '{d.family_id}' decays too slowly for another mapping",
            step=1,
        )

    if d.is_grid and grid_spec is None:
        current = d
    else:
        current = sample(d, grid_spec or GridSpec(Config.GRID_POINTS))
    if mapping == "particle":
        current = _half_axis(current)

    sites: List[float] = []
    hops: List[float] = []
    residuals: List[SpectralDensity] = []
    for step in range(steps):
        try:
            result = MAPPINGS[mapping](current, tol=tol)
        except RCThermoError as error:
            error.step = step
            raise
        sites.append(result.rc_energy)
        hops.append(result.lambda_)
        residuals.append(result.residual)
        console.log(
            f"step {step}: lambda={result.lambda_:.6g} energy={result.rc_energy:.6g}",
        )
        current = result.residual

    chain = ChainCoefficients(
        site_energies=np.array(sites),
        hop_couplings=np.array(hops),
        terminal_residual=current,
        residuals=residuals,
        statistics=current.statistics,
    )
    chain.fixed_point_deviation = fixed_point_deviation(current)
    return chain

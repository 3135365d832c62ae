#!/usr/bin/env python3
"""Spectral (coupling) densities and the integral transforms built on them.

Energies are in units of a declared reference scale with hbar = k_B = 1.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from ..config import Config
from ..errors import (
    Divergent,
    EndpointSingularity,
    NeedsPrincipalValue,
    NonConvergent,
    ValidationError,
)

Profile = Callable[[np.ndarray], np.ndarray]

QUAD_LIMIT = 400
TRANSFORM_CHUNK = 512


class Statistics(str, Enum):
    BOSONIC_ODD = "bosonic_odd"
    BOSONIC_HALF_AXIS = "bosonic_half_axis"
    FERMIONIC_FULL_AXIS = "fermionic_full_axis"

    @property
    def bosonic(self) -> bool:
        return self is not Statistics.FERMIONIC_FULL_AXIS


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    statistics: Statistics
    support: Tuple[float, float]
    rigid: bool = True
    family_id: Optional[str] = None
    params: Mapping[str, float] = field(default_factory=dict)
    profile: Optional[Profile] = None
    omega: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    center: float = 0.0
    scale: float = 1.0
    decay: float = math.inf
    peak: float = 1.0
    flat_value: Optional[float] = None
    recursable: bool = True
    edge_zero: bool = False

    def __post_init__(self) -> None:
        lo, hi = (float(self.support[0]), float(self.support[1]))
        if not lo < hi:
            raise ValidationError(f"empty support [{lo}, {hi}]")
        if self.statistics.bosonic and lo < 0:
            raise ValidationError("bosonic densities are stored for omega >= 0 only")
        object.__setattr__(self, "support", (lo, hi))

        if self.profile is None:
            if self.omega is None or self.values is None:
                raise ValidationError("a density needs either an analytic profile or grid samples")
            omega = np.asarray(self.omega, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if omega.ndim != 1 or omega.shape != values.shape or omega.size < 2:
                raise ValidationError("grid samples must be two equal-length 1-D arrays of size >= 2")
            if np.any(np.diff(omega) <= 0):
                raise ValidationError("grid omega-samples must be strictly increasing")
            if np.any(~np.isfinite(values)) or np.any(values < 0):
                raise ValidationError("grid values must be finite and nonnegative")
            if omega[0] < lo or omega[-1] > hi:
                raise ValidationError("grid samples fall outside the declared support")
            omega.setflags(write=False)
            values.setflags(write=False)
            object.__setattr__(self, "omega", omega)
            object.__setattr__(self, "values", values)

    # ------------------------------------------------------------------
    # Constructors
    # ------------------------------------------------------------------

    @classmethod
    def analytic(
        cls,
        family_id: str,
        params: Mapping[str, float],
        profile: Profile,
        statistics: Statistics,
        support: Tuple[float, float],
        *,
        rigid: bool,
        center: float = 0.0,
        scale: float = 1.0,
        decay: float = math.inf,
        peak: float = 1.0,
        flat_value: Optional[float] = None,
        recursable: bool = True,
    ) -> "SpectralDensity":
        return cls(
            statistics=statistics,
            support=support,
            rigid=rigid,
            family_id=family_id,
            params=dict(params),
            profile=profile,
            center=center,
            scale=scale,
            decay=decay,
            peak=peak,
            flat_value=flat_value,
            recursable=recursable,
        )

    @classmethod
    def grid(
        cls,
        omega: Sequence[float],
        values: Sequence[float],
        statistics: Statistics,
        support: Optional[Tuple[float, float]] = None,
        *,
        edge_zero: bool = False,
        family_id: Optional[str] = None,
        params: Optional[Mapping[str, float]] = None,
    ) -> "SpectralDensity":
        omega = np.asarray(omega, dtype=float)
        values = np.asarray(values, dtype=float)
        if support is None:
            if omega.size < 2:
                raise ValidationError("grid densities need at least two samples")
            lo = omega[0] - 0.5 * (omega[1] - omega[0])
            hi = omega[-1] + 0.5 * (omega[-1] - omega[-2])
            if statistics.bosonic:
                lo = max(lo, 0.0)
            support = (lo, hi)
        positive = values[values > 0]
        peak = float(positive.max()) if positive.size else 1.0
        span = float(support[1] - support[0])
        return cls(
            statistics=statistics,
            support=support,
            rigid=True,
            family_id=family_id,
            params=dict(params or {}),
            omega=omega,
            values=values,
            center=float(0.5 * (support[0] + support[1])),
            scale=span,
            peak=peak,
            edge_zero=edge_zero,
        )

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    @property
    def is_grid(self) -> bool:
        return self.profile is None

    @property
    def kind(self) -> str:
        return "grid" if self.is_grid else "analytic"

    @cached_property
    def _interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.omega, self.values, extrapolate=False)

    @cached_property
    def cell_edges(self) -> np.ndarray:
        x = self.omega
        inner = 0.5 * (x[1:] + x[:-1])
        return np.concatenate(([self.support[0]], inner, [self.support[1]]))

    @cached_property
    def cell_widths(self) -> np.ndarray:
        return np.diff(self.cell_edges)

    def raw(self, omega) -> np.ndarray:
        """Stored function on its own domain, zero outside the support."""
        x = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.zeros_like(x)
        lo, hi = self.support
        inside = (x >= lo) & (x <= hi)
        if not np.any(inside):
            return out
        if not self.is_grid:
            out[inside] = self.profile(x[inside])
            return out

        xs = x[inside]
        first, last = self.omega[0], self.omega[-1]
        vals = np.zeros_like(xs)
        core = (xs >= first) & (xs <= last)
        vals[core] = self._interpolant(xs[core])
        below = xs < first
        above = xs > last
        if self.edge_zero:
            if np.any(below) and first > lo:
                vals[below] = self.values[0] * (xs[below] - lo) / (first - lo)
            if np.any(above) and hi > last:
                vals[above] = self.values[-1] * (hi - xs[above]) / (hi - last)
        else:
            vals[below] = self.values[0]
            vals[above] = self.values[-1]
        out[inside] = np.maximum(vals, 0.0)
        return out

    def __call__(self, omega):
        return evaluate(self, omega)

    def scaled(self, factor: float) -> "SpectralDensity":
        if factor < 0:
            raise ValidationError("densities can only be rescaled by nonnegative factors")
        if self.is_grid:
            return replace(self, values=self.values * factor, peak=self.peak * factor)
        base = self.profile
        return replace(
            self,
            profile=lambda x: factor * base(x),
            peak=self.peak * factor,
            flat_value=None if self.flat_value is None else self.flat_value * factor,
            family_id=None if self.family_id is None else f"{self.family_id}*{factor:g}",
        )


@dataclass(frozen=True)
class HilbertTransformResult:
    omega: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class GridSpec:
    points: int = Config.GRID_POINTS
    lo: Optional[float] = None
    hi: Optional[float] = None

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValidationError("a sampling grid needs at least two points")

    def samples(self, window: Tuple[float, float]) -> np.ndarray:
        lo = window[0] if self.lo is None else self.lo
        hi = window[1] if self.hi is None else self.hi
        if not lo < hi:
            raise ValidationError(f"empty sampling window [{lo}, {hi}]")
        step = (hi - lo) / self.points
        return lo + (np.arange(self.points) + 0.5) * step

    def window(self, default: Tuple[float, float]) -> Tuple[float, float]:
        return (default[0] if self.lo is None else self.lo, default[1] if self.hi is None else self.hi)


def evaluate(d: SpectralDensity, omega):
    """Gamma(omega) honoring the density statistics; scalar in, scalar out."""
    scalar = np.ndim(omega) == 0
    x = np.atleast_1d(np.asarray(omega, dtype=float))
    if d.statistics is Statistics.BOSONIC_ODD:
        out = np.sign(x) * d.raw(np.abs(x))
    elif d.statistics is Statistics.BOSONIC_HALF_AXIS:
        out = np.where(x > 0, d.raw(x), 0.0)
    else:
        out = d.raw(x)
    return float(out[0]) if scalar else out


def default_window(d: SpectralDensity) -> Tuple[float, float]:
    lo, hi = d.support
    reach = Config.SOFT_WINDOW * d.scale
    if d.statistics.bosonic:
        lo = max(lo, 0.0)
        if not math.isfinite(hi):
            hi = max(d.center, 0.0) + reach
        return lo, hi
    if not math.isfinite(lo):
        lo = d.center - reach
    if not math.isfinite(hi):
        hi = d.center + reach
    return lo, hi


def sample(d: SpectralDensity, grid_spec: Optional[GridSpec] = None) -> SpectralDensity:
    grid_spec = grid_spec or GridSpec()
    window = grid_spec.window(default_window(d))
    if d.statistics.bosonic:
        window = (max(window[0], 0.0), window[1])
    x = grid_spec.samples(window)
    values = evaluate(d, x) if d.statistics is Statistics.FERMIONIC_FULL_AXIS else d.raw(x)
    return SpectralDensity.grid(
        x,
        values,
        d.statistics,
        support=window,
        edge_zero=d.edge_zero,
        family_id=d.family_id,
        params=d.params,
    )


# ----------------------------------------------------------------------
# Quadrature primitives
# ----------------------------------------------------------------------


def _scalar(func: Profile) -> Callable[[float], float]:
    return lambda x: float(func(np.array([x]))[0])


def _quad(func: Callable[[float], float], a: float, b: float, tol: float, floor: float, points: Iterable[float] = ()) -> float:
    if a == b:
        return 0.0
    kwargs = {"epsabs": tol * floor, "epsrel": tol, "limit": QUAD_LIMIT, "full_output": 1}
    if math.isfinite(a) and math.isfinite(b):
        inner = sorted({float(p) for p in points if a < p < b})
        if inner:
            kwargs["points"] = inner
    result = integrate.quad(func, a, b, **kwargs)
    value, error = result[0], result[1]
    if len(result) > 3 and error > 10.0 * max(tol * abs(value), tol * floor):
        raise NonConvergent(f"adaptive quadrature on [{a:g}, {b:g}] stopped at error {error:.3e}")
    return float(value)


def _window(lo: float, hi: float, anchors: Sequence[float], reach: float) -> Tuple[float, float]:
    a = lo if math.isfinite(lo) else min(anchors) - reach
    b = hi if math.isfinite(hi) else max(anchors) + reach
    return max(a, lo), min(b, hi)


def cauchy_pv(
    func: Profile,
    lo: float,
    hi: float,
    omega: float,
    *,
    tol: float,
    floor: float,
    scale: float,
    centers: Sequence[float] = (),
    points: Sequence[float] = (),
    rigid: bool = True,
) -> float:
    """(1/pi) PV integral of func(x)/(x - omega) over [lo, hi] by singularity subtraction."""
    omega = float(omega)
    if not math.isfinite(omega):
        raise ValidationError("principal values need a finite frequency")
    floor = max(floor, 1e-300)
    if rigid:
        for edge in (lo, hi):
            if math.isfinite(edge) and abs(omega - edge) <= 1e-12 * max(1.0, abs(edge)):
                raise EndpointSingularity(f"omega={omega:g} coincides with a rigid cutoff at {edge:g}")
    f = _scalar(func)
    reach = Config.SOFT_WINDOW * scale
    breaks = list(points) + list(centers)

    if omega < lo or omega > hi:
        a, b = _window(lo, hi, list(centers) + [omega], reach)
        kernel = lambda x: f(x) / (x - omega)
        total = _quad(kernel, a, b, tol, floor, breaks)
        if lo < a:
            total += _quad(kernel, lo, a, tol, floor)
        if b < hi:
            total += _quad(kernel, b, hi, tol, floor)
        return total / math.pi

    a, b = _window(lo, hi, list(centers) + [omega], reach)
    g0 = f(omega)
    if g0 != 0.0 and not a < omega < b:
        raise EndpointSingularity(f"omega={omega:g} sits on a support edge where the density is {g0:g}")

    def subtracted(x: float) -> float:
        dx = x - omega
        if dx == 0.0:
            return 0.0
        return (f(x) - g0) / dx

    total = _quad(subtracted, a, b, tol, floor, breaks + [omega])
    if g0 != 0.0:
        total += g0 * math.log((b - omega) / (omega - a))
    kernel = lambda x: f(x) / (x - omega)
    if lo < a:
        total += _quad(kernel, lo, a, tol, floor)
    if b < hi:
        total += _quad(kernel, b, hi, tol, floor)
    return total / math.pi


def _full_axis(d: SpectralDensity) -> Tuple[Profile, float, float, list, list]:
    lo, hi = d.support
    if d.statistics is Statistics.BOSONIC_ODD:
        func = lambda x: evaluate(d, x)
        return func, -hi, hi, [0.0], [-d.center, d.center]
    if d.statistics is Statistics.BOSONIC_HALF_AXIS:
        return d.raw, max(lo, 0.0), hi, [], [d.center]
    return d.raw, lo, hi, [], [d.center]


def hilbert_pv(d: SpectralDensity, omega: float, tol: Optional[float] = None) -> float:
    """(1/pi) PV integral of Gamma(w)/(w - omega), odd-extended for bosonic densities."""
    tol = Config.get_tol() if tol is None else tol
    if d.flat_value is not None and not math.isfinite(d.support[0]) and not math.isfinite(d.support[1]):
        # symmetric principal value of a constant over the whole axis
        return 0.0
    func, lo, hi, points, centers = _full_axis(d)
    if d.is_grid:
        points = points + [d.omega[0], d.omega[-1]]
    return cauchy_pv(
        func,
        lo,
        hi,
        omega,
        tol=tol,
        floor=d.peak,
        scale=d.scale,
        centers=centers,
        points=points,
        rigid=d.rigid,
    )


def _discrete_transform(d: SpectralDensity) -> np.ndarray:
    x = d.omega
    g = d.values
    w = d.cell_widths
    lo, hi = d.support
    if d.statistics is Statistics.BOSONIC_HALF_AXIS:
        lo = max(lo, 0.0)
    slope = d._interpolant.derivative()(x)
    slope = np.nan_to_num(slope)
    out = np.empty_like(x)
    for start in range(0, x.size, TRANSFORM_CHUNK):
        stop = min(start + TRANSFORM_CHUNK, x.size)
        rows = np.arange(start, stop)
        xi = x[rows, None]
        gi = g[rows, None]
        dx = x[None, :] - xi
        with np.errstate(divide="ignore", invalid="ignore"):
            quotient = (g[None, :] - gi) / dx
        quotient[rows - start, rows] = slope[rows]
        core = quotient @ w
        with np.errstate(divide="ignore"):
            log_term = g[rows] * np.log((hi - x[rows]) / (x[rows] - lo))
        total = core + np.where(g[rows] != 0.0, log_term, 0.0)
        if d.statistics is Statistics.BOSONIC_ODD:
            total += ((g * w)[None, :] / (x[None, :] + xi)).sum(axis=1)
        out[rows] = total / math.pi
    return out


def hilbert_transform(
    d: SpectralDensity,
    omegas: Optional[Sequence[float]] = None,
    tol: Optional[float] = None,
) -> HilbertTransformResult:
    if omegas is None:
        if not d.is_grid:
            raise ValidationError("analytic densities need explicit evaluation frequencies")
        return HilbertTransformResult(omega=d.omega.copy(), values=_discrete_transform(d))
    grid = np.asarray(omegas, dtype=float)
    values = np.array([hilbert_pv(d, w, tol) for w in grid])
    return HilbertTransformResult(omega=grid, values=values)


def _moment_domain(d: SpectralDensity) -> Tuple[float, float]:
    lo, hi = d.support
    if d.statistics.bosonic:
        lo = max(lo, 0.0)
    return lo, hi


def moment(d: SpectralDensity, n: int, principal_value: bool = False, tol: Optional[float] = None) -> float:
    """Integral of omega**n * Gamma(omega) over the statistics-appropriate domain."""
    if n < 0:
        raise ValidationError("moments are defined for n >= 0")
    tol = Config.get_tol() if tol is None else tol
    lo, hi = _moment_domain(d)

    if d.is_grid:
        mask = (d.omega >= lo) & (d.omega <= hi)
        return float(np.sum(d.cell_widths[mask] * d.omega[mask] ** n * d.values[mask]))

    floor = d.peak * d.scale * max(abs(d.center), d.scale) ** n
    integrand = lambda x: float(x ** n * d.raw(np.array([x]))[0])
    reach = Config.SOFT_WINDOW * d.scale
    both_infinite = not math.isfinite(lo) and not math.isfinite(hi)

    if math.isfinite(lo) and math.isfinite(hi):
        return _quad(integrand, lo, hi, tol, floor, [d.center])

    excess = d.decay - n
    if excess > 1:
        a, b = _window(lo, hi, [d.center], reach)
        total = _quad(integrand, a, b, tol, floor, [d.center])
        if lo < a:
            total += _quad(integrand, lo, a, tol, floor)
        if b < hi:
            total += _quad(integrand, b, hi, tol, floor)
        return total

    if excess == 1 and both_infinite:
        if not principal_value:
            raise NeedsPrincipalValue(
                f"moment n={n} of '{d.family_id}' converges only as a symmetric principal value"
            )
        c = d.center

        def paired(u: float) -> float:
            return integrand(c + u) + integrand(c - u)

        return _quad(paired, 0.0, reach, tol, floor, [d.scale]) + _quad(paired, reach, math.inf, tol, floor)

    raise Divergent(f"moment n={n} of '{d.family_id}' diverges (tail decays as omega^-{d.decay:g})")


# ----------------------------------------------------------------------
# Density files
# ----------------------------------------------------------------------


def read_density_csv(path: Path, statistics: Statistics = Statistics.BOSONIC_ODD) -> SpectralDensity:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as handle:
            lines = [line for line in handle if line.strip() and not line.startswith("#")]
    except OSError as error:
        raise ValidationError(f"cannot read density file {path}: {error}") from error

    reader = csv.DictReader(lines)
    if reader.fieldnames is None or [name.strip() for name in reader.fieldnames] != ["omega", "gamma"]:
        raise ValidationError(f"{path.name}: expected header 'omega,gamma'")
    omega, gamma = [], []
    for row in reader:
        try:
            omega.append(float(row["omega"]))
            gamma.append(float(row["gamma"]))
        except (TypeError, ValueError) as error:
            raise ValidationError(f"{path.name}: malformed row {row}") from error
    return SpectralDensity.grid(omega, gamma, statistics)


def density_table(d: SpectralDensity, omegas: Optional[Sequence[float]] = None) -> Tuple[np.ndarray, np.ndarray]:
    if omegas is None:
        if d.is_grid:
            return d.omega.copy(), d.values.copy()
        omegas = GridSpec(Config.RESIDUAL_POINTS).samples(default_window(d))
    x = np.asarray(omegas, dtype=float)
    return x, evaluate(d, x)


def write_density_csv(
    path: Path,
    d: SpectralDensity,
    omegas: Optional[Sequence[float]] = None,
    header: Optional[str] = None,
    digits: int = Config.CSV_DIGITS,
) -> Path:
    path = Path(path)
    x, gamma = density_table(d, omegas)
    with path.open("w", encoding="utf-8", newline="") as handle:
        if header:
            handle.write(f"{header}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["omega", "gamma"])
        for w, g in zip(x, gamma):
            writer.writerow([f"{w:.{digits}g}", f"{g:.{digits}g}"])
    return path

#!/usr/bin/env python3
"""Continuous thermoelectric operation of the single-level transistor and (V, Gamma) maps."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..catalog import create_family
from ..config import Config
from ..dynamics import ReservoirSpec, build_redfield, entropy_production, steady_state
from ..errors import RCThermoError, ValidationError
from ..quantum import TripleDotSpec, build_supersystem
from ..transport import SetModel, TransportResult, currents
from ..ui import console

SOLVERS = ("exact", "rc")


class Mode(str, Enum):
    ENGINE = "engine"
    FRIDGE = "fridge"
    DUD = "dud"


@dataclass(frozen=True)
class EngineMetrics:
    efficiency: Optional[float]
    cop: Optional[float]
    entropy_production: float
    mode: Mode

    def to_dict(self) -> Dict[str, object]:
        return {
            "eta": self.efficiency,
            "cop": self.cop,
            "entropy_production": self.entropy_production,
            "mode": self.mode.value,
        }


def carnot_efficiency(t_left: float, t_right: float) -> float:
    return 1.0 - t_left / t_right


def carnot_cop(t_left: float, t_right: float) -> float:
    return t_left / (t_right - t_left)


def engine_metrics(
    t: TransportResult,
    t_left: float,
    t_right: float,
    deadband: Optional[float] = None,
) -> EngineMetrics:
    """Classify a steady state as engine (right lead hot) or fridge (cooling the left lead)."""
    if not 0 < t_left < t_right:
        raise ValidationError("engine metrics need 0 < T_L < T_R")
    deadband = Config.MODE_DEADBAND if deadband is None else deadband
    power, q_left, q_right = t.power, t.heat_left, t.heat_right
    entropy = -q_left / t_left - q_right / t_right

    if power > deadband and q_right > deadband:
        return EngineMetrics(power / q_right, None, entropy, Mode.ENGINE)
    if q_left > deadband and power < -deadband:
        return EngineMetrics(None, q_left / -power, entropy, Mode.FRIDGE)
    return EngineMetrics(None, None, entropy, Mode.DUD)


# ----------------------------------------------------------------------
# Reaction-coordinate solver
# ----------------------------------------------------------------------


def rc_supersystem(model: SetModel) -> Tuple[TripleDotSpec, Dict[str, object]]:
    """Map each Lorentzian lead onto an RC site plus a flat residual lead."""
    family = create_family("lorentzian")
    couplings, energies, residuals = {}, {}, {}
    for name, lead in model.leads.items():
        p = {"gamma": lead.gamma, "delta": lead.delta, "eps": lead.eps}
        couplings[name] = math.sqrt(family.lambda_sq(p))
        energies[name] = family.rc_energy(p)
        residuals[name] = family.residual(p)
    spec = TripleDotSpec(
        eps=model.eps,
        lam_l=couplings["L"],
        lam_r=couplings["R"],
        eps_l=energies["L"],
        eps_r=energies["R"],
    )
    return spec, residuals


def solve_rc(
    model: SetModel,
    lamb_shift: Optional[bool] = None,
    tol: Optional[float] = None,
    check_validity: bool = True,
) -> TransportResult:
    spec, residuals = rc_supersystem(model)
    system = build_supersystem(spec)
    reservoirs = [
        ReservoirSpec(name, lead.beta, residuals[name], coupling, mu=lead.mu)
        for (name, lead), coupling in zip(model.leads.items(), system.couplings)
    ]
    liouvillian = build_redfield(system.hamiltonian, reservoirs, lamb_shift, tol, check_validity)
    report = steady_state(liouvillian, system.number)
    matter = report.matter_currents["L"]
    energy = report.energy_currents["L"]
    scale = max(abs(matter), abs(report.matter_currents["R"]), 1e-300)
    return TransportResult.from_currents(
        model,
        matter,
        energy,
        solver="rc",
        conservation=abs(matter + report.matter_currents["R"]) / scale,
        entropy_production=entropy_production(report, reservoirs),
    )


def solve(model: SetModel, solver: str, tol: Optional[float] = None, lamb_shift: Optional[bool] = None, check_validity: bool = True) -> TransportResult:
    if solver == "exact":
        return currents(model, tol)
    if solver == "rc":
        return solve_rc(model, lamb_shift, tol, check_validity)
    raise ValidationError(f"unknown solver '{solver}' (use {', '.join(SOLVERS)})")


# ----------------------------------------------------------------------
# Sweeps
# ----------------------------------------------------------------------


@dataclass
class CellResult:
    index: Tuple[int, int]
    voltage: float
    gamma: float
    transport: Optional[TransportResult] = None
    metrics: Optional[EngineMetrics] = None
    error: Optional[str] = None

    @property
    def mode(self) -> Optional[Mode]:
        return None if self.metrics is None else self.metrics.mode


@dataclass
class EngineMapGrid:
    voltages: np.ndarray
    gammas: np.ndarray
    solver: str
    cells: Dict[Tuple[int, int], CellResult] = field(default_factory=dict)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.voltages.size, self.gammas.size)

    def cell(self, i: int, j: int) -> CellResult:
        return self.cells[(i, j)]

    def modes(self) -> np.ndarray:
        """Mode per (V, Gamma) cell; failed cells hold None."""
        out = np.empty(self.shape, dtype=object)
        for (i, j), cell in self.cells.items():
            out[i, j] = cell.mode
        return out

    def values(self, key: str) -> np.ndarray:
        out = np.full(self.shape, np.nan)
        for (i, j), cell in self.cells.items():
            if cell.transport is None:
                continue
            value = cell.transport.to_dict().get(key)
            if value is None and cell.metrics is not None:
                value = cell.metrics.to_dict().get(key)
            out[i, j] = np.nan if value is None else value
        return out

    @property
    def failures(self) -> List[CellResult]:
        return [cell for _, cell in sorted(self.cells.items()) if cell.error is not None]

    def rows(self) -> List[Dict[str, object]]:
        out = []
        for (i, j) in sorted(self.cells, key=lambda ij: (ij[1], ij[0])):
            cell = self.cells[(i, j)]
            if cell.transport is None:
                continue
            row: Dict[str, object] = {"V": cell.voltage, "Gamma": cell.gamma, **cell.transport.to_dict()}
            row.update({"eta": cell.metrics.efficiency, "cop": cell.metrics.cop, "mode": cell.metrics.mode.value})
            out.append(row)
        return out


def _axis(values: Sequence[float], name: str) -> np.ndarray:
    axis = np.asarray(values, dtype=float)
    if axis.ndim != 1 or axis.size == 0 or not np.all(np.isfinite(axis)):
        raise ValidationError(f"{name} axis must be a non-empty finite 1-D sequence")
    if np.any(np.diff(axis) <= 0):
        raise ValidationError(f"{name} axis must be strictly increasing")
    return axis


def _solve_cell(payload: Tuple) -> CellResult:
    (i, j), voltage, gamma, model_dict, solver, tol, lamb_shift = payload
    model = SetModel.from_dict(model_dict)
    cell = CellResult((i, j), voltage, gamma)
    try:
        transport = solve(model, solver, tol, lamb_shift, check_validity=False)
        cell.transport = transport
        cell.metrics = engine_metrics(transport, model.left.temperature, model.right.temperature)
    except RCThermoError as error:
        error.cell = (i, j)
        cell.error = f"{type(error).__name__}: {error}"
    return cell


def _check_validity(template: SetModel) -> None:
    for name, lead in template.leads.items():
        ratio = lead.beta * lead.delta
        if ratio > Config.VALIDITY_BOUND:
            console.log(
                f"[yellow]lead {name}: beta*delta = {ratio:.3g} exceeds the validity bound "
                f"{Config.VALIDITY_BOUND:g}; RC currents may be inaccurate[/yellow]"
            )


def sweep_map(
    template: SetModel,
    voltages: Sequence[float],
    gammas: Sequence[float],
    solver: str = "exact",
    jobs: Optional[int] = None,
    tol: Optional[float] = None,
    lamb_shift: Optional[bool] = None,
    progress=None,
) -> EngineMapGrid:
    """Solve every (V, Gamma) cell of the operating map; failures are recorded, never raised."""
    if solver not in SOLVERS:
        raise ValidationError(f"unknown solver '{solver}' (use {', '.join(SOLVERS)})")
    v_axis = _axis(voltages, "voltage")
    g_axis = _axis(gammas, "gamma")
    if not g_axis[0] > 0:
        raise ValidationError("coupling strengths must be positive")
    if not template.left.temperature < template.right.temperature:
        raise ValidationError("the operating map needs a hotter right lead (T_R > T_L)")
    if solver == "rc":
        _check_validity(template)
    jobs = Config.get_jobs() if jobs is None else max(1, int(jobs))
    tol = Config.get_tol() if tol is None else tol
    lamb_shift = Config.is_lamb_shift_enabled() if lamb_shift is None else lamb_shift

    payloads = []
    for i, voltage in enumerate(v_axis):
        for j, gamma in enumerate(g_axis):
            model = template.with_operating_point(float(voltage), float(gamma))
            payloads.append(((i, j), float(voltage), float(gamma), model.to_dict(), solver, tol, lamb_shift))

    grid = EngineMapGrid(v_axis, g_axis, solver)
    task = progress.add_task(f"{solver} map", total=len(payloads)) if progress is not None else None

    def collect(cell: CellResult) -> None:
        grid.cells[cell.index] = cell
        if cell.error is not None:
            console.log(f"[red]cell {cell.index} (V={cell.voltage:g}, Gamma={cell.gamma:g}) failed: {cell.error}[/red]")
        if task is not None:
            progress.advance(task)

    if jobs == 1 or len(payloads) == 1:
        for payload in payloads:
            collect(_solve_cell(payload))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            futures = {executor.submit(_solve_cell, payload): payload[0] for payload in payloads}
            for future in as_completed(futures):
                collect(future.result())
    return grid


# ----------------------------------------------------------------------
# Mode boundaries and cross-solver comparison
# ----------------------------------------------------------------------


def _transitions(modes: np.ndarray, j: int) -> List[Tuple[str, float]]:
    """Boundaries along the voltage axis of row j as (kind, fractional cell index)."""
    out = []
    column = modes[:, j]
    for i in range(column.size - 1):
        a, b = column[i], column[i + 1]
        if a is None or b is None or a == b:
            continue
        out.append((f"{a.value}|{b.value}", i + 0.5))
    return out


def mode_boundaries(grid: EngineMapGrid) -> Dict[str, List[List[float]]]:
    """Polylines (V, Gamma) separating modes, one per boundary kind, ordered by Gamma."""
    modes = grid.modes()
    lines: Dict[str, List[List[float]]] = {}
    for j, gamma in enumerate(grid.gammas):
        for kind, position in _transitions(modes, j):
            lo = int(math.floor(position))
            voltage = 0.5 * (grid.voltages[lo] + grid.voltages[lo + 1])
            lines.setdefault(kind, []).append([float(voltage), float(gamma)])
    return {kind: lines[kind] for kind in sorted(lines)}


@dataclass
class GridComparison:
    max_current_error: float
    mode_mismatches: int
    boundary_shift: float
    cells: int

    @property
    def boundaries_agree(self) -> bool:
        return self.boundary_shift <= 1.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "max_current_error": self.max_current_error,
            "mode_mismatches": self.mode_mismatches,
            "boundary_shift_cells": self.boundary_shift,
            "boundaries_agree": self.boundaries_agree,
            "cells": self.cells,
        }


def _boundary_shift(a: np.ndarray, b: np.ndarray) -> float:
    worst = 0.0
    for j in range(a.shape[1]):
        ta, tb = _transitions(a, j), _transitions(b, j)
        for first, second in ((ta, tb), (tb, ta)):
            for kind, position in first:
                matches = [abs(position - other) for other_kind, other in second if other_kind == kind]
                worst = max(worst, min(matches) if matches else math.inf)
    return worst


def compare_grids(reference: EngineMapGrid, other: EngineMapGrid, floor: float = 1e-3) -> GridComparison:
    """Relative current error (against `floor` times the largest reference current) and contour agreement."""
    if reference.shape != other.shape or not (
        np.allclose(reference.voltages, other.voltages) and np.allclose(reference.gammas, other.gammas)
    ):
        raise ValidationError("grids must share their axes to be compared")
    ref_im = reference.values("IM")
    ref_ie = reference.values("IE")
    scale_im = floor * max(np.nanmax(np.abs(ref_im)), 1e-300)
    scale_ie = floor * max(np.nanmax(np.abs(ref_ie)), 1e-300)
    err_im = np.abs(other.values("IM") - ref_im) / np.maximum(np.abs(ref_im), scale_im)
    err_ie = np.abs(other.values("IE") - ref_ie) / np.maximum(np.abs(ref_ie), scale_ie)
    errors = np.concatenate([err_im.ravel(), err_ie.ravel()])
    errors = errors[np.isfinite(errors)]

    modes_a, modes_b = reference.modes(), other.modes()
    mismatches = int(sum(1 for x, y in zip(modes_a.ravel(), modes_b.ravel()) if x != y))
    return GridComparison(
        max_current_error=float(errors.max()) if errors.size else 0.0,
        mode_mismatches=mismatches,
        boundary_shift=_boundary_shift(modes_a, modes_b),
        cells=int(modes_a.size),
    )

#!/usr/bin/env python3
from __future__ import annotations

import math
from argparse import Namespace
from collections import Counter
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np
from rich.console import Console

from ..catalog import TABLE_FAMILIES, create_family, list_families
from ..catalog.verify import random_parameters, verify_against_numeric
from ..config import Config
from ..dynamics import ReservoirSpec, build_redfield, steady_state
from ..engines import (
    Decoupling,
    OttoConfig,
    RcCoupling,
    Treatment,
    compare_grids,
    mode_boundaries,
    otto_sweep,
    run_otto,
    sweep_map,
)
from ..errors import NumericalError, RCThermoError, ValidationError
from ..mapping.chain import bogoliubov_transform, discretize_star, symplectic_defect
from ..mapping.rcmap import MAPPINGS, default_mapping, recurse
from ..mapping.specdens import GridSpec, SpectralDensity, Statistics, default_window, read_density_csv
from ..output import OutputWriter
from ..quantum import TlsRcSpec, TripleDotSpec, build_supersystem, gibbs, trace_distance, transition_energies
from ..runconfig import RunConfig, load_run_config
from ..transport import SetModel
from ..ui.manager import UIManager

OTTO_POINTS = 33
OTTO_VARIANTS = (
    (Treatment.WEAK, Decoupling.INSTANTANEOUS),
    (Treatment.RC, Decoupling.INSTANTANEOUS),
    (Treatment.RC, Decoupling.ADIABATIC),
)
MAP_COLUMNS = ("V", "Gamma", "IM", "IE", "P", "QL", "QR", "eta", "cop", "mode")
ERROR_COLUMNS = ("solver", "i", "j", "V", "Gamma", "error")
SELFTEST_TOL = 1e-3


def parse_range(text: Any, points: int, log: bool = False) -> np.ndarray:
    """'lo:hi' or 'lo:hi:n' into an increasing axis; log spacing for coupling axes."""
    if isinstance(text, (list, tuple)):
        return np.asarray([float(v) for v in text])
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise ValidationError(f"range '{text}' must look like lo:hi or lo:hi:n")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2]) if len(parts) == 3 else points
    except ValueError as error:
        raise ValidationError(f"range '{text}' is not numeric") from error
    if count < 1 or not hi >= lo:
        raise ValidationError(f"range '{text}' needs hi >= lo and at least one point")
    if log:
        if lo <= 0:
            raise ValidationError(f"log-spaced range '{text}' must be positive")
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def _reference(params: Mapping[str, float]) -> Tuple[str, float]:
    for key in ("wm", "eps", "delta", "value"):
        value = params.get(key)
        if value:
            return key, float(value)
    return "1", 1.0


class CommandExecutor:
    def __init__(self, console: Console, ui: Optional[UIManager] = None) -> None:
        self.console = console
        self.ui = ui or UIManager(console)
        self.handlers: Dict[str, Callable[[Namespace], int]] = {
            "map": self._handle_map,
            "chain": self._handle_chain,
            "otto": self._handle_otto,
            "set": self._handle_set,
            "catalog": self._handle_catalog,
            "selftest": self._handle_selftest,
        }

    def execute(self, args: Namespace) -> int:
        handler = self.handlers.get(args.command)
        if handler is None:
            raise ValidationError(f"unknown command '{args.command}'")
        return handler(args)

    # ------------------------------------------------------------------
    # Shared plumbing
    # ------------------------------------------------------------------

    def _run_config(self, args: Namespace, overrides: Mapping[str, Any]) -> RunConfig:
        return load_run_config(
            args.command,
            getattr(args, "config", None),
            overrides,
            out_dir=getattr(args, "out", None),
            seed=getattr(args, "seed", None),
            jobs=getattr(args, "jobs", None),
            tol=getattr(args, "tol", None),
        )

    @staticmethod
    def _lamb_shift(args: Namespace) -> Optional[bool]:
        return getattr(args, "lamb_shift", None)

    def _density(self, run: RunConfig) -> Tuple[SpectralDensity, Dict[str, float], Optional[Any]]:
        """The input density with its resolved parameters and catalog entry (None for CSV input)."""
        path = run.get("density")
        if path is not None:
            try:
                statistics = Statistics(run.get("statistics", Statistics.BOSONIC_ODD.value))
            except ValueError as error:
                raise ValidationError(f"unknown statistics '{run.get('statistics')}'") from error
            return read_density_csv(Path(path), statistics), {}, None
        name = run.get("family")
        if name is None:
            raise ValidationError("give either --family or --density")
        family = create_family(name)
        params = family.with_defaults(run.params)
        return family.density(params), params, family

    # ------------------------------------------------------------------
    # map
    # ------------------------------------------------------------------

    def _handle_map(self, args: Namespace) -> int:
        run = self._run_config(args, vars(args).get("overrides", {}))
        density, params, family = self._density(run)
        mapping = run.get("mapping") or default_mapping(density)
        if mapping not in MAPPINGS:
            raise ValidationError(f"unknown mapping '{mapping}' (use {', '.join(MAPPINGS)})")

        grid = None
        if not density.is_grid:
            grid = GridSpec(Config.RESIDUAL_POINTS).samples(default_window(density))
        result = MAPPINGS[mapping](density, grid=grid, tol=run.tol)

        verification = None
        if run.get("verify"):
            if family is None:
                raise ValidationError("--verify needs a catalog family")
            verification = verify_against_numeric(family, params, tol=SELFTEST_TOL).to_dict()

        ref_name, ref_value = _reference(params)
        writer = OutputWriter(run.out_dir, run.to_dict(), units=ref_name)
        writer.write_json(
            "map_result.json",
            {
                "result": result.to_dict(),
                "family": None if family is None else family.name,
                "params": params,
                "reference": {"name": ref_name, "value": ref_value},
                "rc_energy_over_reference": result.rc_energy / ref_value,
                "residual": "residual.csv",
                "verification": verification,
            },
        )
        writer.write_density("residual.csv", result.residual)

        self.ui.show_map_result(result.to_dict(), verification)
        self.ui.show_written(writer.written)
        if verification is not None and not verification["passed"]:
            self.ui.display_error("map", "numerical mapping disagrees with the closed form")
            return NumericalError.exit_code
        return 0

    # ------------------------------------------------------------------
    # chain
    # ------------------------------------------------------------------

    def _handle_chain(self, args: Namespace) -> int:
        run = self._run_config(args, vars(args).get("overrides", {}))
        density, params, _ = self._density(run)
        steps = int(run.get("steps", 10))
        points = int(run.get("points", Config.GRID_POINTS))
        chain = recurse(density, steps, GridSpec(points), run.get("mapping"), run.tol)

        ref_name, _ = _reference(params)
        writer = OutputWriter(run.out_dir, run.to_dict(), units=ref_name)
        names = []
        for step, residual in enumerate(chain.residuals):
            name = f"residual_step_{step:02d}.csv"
            writer.write_density(name, residual)
            names.append(name)
        payload = chain.to_dict(residual_ref=names[-1] if names else None)
        payload["residuals"] = names
        payload["params"] = params
        writer.write_json("chain.json", payload)

        self.ui.show_chain(chain.site_energies, chain.hop_couplings, chain.fixed_point_deviation)
        self.ui.show_written(writer.written)
        return 0

    # ------------------------------------------------------------------
    # otto
    # ------------------------------------------------------------------

    @staticmethod
    def _otto_template(run: RunConfig) -> OttoConfig:
        mu_hot = float(run.get("mu_hot", 2.0))
        n_max = run.get("n_max")
        return OttoConfig(
            mu_hot=mu_hot,
            mu_cold=float(run.get("mu_cold", 0.5 * mu_hot)),
            beta_hot=float(run.get("beta_hot", 1.0)),
            beta_cold=float(run.get("beta_cold", 2.0)),
            rc_hot=RcCoupling(float(run.get("lam_hot", 0.5)), float(run.get("omega_hot", 1.0))),
            rc_cold=RcCoupling(float(run.get("lam_cold", 0.5)), float(run.get("omega_cold", 1.0))),
            decoupling=Decoupling(run.get("decoupling", Decoupling.INSTANTANEOUS.value)),
            treatment=Treatment(run.get("treatment", Treatment.WEAK.value)),
            s_choice=str(run.get("s_choice", "sx")),
            n_max=None if n_max is None else int(n_max),
            renormalize=bool(run.get("renormalize", False)),
        )

    def _handle_otto(self, args: Namespace) -> int:
        run = self._run_config(args, vars(args).get("overrides", {}))
        try:
            template = self._otto_template(run)
        except ValueError as error:
            raise ValidationError(f"malformed Otto settings: {error}") from error

        if run.get("compare"):
            templates = [replace(template, treatment=t, decoupling=d) for t, d in OTTO_VARIANTS]
        else:
            templates = [template]

        mu_range = run.get("mu_cold_range")
        if mu_range is None:
            values = np.linspace(0.0, template.mu_hot, OTTO_POINTS + 2)[1:-1]
        else:
            values = parse_range(mu_range, OTTO_POINTS)

        reports = {}
        rows: List[Dict[str, object]] = []
        best = {}
        with self.ui.create_progress_bar(self.console) as progress:
            task = progress.add_task("otto", total=len(templates))
            for cfg in templates:
                report = run_otto(cfg)
                curve = otto_sweep(cfg, values)
                reports[cfg.variant] = report.to_dict()
                rows.extend(curve.rows())
                point = curve.best_point
                best[cfg.variant] = None if point is None else {"mu_ratio": point.mu_ratio, "W": point.work, "eta": point.efficiency}
                progress.advance(task)

        writer = OutputWriter(run.out_dir, run.to_dict(), units="mu_hot")
        writer.write_json(
            "cycle_report.json",
            {"reports": reports, "best": best, "carnot": template.carnot},
        )
        writer.write_csv("parametric.csv", ("mu_ratio", "W", "eta", "variant"), rows)

        for report in reports.values():
            self.ui.show_cycle(report)
        self.ui.show_written(writer.written)
        return 0

    # ------------------------------------------------------------------
    # set
    # ------------------------------------------------------------------

    @staticmethod
    def _set_template(run: RunConfig) -> SetModel:
        model = run.get("model")
        if model is not None:
            return SetModel.from_dict(model)
        try:
            return SetModel.symmetric(
                0.0,
                1.0,
                eps=float(run.get("eps", 1.0)),
                delta=float(run.get("delta", 0.01)),
                beta_left=float(run.get("beta_left", 2.0)),
                beta_right=float(run.get("beta_right", 1.0)),
            )
        except (TypeError, ValueError) as error:
            raise ValidationError(f"malformed SET settings: {error}") from error

    def _handle_set(self, args: Namespace) -> int:
        run = self._run_config(args, vars(args).get("overrides", {}))
        template = self._set_template(run)
        solver = run.get("solver", "exact")
        solvers = ("exact", "rc") if solver == "both" else (solver,)
        eps = template.eps
        voltages = parse_range(run.get("v_range", "0:2:20"), 20) * eps
        gammas = parse_range(run.get("gamma_range", "0.1:100:20"), 20, log=True) * eps

        grids = {}
        with self.ui.create_progress_bar(self.console) as progress:
            for name in solvers:
                grids[name] = sweep_map(
                    template,
                    voltages,
                    gammas,
                    solver=name,
                    jobs=run.jobs,
                    tol=run.tol,
                    lamb_shift=self._lamb_shift(args),
                    progress=progress,
                )

        writer = OutputWriter(run.out_dir, run.to_dict(), units="eps")
        boundaries = {}
        failures = []
        for name, grid in grids.items():
            filename = "engine_map.csv" if name == solvers[0] else f"engine_map_{name}.csv"
            writer.write_csv(filename, MAP_COLUMNS, grid.rows())
            boundaries[name] = mode_boundaries(grid)
            for cell in grid.failures:
                i, j = cell.index
                failures.append({"solver": name, "i": i, "j": j, "V": cell.voltage, "Gamma": cell.gamma, "error": str(cell.error)})
            counts = Counter(mode.value for mode in grid.modes().ravel() if mode is not None)
            self.ui.show_grid_summary(name, dict(sorted(counts.items())), len(grid.failures))

        writer.write_json("boundaries.json", {"model": template.to_dict(), "boundaries": boundaries})
        if failures:
            writer.write_csv("errors.csv", ERROR_COLUMNS, failures)
        if len(grids) == 2:
            comparison = compare_grids(grids["exact"], grids["rc"]).to_dict()
            writer.write_json("comparison.json", comparison)
            self.ui.show_comparison(comparison)
        self.ui.show_written(writer.written)
        return 0

    # ------------------------------------------------------------------
    # catalog / selftest
    # ------------------------------------------------------------------

    def _handle_catalog(self, args: Namespace) -> int:
        self.ui.show_catalog(list_families())
        return 0

    def _handle_selftest(self, args: Namespace) -> int:
        seed = getattr(args, "seed", None)
        rng = np.random.default_rng(0 if seed is None else seed)
        checks: List[Dict[str, object]] = []
        probes = [
            ("catalog", lambda: self._check_catalog(rng)),
            ("triple-dot spectrum", lambda: self._check_triple_dot(rng)),
            ("gibbs fixed point", lambda: self._check_gibbs(rng)),
            ("symplectic transforms", self._check_symplectic),
        ]
        with self.ui.create_progress_bar(self.console) as progress:
            task = progress.add_task("selftest", total=len(probes))
            for name, probe in probes:
                try:
                    passed, detail = probe()
                except RCThermoError as error:
                    passed, detail = False, str(error)
                checks.append({"name": name, "passed": passed, "detail": detail})
                progress.advance(task)
        self.ui.show_checks(checks)
        return 0 if all(check["passed"] for check in checks) else NumericalError.exit_code

    @staticmethod
    def _check_catalog(rng: np.random.Generator) -> Tuple[bool, str]:
        failed = []
        for name in TABLE_FAMILIES:
            family = create_family(name)
            report = verify_against_numeric(family, random_parameters(family, rng), tol=SELFTEST_TOL)
            if not report.passed:
                failed.append(name)
        if failed:
            return False, f"closed forms off for {', '.join(failed)}"
        return True, f"{len(TABLE_FAMILIES)} families within {SELFTEST_TOL:g}"

    @staticmethod
    def _check_triple_dot(rng: np.random.Generator) -> Tuple[bool, str]:
        gamma, delta, eps = rng.uniform(0.5, 2.0), rng.uniform(0.1, 1.0), rng.uniform(1.0, 3.0)
        lam = math.sqrt(gamma * delta / 2.0)
        system = build_supersystem(TripleDotSpec(eps, lam, lam, eps, eps))
        found = np.sort(transition_energies(system))
        split = math.sqrt(gamma * delta)
        expected = np.array([eps - split, eps, eps + split])
        error = float(np.max(np.abs(found - expected)) / np.max(np.abs(expected)))
        return error <= 1e-10, f"relative error {error:.2e}"

    @staticmethod
    def _check_gibbs(rng: np.random.Generator) -> Tuple[bool, str]:
        beta, lam = rng.uniform(0.5, 2.0), rng.uniform(0.1, 0.5)
        system = build_supersystem(TlsRcSpec(1.0, lam, 1.0, n_max=5))
        residual = create_family("rubin").density({"gamma": 1e-7, "wm": 20.0})
        bath = ReservoirSpec("bath", beta, residual, system.couplings[0])
        report = steady_state(build_redfield(system.hamiltonian, [bath], check_validity=False))
        distance = trace_distance(report.state, gibbs(system.hamiltonian, beta).density)
        return distance <= 1e-6, f"trace distance {distance:.2e}"

    @staticmethod
    def _check_symplectic() -> Tuple[bool, str]:
        lorentzian = create_family("lorentzian").density({"gamma": 1.0, "delta": 1.0, "eps": 0.0})
        u, v = bogoliubov_transform(discretize_star(lorentzian, 400), phonon=False)
        fermionic = symplectic_defect(u, v, bosonic=False)
        rubin = create_family("rubin").density({"gamma": 1.0, "wm": 1.0})
        u, v = bogoliubov_transform(discretize_star(rubin, 400), phonon=True)
        bosonic = symplectic_defect(u, v, bosonic=True)
        worst = max(fermionic, bosonic)
        return worst <= 1e-10, f"worst defect {worst:.2e}"


__all__ = ["CommandExecutor", "parse_range"]

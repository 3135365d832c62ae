#!/usr/bin/env python3
import configparser
import json
import os
from pathlib import Path

import psutil


class Config:

    # Relative accuracy for quadratures and principal-value transforms.
    DEFAULT_TOL = 1e-6
    # Fixed re-sampling grid used by recursive mappings.
    GRID_POINTS = 4000
    # Residual sampling for analytic inputs of a single mapping step.
    RESIDUAL_POINTS = 400
    # Half-width of soft-cutoff sampling windows, in units of the family scale.
    SOFT_WINDOW = 40.0
    # Fermi window half-width in units of 1/beta, and resonance window in units of sqrt(gamma*delta).
    FERMI_WINDOW = 40.0
    RESONANCE_WINDOW = 10.0

    # Supersystem limits.
    DIMENSION_CAP = 4096
    TRUNCATION_TAIL = 1e-8
    TRUNCATION_POPULATION_TOL = 1e-6

    # Master equation.
    LAMB_SHIFT_ENABLED = True
    DEGENERACY_TOL = 1e-9
    VALIDITY_BOUND = 0.05
    SPECTRUM_CHECK_MAX = 4096

    # Engine classification.
    MODE_DEADBAND = 1e-12

    # Output formatting.
    CSV_DIGITS = 17
    DEFAULT_OUT_DIR = "rcthermo_out"

    PANEL_STYLES = {
        "default": {"border_style": "#888888", "padding": (0, 1)},
        "info": {"border_style": "#8caaee", "padding": (0, 1)},
        "success": {"border_style": "#a6d189", "padding": (0, 1)},
        "error": {"border_style": "#e78284", "padding": (0, 1)},
        "warning": {"border_style": "#e5c890", "padding": (0, 1)},
    }

    CONFIG_DIR = Path(os.getenv("RCTHERMO_CONFIG_DIR", str(Path.home() / ".rcthermo"))).expanduser()
    CONFIG_FILE = CONFIG_DIR / "config.ini"

    @classmethod
    def ensure_directories(cls):
        cls.CONFIG_DIR.mkdir(parents=True, exist_ok=True)
        if not cls.CONFIG_FILE.exists():
            cls._write_default_config()

    @classmethod
    def get_tol(cls) -> float:
        env_value = os.getenv("RCTHERMO_TOL")
        if env_value is None:
            return cls.DEFAULT_TOL
        try:
            return float(env_value)
        except ValueError:
            return cls.DEFAULT_TOL

    @classmethod
    def get_jobs(cls) -> int:
        env_value = os.getenv("RCTHERMO_JOBS")
        if env_value is not None:
            try:
                return max(1, int(env_value))
            except ValueError:
                pass
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        return max(1, int(cores))

    @classmethod
    def is_lamb_shift_enabled(cls) -> bool:
        env_value = os.getenv("RCTHERMO_LAMB_SHIFT")
        if env_value is None:
            return cls.LAMB_SHIFT_ENABLED

        normalized = env_value.strip().lower()
        return normalized in {"1", "true", "yes", "on"}

    # ------------------------------------------------------------------
    # External configuration support (config.ini)
    # ------------------------------------------------------------------

    @classmethod
    def _write_default_config(cls) -> None:
        parser = configparser.ConfigParser()

        parser["numerics"] = {
            "default_tol": repr(cls.DEFAULT_TOL),
            "grid_points": str(cls.GRID_POINTS),
            "residual_points": str(cls.RESIDUAL_POINTS),
            "soft_window": repr(cls.SOFT_WINDOW),
            "dimension_cap": str(cls.DIMENSION_CAP),
            "truncation_tail": repr(cls.TRUNCATION_TAIL),
            "lamb_shift_enabled": str(cls.LAMB_SHIFT_ENABLED),
            "degeneracy_tol": repr(cls.DEGENERACY_TOL),
        }

        parser["sweep"] = {
            "validity_bound": repr(cls.VALIDITY_BOUND),
            "fermi_window": repr(cls.FERMI_WINDOW),
            "resonance_window": repr(cls.RESONANCE_WINDOW),
            "mode_deadband": repr(cls.MODE_DEADBAND),
        }

        parser["output"] = {
            "csv_digits": str(cls.CSV_DIGITS),
            "default_out_dir": cls.DEFAULT_OUT_DIR,
        }

        parser["ui"] = {
            "panel_styles": json.dumps(cls.PANEL_STYLES),
        }

        with cls.CONFIG_FILE.open("w", encoding="utf-8") as config_handle:
            parser.write(config_handle)

    @classmethod
    def _load_external_config(cls) -> None:
        parser = configparser.ConfigParser()

        if not cls.CONFIG_FILE.exists():
            return

        parser.read(cls.CONFIG_FILE, encoding="utf-8")

        cls.DEFAULT_TOL = parser.getfloat("numerics", "default_tol", fallback=cls.DEFAULT_TOL)
        cls.GRID_POINTS = parser.getint("numerics", "grid_points", fallback=cls.GRID_POINTS)
        cls.RESIDUAL_POINTS = parser.getint("numerics", "residual_points", fallback=cls.RESIDUAL_POINTS)
        cls.SOFT_WINDOW = parser.getfloat("numerics", "soft_window", fallback=cls.SOFT_WINDOW)
        cls.DIMENSION_CAP = parser.getint("numerics", "dimension_cap", fallback=cls.DIMENSION_CAP)
        cls.TRUNCATION_TAIL = parser.getfloat("numerics", "truncation_tail", fallback=cls.TRUNCATION_TAIL)
        cls.LAMB_SHIFT_ENABLED = parser.getboolean("numerics", "lamb_shift_enabled", fallback=cls.LAMB_SHIFT_ENABLED)
        cls.DEGENERACY_TOL = parser.getfloat("numerics", "degeneracy_tol", fallback=cls.DEGENERACY_TOL)

        cls.VALIDITY_BOUND = parser.getfloat("sweep", "validity_bound", fallback=cls.VALIDITY_BOUND)
        cls.FERMI_WINDOW = parser.getfloat("sweep", "fermi_window", fallback=cls.FERMI_WINDOW)
        cls.RESONANCE_WINDOW = parser.getfloat("sweep", "resonance_window", fallback=cls.RESONANCE_WINDOW)
        cls.MODE_DEADBAND = parser.getfloat("sweep", "mode_deadband", fallback=cls.MODE_DEADBAND)

        cls.CSV_DIGITS = parser.getint("output", "csv_digits", fallback=cls.CSV_DIGITS)
        cls.DEFAULT_OUT_DIR = parser.get("output", "default_out_dir", fallback=cls.DEFAULT_OUT_DIR)

        cls.PANEL_STYLES = cls._json_override(parser, "ui", "panel_styles", cls.PANEL_STYLES)

    @staticmethod
    def _json_override(parser: configparser.ConfigParser, section: str, option: str, default):
        if not parser.has_option(section, option):
            return default
        raw_value = parser.get(section, option)
        try:
            parsed = json.loads(raw_value)
        except json.JSONDecodeError:
            return default
        return parsed


Config._load_external_config()

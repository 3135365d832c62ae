#!/usr/bin/env python3
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from .config import Config
from .errors import ValidationError


@dataclass
class RunConfig:
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    out_dir: Path = Path(Config.DEFAULT_OUT_DIR)
    seed: int = 0
    jobs: int = 1
    tol: float = Config.DEFAULT_TOL

    def get(self, key: str, default: Any = None) -> Any:
        value = self.params.get(key)
        return default if value is None else value

    def to_dict(self) -> Dict[str, Any]:
        """Everything that determines the numbers; the output location and worker count do not."""
        return {"command": self.command, "params": dict(self.params), "seed": self.seed, "tol": self.tol}


def read_config_file(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            payload = json.load(handle)
    except OSError as error:
        raise ValidationError(f"cannot read config file {path}: {error}") from error
    except json.JSONDecodeError as error:
        raise ValidationError(f"{path.name} is not valid JSON: {error}") from error
    if not isinstance(payload, dict):
        raise ValidationError(f"{path.name} must hold a JSON object")
    return payload


def load_run_config(
    command: str,
    path: Optional[Path],
    overrides: Mapping[str, Any],
    *,
    out_dir: Optional[str] = None,
    seed: Optional[int] = None,
    jobs: Optional[int] = None,
    tol: Optional[float] = None,
) -> RunConfig:
    """Merge the JSON file with flag overrides; flags that were given win."""
    payload = read_config_file(path)
    params = dict(payload.get(command, payload))
    params.update({key: value for key, value in overrides.items() if value is not None})

    tol = tol if tol is not None else payload.get("tol", Config.get_tol())
    try:
        tol = float(tol)
    except (TypeError, ValueError) as error:
        raise ValidationError("tol must be a number") from error
    if not tol > 0:
        raise ValidationError("tol must be positive")

    jobs = jobs if jobs is not None else payload.get("jobs", Config.get_jobs())
    seed = seed if seed is not None else payload.get("seed", 0)
    out = out_dir or payload.get("out") or Config.DEFAULT_OUT_DIR
    try:
        return RunConfig(command, params, Path(out), int(seed), max(1, int(jobs)), tol)
    except (TypeError, ValueError) as error:
        raise ValidationError(f"malformed run settings: {error}") from error

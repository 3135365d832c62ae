#!/usr/bin/env python3
from __future__ import annotations

import csv
import hashlib
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .. import __version__
from ..config import Config
from ..errors import ValidationError
from ..mapping.specdens import SpectralDensity, write_density_csv
from ..ui import console


def canonical_json(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, separators=(",", ":"))


def config_hash(payload: Any) -> str:
    digest = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
    return digest[:16]


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, complex):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    return value


def format_cell(value: Any, digits: int = Config.CSV_DIGITS) -> str:
    if value is None:
        return ""
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{digits}g}"
    return str(value)


class OutputWriter:
    """Writes every artifact of one run with a shared metadata header."""

    def __init__(self, out_dir: Path, run_config: Mapping[str, Any], units: str) -> None:
        self.out_dir = Path(out_dir)
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as error:
            raise ValidationError(f"output directory {self.out_dir} is not writable: {error}") from error
        self.run_config = dict(run_config)
        self.config_hash = config_hash(self.run_config)
        self.units = units
        self.digits = Config.CSV_DIGITS
        self.written: List[Path] = []

    @property
    def header(self) -> str:
        return f"# rcthermo {__version__} config={self.config_hash} units={self.units}"

    @property
    def meta(self) -> Dict[str, Any]:
        return {
            "version": __version__,
            "config_hash": self.config_hash,
            "units": self.units,
            "hbar": 1,
            "k_B": 1,
        }

    def _record(self, path: Path) -> Path:
        self.written.append(path)
        console.log(f"wrote [cyan]{path}[/cyan]")
        return path

    def write_csv(self, name: str, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
        path = self.out_dir / name
        with path.open("w", encoding="utf-8", newline="") as handle:
            handle.write(f"{self.header}\n")
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(list(columns))
            for row in rows:
                writer.writerow([format_cell(row.get(column), self.digits) for column in columns])
        return self._record(path)

    def write_json(self, name: str, payload: Mapping[str, Any]) -> Path:
        path = self.out_dir / name
        document = {"meta": self.meta, **to_jsonable(payload)}
        with path.open("w", encoding="utf-8") as handle:
            json.dump(document, handle, sort_keys=True, indent=2)
            handle.write("\n")
        return self._record(path)

    def write_density(self, name: str, d: SpectralDensity, omegas: Optional[Sequence[float]] = None) -> Path:
        path = write_density_csv(self.out_dir / name, d, omegas, header=self.header, digits=self.digits)
        return self._record(path)

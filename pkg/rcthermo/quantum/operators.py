#!/usr/bin/env python3
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import reduce
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import Config
from ..errors import DimensionCap, UnknownLabel, ValidationError

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class HilbertSpace:
    factors: Tuple[Tuple[str, int], ...]

    def __post_init__(self) -> None:
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        if not factors:
            raise ValidationError("a Hilbert space needs at least one factor")
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise ValidationError(f"factor labels must be unique, got {labels}")
        if any(dim < 1 for _, dim in factors):
            raise ValidationError("factor dimensions must be positive")
        object.__setattr__(self, "factors", factors)
        if self.total_dim > Config.DIMENSION_CAP:
            raise DimensionCap(
                f"Hilbert space dimension {self.total_dim} exceeds the cap of {Config.DIMENSION_CAP}"
            )

    @property
    def labels(self) -> List[str]:
        return [label for label, _ in self.factors]

    @property
    def dims(self) -> List[int]:
        return [dim for _, dim in self.factors]

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as error:
            raise UnknownLabel(f"no factor labelled '{label}' in {self.labels}") from error

    def subspace(self, keep: Sequence[str]) -> "HilbertSpace":
        order = sorted(self.index(label) for label in keep)
        return HilbertSpace(tuple(self.factors[i] for i in order))

    def embed(self, label: str, local: np.ndarray) -> np.ndarray:
        """Tensor a single-factor operator with identities on every other factor."""
        target = self.index(label)
        parts = [np.asarray(local) if i == target else np.eye(dim) for i, dim in enumerate(self.dims)]
        return reduce(np.kron, parts)

    def to_dict(self) -> Dict[str, object]:
        return {"factors": [[label, dim] for label, dim in self.factors]}


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    space: HilbertSpace
    entries: np.ndarray
    hermitian: bool = False
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=complex)
        n = self.space.total_dim
        if entries.shape != (n, n):
            raise ValidationError(f"operator shape {entries.shape} does not match dimension {n}")
        if self.hermitian:
            scale = max(1.0, float(np.linalg.norm(entries)))
            if np.max(np.abs(entries - entries.conj().T)) > HERMITIAN_TOL * scale:
                raise ValidationError("operator flagged Hermitian is not Hermitian")
        object.__setattr__(self, "entries", entries)

    @property
    def dim(self) -> int:
        return self.space.total_dim

    @property
    def dag(self) -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries.conj().T, self.hermitian)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def expect(self, rho: "OperatorMatrix") -> float:
        return float(np.real(np.trace(self.entries @ rho.entries)))

    def eigh(self) -> Tuple[np.ndarray, np.ndarray]:
        if not self.hermitian:
            raise ValidationError("eigh needs a Hermitian operator")
        return np.linalg.eigh(self.entries)

    def __add__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries + other.entries, self.hermitian and other.hermitian)

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries - other.entries, self.hermitian and other.hermitian)

    def __matmul__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        return OperatorMatrix(self.space, self.entries @ other.entries)

    def scaled(self, factor: float) -> "OperatorMatrix":
        return OperatorMatrix(self.space, factor * self.entries, self.hermitian and np.isreal(factor))


# ----------------------------------------------------------------------
# Elementary single-factor operators
# ----------------------------------------------------------------------

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
# |1><0| lowers the excited level |0> of the (sigma_z = +1) basis
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]])


def annihilation(n_max: int) -> np.ndarray:
    """Truncated boson b on levels 0..n_max."""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1)


def number(n_max: int) -> np.ndarray:
    return np.diag(np.arange(n_max + 1, dtype=float))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b + b @ a


# ----------------------------------------------------------------------
# Binary container
# ----------------------------------------------------------------------


def save_operator(path: Path, op: OperatorMatrix, **metadata) -> Path:
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_suffix(".npz")
    header = {"space": op.space.to_dict(), "hermitian": op.hermitian, **op.metadata, **metadata}
    np.savez(
        path,
        entries=op.entries,
        shape=np.array(op.entries.shape),
        metadata=np.array(json.dumps(header, sort_keys=True, default=str)),
    )
    return path


def load_operator(path: Path) -> OperatorMatrix:
    with np.load(Path(path), allow_pickle=False) as data:
        header = json.loads(str(data["metadata"]))
        entries = np.asarray(data["entries"]).reshape(tuple(int(n) for n in data["shape"]))
    space = HilbertSpace(tuple((label, dim) for label, dim in header.pop("space")["factors"]))
    hermitian = bool(header.pop("hermitian", False))
    return OperatorMatrix(space, entries, hermitian, header)


def product_space(factors: Iterable[Tuple[str, int]]) -> HilbertSpace:
    return HilbertSpace(tuple(factors))


def as_operator(space: HilbertSpace, matrix: np.ndarray, hermitian: Optional[bool] = None) -> OperatorMatrix:
    if hermitian is None:
        m = np.asarray(matrix)
        hermitian = bool(np.allclose(m, m.conj().T, atol=HERMITIAN_TOL * max(1.0, float(np.linalg.norm(m)))))
    return OperatorMatrix(space, matrix, hermitian)

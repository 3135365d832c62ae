#!/usr/bin/env python3
"""Supersystem Hamiltonians: two-level system plus a bosonic RC, and the fermionic triple dot."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterator, List, Optional, Union

import numpy as np

from ..config import Config
from ..errors import ValidationError
from .operators import (
    SIGMA_X,
    SIGMA_Z,
    HilbertSpace,
    OperatorMatrix,
    annihilation,
    number,
)

S_CHOICES: Dict[str, np.ndarray] = {
    "sx": SIGMA_X,
    "sz": SIGMA_Z,
    "proj": 0.5 * (SIGMA_Z + np.eye(2)),
}


@dataclass(frozen=True)
class TlsRcSpec:
    mu: float
    lam: float
    omega: float
    s_choice: str = "sx"
    n_max: Optional[int] = None
    include_renormalization: bool = True
    beta: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("mu", "lam", "omega"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if self.lam < 0:
            raise ValidationError("lambda must be nonnegative")
        if self.omega <= 0:
            raise ValidationError("the RC frequency must be positive")
        if self.s_choice not in S_CHOICES:
            raise ValidationError(f"unknown system operator '{self.s_choice}' (use {', '.join(S_CHOICES)})")
        if self.n_max is not None and self.n_max < 2:
            raise ValidationError("n_max must be at least 2")

    def resolved_n_max(self) -> int:
        if self.n_max is not None:
            return self.n_max
        if self.beta is None:
            raise ValidationError("an adaptive truncation needs an inverse temperature")
        return adaptive_n_max(self.omega, self.lam, self.beta)


@dataclass(frozen=True)
class TripleDotSpec:
    eps: float
    lam_l: float
    lam_r: float
    eps_l: float
    eps_r: float

    def __post_init__(self) -> None:
        values = (self.eps, self.lam_l, self.lam_r, self.eps_l, self.eps_r)
        if not all(math.isfinite(v) for v in values):
            raise ValidationError("triple-dot energies must be finite")
        if self.lam_l < 0 or self.lam_r < 0:
            raise ValidationError("tunnel couplings must be nonnegative")


SupersystemSpec = Union[TlsRcSpec, TripleDotSpec]


@dataclass(frozen=True, eq=False)
class Supersystem:
    spec: SupersystemSpec
    space: HilbertSpace
    hamiltonian: OperatorMatrix
    couplings: List[OperatorMatrix]
    parts: Dict[str, OperatorMatrix] = field(default_factory=dict)
    number: Optional[OperatorMatrix] = None

    def __iter__(self) -> Iterator:
        yield self.space
        yield self.hamiltonian
        yield self.couplings

    @property
    def system_label(self) -> str:
        return self.space.labels[0]


def adaptive_n_max(omega: float, lam: float, beta: float, tail: Optional[float] = None) -> int:
    """Smallest truncation whose thermal tail, shifted by the RC displacement, is below `tail`."""
    tail = Config.TRUNCATION_TAIL if tail is None else tail
    if beta <= 0 or not math.isfinite(omega) or omega <= 0:
        raise ValidationError("adaptive truncation needs beta > 0 and omega > 0")
    thermal = 0 if math.isinf(beta) else math.ceil(math.log(1.0 / tail) / (beta * omega))
    shift = lam / omega
    n_max = max(2, thermal + math.ceil(shift * shift + 6.0 * shift + 4.0))
    return min(n_max, Config.DIMENSION_CAP // 2 - 1)


def _tls_rc(spec: TlsRcSpec) -> Supersystem:
    n_max = spec.resolved_n_max()
    space = HilbertSpace((("system", 2), ("rc", n_max + 1)))
    s = S_CHOICES[spec.s_choice]
    b = annihilation(n_max)
    x = b + b.T
    eye_s, eye_rc = np.eye(2), np.eye(n_max + 1)

    h_system = np.kron(0.5 * spec.mu * SIGMA_Z, eye_rc)
    h_rc = spec.omega * np.kron(eye_s, number(n_max))
    h_int = spec.lam * np.kron(s, x)
    if spec.include_renormalization:
        h_int = h_int + (spec.lam ** 2 / spec.omega) * np.kron(s @ s, eye_rc)
    hamiltonian = h_system + h_rc + h_int

    parts = {
        "system": OperatorMatrix(space, h_system, True),
        "rc": OperatorMatrix(space, h_rc, True),
        "interaction": OperatorMatrix(space, h_int, True),
        "system_local": OperatorMatrix(HilbertSpace((("system", 2),)), 0.5 * spec.mu * SIGMA_Z, True),
    }
    coupling = OperatorMatrix(space, np.kron(eye_s, x), True)
    return Supersystem(spec, space, OperatorMatrix(space, hamiltonian, True), [coupling], parts)


def jordan_wigner(modes: int) -> List[np.ndarray]:
    """Annihilators c_j = Z x ... x Z x a x 1 x ... x 1 on `modes` fermionic sites."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]])
    parity = np.diag([1.0, -1.0])
    eye = np.eye(2)
    ops = []
    for j in range(modes):
        parts = [parity] * j + [a] + [eye] * (modes - j - 1)
        ops.append(reduce(np.kron, parts))
    return ops


def _triple_dot(spec: TripleDotSpec) -> Supersystem:
    space = HilbertSpace((("d", 2), ("dL", 2), ("dR", 2)))
    d, d_l, d_r = jordan_wigner(3)
    n = [c.T @ c for c in (d, d_l, d_r)]

    h_dot = spec.eps * n[0]
    h_leads = spec.eps_l * n[1] + spec.eps_r * n[2]
    h_tunnel = np.zeros_like(h_dot)
    for lam, lead in ((spec.lam_l, d_l), (spec.lam_r, d_r)):
        h_tunnel = h_tunnel + lam * (d @ lead.T + lead @ d.T)
    hamiltonian = h_dot + h_leads + h_tunnel

    parts = {
        "system": OperatorMatrix(space, h_dot, True),
        "rc": OperatorMatrix(space, h_leads, True),
        "interaction": OperatorMatrix(space, h_tunnel, True),
        "d": OperatorMatrix(space, d),
        "dL": OperatorMatrix(space, d_l),
        "dR": OperatorMatrix(space, d_r),
        "system_local": OperatorMatrix(HilbertSpace((("d", 2),)), np.diag([0.0, spec.eps]), True),
    }
    total = OperatorMatrix(space, n[0] + n[1] + n[2], True)
    couplings = [OperatorMatrix(space, d_l), OperatorMatrix(space, d_r)]
    return Supersystem(spec, space, OperatorMatrix(space, hamiltonian, True), couplings, parts, total)


def build_supersystem(spec: SupersystemSpec) -> Supersystem:
    if isinstance(spec, TlsRcSpec):
        return _tls_rc(spec)
    if isinstance(spec, TripleDotSpec):
        return _triple_dot(spec)
    raise ValidationError(f"unsupported supersystem spec {type(spec).__name__}")


def sector_energies(system: Supersystem, particles: int) -> np.ndarray:
    """Eigenvalues of H restricted to the sector with the given total particle number."""
    if system.number is None:
        raise ValidationError("particle sectors need a number-conserving supersystem")
    occupation = np.real(np.diag(system.number.entries))
    if not np.allclose(system.number.entries, np.diag(occupation)):
        raise ValidationError("the number operator must be diagonal in the product basis")
    index = np.flatnonzero(np.isclose(occupation, particles))
    if index.size == 0:
        raise ValidationError(f"no states with {particles} particles")
    block = system.hamiltonian.entries[np.ix_(index, index)]
    return np.linalg.eigvalsh(block)


def transition_energies(system: Supersystem) -> np.ndarray:
    """Single-particle addition energies E(1, k) - E(0)."""
    return sector_energies(system, 1) - sector_energies(system, 0)[0]

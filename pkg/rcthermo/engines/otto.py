#!/usr/bin/env python3
"""Quantum Otto cycle of a two-level system, with weak coupling or reaction-coordinate isochores.

Energies in the ledger are changes of the tracked energy (system, both RCs and any active
interaction). Work entries are energy put into the working medium, so a working engine has
negative net work entries and a positive `w_net`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..config import Config
from ..errors import ValidationError
from ..quantum import TlsRcSpec, build_supersystem, check_truncation, gibbs
from ..quantum.supersystem import S_CHOICES
from ..ui import console

ADIABATIC_STEPS = 200
LEDGER_KEYS = (
    "couple_hot",
    "hot_isochore",
    "decouple_hot",
    "expansion",
    "rethermalize_hot",
    "couple_cold",
    "cold_isochore",
    "decouple_cold",
    "compression",
    "rethermalize_cold",
)
WORK_KEYS = ("couple_hot", "decouple_hot", "expansion", "couple_cold", "decouple_cold", "compression")


class Decoupling(str, Enum):
    INSTANTANEOUS = "instantaneous"
    ADIABATIC = "adiabatic"


class Treatment(str, Enum):
    WEAK = "weak"
    RC = "rc"


@dataclass(frozen=True)
class RcCoupling:
    lam: float
    omega: float

    def __post_init__(self) -> None:
        if self.lam < 0 or not math.isfinite(self.lam):
            raise ValidationError("RC coupling must be finite and nonnegative")
        if self.omega <= 0 or not math.isfinite(self.omega):
            raise ValidationError("RC frequency must be finite and positive")


@dataclass(frozen=True)
class OttoConfig:
    mu_hot: float
    mu_cold: float
    beta_hot: float
    beta_cold: float
    rc_hot: RcCoupling = RcCoupling(0.0, 1.0)
    rc_cold: RcCoupling = RcCoupling(0.0, 1.0)
    decoupling: Decoupling = Decoupling.INSTANTANEOUS
    treatment: Treatment = Treatment.WEAK
    s_choice: str = "sx"
    n_max: Optional[int] = None
    renormalize: bool = False

    def __post_init__(self) -> None:
        if not self.mu_hot > self.mu_cold > 0:
            raise ValidationError("Otto splittings need mu_hot > mu_cold > 0")
        if not self.beta_cold > self.beta_hot > 0:
            raise ValidationError("Otto reservoirs need beta_cold > beta_hot > 0")
        if self.s_choice not in S_CHOICES:
            raise ValidationError(f"unknown system operator '{self.s_choice}'")
        object.__setattr__(self, "decoupling", Decoupling(self.decoupling))
        object.__setattr__(self, "treatment", Treatment(self.treatment))

    @property
    def variant(self) -> str:
        if self.treatment is Treatment.WEAK:
            return "weak"
        return f"rc_{self.decoupling.value}"

    @property
    def carnot(self) -> float:
        return 1.0 - self.beta_hot / self.beta_cold

    @classmethod
    def from_dict(cls, payload: Dict[str, object]) -> "OttoConfig":
        data = dict(payload)
        try:
            for key in ("rc_hot", "rc_cold"):
                if key in data and not isinstance(data[key], RcCoupling):
                    data[key] = RcCoupling(**{k: float(v) for k, v in dict(data[key]).items()})
            return cls(**data)
        except (TypeError, ValueError) as error:
            raise ValidationError(f"malformed Otto config: {error}") from error

    def to_dict(self) -> Dict[str, object]:
        return {
            "mu_hot": self.mu_hot,
            "mu_cold": self.mu_cold,
            "beta_hot": self.beta_hot,
            "beta_cold": self.beta_cold,
            "rc_hot": {"lam": self.rc_hot.lam, "omega": self.rc_hot.omega},
            "rc_cold": {"lam": self.rc_cold.lam, "omega": self.rc_cold.omega},
            "decoupling": self.decoupling.value,
            "treatment": self.treatment.value,
            "s_choice": self.s_choice,
            "n_max": self.n_max,
            "renormalize": self.renormalize,
        }


@dataclass
class CycleReport:
    config: OttoConfig
    ledger: Dict[str, float]
    w_net: float
    q_hot: float
    efficiency: Optional[float]
    populations: Dict[str, float] = field(default_factory=dict)

    @property
    def w_decouple_hot(self) -> float:
        return self.ledger["decouple_hot"]

    @property
    def w_decouple_cold(self) -> float:
        return self.ledger["decouple_cold"]

    @property
    def ledger_sum(self) -> float:
        return float(sum(self.ledger.values()))

    @property
    def ledger_scale(self) -> float:
        return max(abs(v) for v in self.ledger.values()) or 1.0

    def to_dict(self) -> Dict[str, object]:
        return {
            "config": self.config.to_dict(),
            "variant": self.config.variant,
            "ledger": dict(self.ledger),
            "ledger_sum": self.ledger_sum,
            "W_net": self.w_net,
            "Q_hot": self.q_hot,
            "W_decouple_hot": self.w_decouple_hot,
            "W_decouple_cold": self.w_decouple_cold,
            "eta": self.efficiency,
            "populations": dict(self.populations),
        }


# ----------------------------------------------------------------------
# Isochore end points
# ----------------------------------------------------------------------


@dataclass
class _Contact:
    """One reservoir contact: supersystem Gibbs state at the end of the isochore and decoupling."""

    e_coupled: float
    # energy of the fresh thermal RC before coupling
    e_rc_thermal: float
    w_decouple: float
    # after decoupling
    e_system: float
    e_rc: float
    excited: float


def _system_energy(mu: float, excited: float) -> float:
    return 0.5 * mu * (2.0 * excited - 1.0)


def _weak_contact(mu: float, beta: float) -> _Contact:
    excited = 1.0 / (1.0 + math.exp(beta * mu))
    energy = _system_energy(mu, excited)
    return _Contact(energy, 0.0, 0.0, energy, 0.0, excited)


def _tracked_spec(cfg: OttoConfig, mu: float, rc: RcCoupling, beta: float) -> TlsRcSpec:
    spec = TlsRcSpec(
        mu=mu,
        lam=rc.lam,
        omega=rc.omega,
        s_choice=cfg.s_choice,
        n_max=cfg.n_max,
        include_renormalization=cfg.renormalize,
        beta=beta,
    )
    if rc.lam > 0:
        return replace(spec, n_max=check_truncation(spec, beta))
    return replace(spec, n_max=spec.resolved_n_max())


def _adiabatic_track(spec: TlsRcSpec, steps: int = ADIABATIC_STEPS) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Follow each eigenstate of H'(lam) continuously down to lam = 0.

    Returns the coupled energies, the decoupled energies and the decoupled eigenvectors,
    all indexed by the coupled level.
    """
    system = build_supersystem(spec)
    energies, vectors = np.linalg.eigh(system.hamiltonian.entries)
    start = energies.copy()
    for s in np.linspace(1.0, 0.0, steps + 1)[1:]:
        step = build_supersystem(replace(spec, lam=spec.lam * s))
        if s == 0.0:
            # H(0) is diagonal in the product basis; eigh could mix its degenerate levels
            e_new = np.real(np.diag(step.hamiltonian.entries))
            v_new = np.eye(e_new.size, dtype=complex)
        else:
            e_new, v_new = np.linalg.eigh(step.hamiltonian.entries)
        overlap = np.abs(vectors.conj().T @ v_new)
        _, columns = linear_sum_assignment(-overlap)
        energies = e_new[columns]
        vectors = v_new[:, columns]
    return start, energies, vectors


def _rc_contact(cfg: OttoConfig, mu: float, rc: RcCoupling, beta: float) -> _Contact:
    spec = _tracked_spec(cfg, mu, rc, beta)
    system = build_supersystem(spec)
    parts = system.parts
    h_system = parts["system"].entries
    h_rc = parts["rc"].entries

    state = gibbs(system.hamiltonian, beta).density.entries
    e_coupled = float(np.real(np.trace(system.hamiltonian.entries @ state)))
    thermal_rc = gibbs(parts["rc"], beta).density.entries
    # the embedded RC Gibbs state includes a maximally mixed system factor
    e_rc_thermal = float(np.real(np.trace(h_rc @ thermal_rc)))

    if cfg.decoupling is Decoupling.ADIABATIC and rc.lam > 0:
        coupled, decoupled, vectors = _adiabatic_track(spec)
        weights = np.exp(-beta * (coupled - coupled[0]))
        weights /= weights.sum()
        w_decouple = float(np.sum(weights * (decoupled - coupled)))
        state = (vectors * weights[None, :]) @ vectors.conj().T
    else:
        w_decouple = -float(np.real(np.trace(parts["interaction"].entries @ state)))

    e_system = float(np.real(np.trace(h_system @ state)))
    e_rc = float(np.real(np.trace(h_rc @ state)))
    excited = 0.5 * (1.0 + 2.0 * e_system / mu)
    return _Contact(e_coupled, e_rc_thermal, w_decouple, e_system, e_rc, excited)


def _coupling_cost(cfg: OttoConfig, rc: RcCoupling, excited: float) -> float:
    """Tr{H_I (rho_S x thermal RC)}: only the renormalization term survives <x> = 0."""
    if cfg.treatment is Treatment.WEAK or not cfg.renormalize or rc.lam == 0:
        return 0.0
    s = S_CHOICES[cfg.s_choice]
    rho_s = np.diag([excited, 1.0 - excited])
    return float(rc.lam ** 2 / rc.omega * np.trace(s @ s @ rho_s))


# ----------------------------------------------------------------------
# Cycle
# ----------------------------------------------------------------------


def run_otto(cfg: OttoConfig) -> CycleReport:
    """Evaluate one steady cycle A' -> B -> B' -> C -> C' -> D -> D' -> A -> A'."""
    ratio = cfg.mu_cold / cfg.mu_hot
    if cfg.treatment is Treatment.WEAK:
        hot = _weak_contact(cfg.mu_hot, cfg.beta_hot)
        cold = _weak_contact(cfg.mu_cold, cfg.beta_cold)
    else:
        hot = _rc_contact(cfg, cfg.mu_hot, cfg.rc_hot, cfg.beta_hot)
        cold = _rc_contact(cfg, cfg.mu_cold, cfg.rc_cold, cfg.beta_cold)

    # energy bookkeeping over system + hot RC + cold RC
    expansion = (ratio - 1.0) * hot.e_system
    compression = (1.0 / ratio - 1.0) * cold.e_system
    couple_cold = _coupling_cost(cfg, cfg.rc_cold, hot.excited)
    couple_hot = _coupling_cost(cfg, cfg.rc_hot, cold.excited)

    # tracked energy just after coupling to each reservoir
    at_c_prime = ratio * hot.e_system + cold.e_rc_thermal + couple_cold
    at_a_prime = cold.e_system / ratio + hot.e_rc_thermal + couple_hot
    ledger = {
        "couple_hot": couple_hot,
        "hot_isochore": hot.e_coupled - at_a_prime,
        "decouple_hot": hot.w_decouple,
        "expansion": expansion,
        "rethermalize_hot": hot.e_rc_thermal - hot.e_rc,
        "couple_cold": couple_cold,
        "cold_isochore": cold.e_coupled - at_c_prime,
        "decouple_cold": cold.w_decouple,
        "compression": compression,
        "rethermalize_cold": cold.e_rc_thermal - cold.e_rc,
    }

    w_net = -sum(ledger[key] for key in WORK_KEYS)
    q_hot = ledger["hot_isochore"]
    # no efficiency unless the cycle draws heat from the hot reservoir
    scale = max(abs(v) for v in ledger.values()) or 1.0
    efficiency: Optional[float] = None
    if q_hot > Config.MODE_DEADBAND * scale:
        efficiency = w_net / q_hot

    report = CycleReport(
        config=cfg,
        ledger=ledger,
        w_net=float(w_net),
        q_hot=float(q_hot),
        efficiency=efficiency,
        populations={"hot_excited": hot.excited, "cold_excited": cold.excited},
    )
    if abs(report.ledger_sum) > 1e-8 * report.ledger_scale:
        console.log(f"[yellow]Otto ledger does not close: residual {report.ledger_sum:.3e}[/yellow]")
    return report


@dataclass(frozen=True)
class OttoPoint:
    mu_ratio: float
    work: float
    efficiency: Optional[float]
    variant: str


@dataclass
class OttoCurve:
    variant: str
    points: List[OttoPoint]
    best: Optional[int]

    @property
    def best_point(self) -> Optional[OttoPoint]:
        return None if self.best is None else self.points[self.best]

    def rows(self) -> List[Dict[str, object]]:
        return [
            {"mu_ratio": p.mu_ratio, "W": p.work, "eta": p.efficiency, "variant": p.variant}
            for p in self.points
        ]


def otto_sweep(template: OttoConfig, mu_cold_values: Sequence[float]) -> OttoCurve:
    """Parametric (W_net, eta) curve over the cold splitting; `best` marks the most efficient engine point."""
    values = sorted(float(v) for v in mu_cold_values)
    if not values:
        raise ValidationError("an Otto sweep needs at least one cold splitting")
    if values[0] <= 0 or values[-1] >= template.mu_hot:
        raise ValidationError("cold splittings must lie in (0, mu_hot)")

    points = []
    for mu_cold in values:
        report = run_otto(replace(template, mu_cold=mu_cold))
        points.append(OttoPoint(mu_cold / template.mu_hot, report.w_net, report.efficiency, template.variant))

    engines = [i for i, p in enumerate(points) if p.work > 0 and p.efficiency is not None]
    best = max(engines, key=lambda i: points[i].efficiency) if engines else None
    return OttoCurve(template.variant, points, best)


__all__ = [
    "CycleReport",
    "Decoupling",
    "LEDGER_KEYS",
    "OttoConfig",
    "OttoCurve",
    "OttoPoint",
    "RcCoupling",
    "Treatment",
    "otto_sweep",
    "run_otto",
]

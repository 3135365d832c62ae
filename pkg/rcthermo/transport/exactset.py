#!/usr/bin/env python3
"""Exact currents of a noninteracting resonant level between two Lorentzian leads."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate
from scipy.special import expit

from ..config import Config
from ..errors import NonConvergent, ValidationError

QUAD_LIMIT = 800


@dataclass(frozen=True)
class LeadSpec:
    gamma: float
    delta: float
    eps: float
    beta: float
    mu: float = 0.0

    def __post_init__(self) -> None:
        for key in ("gamma", "delta", "eps", "beta", "mu"):
            if not math.isfinite(getattr(self, key)):
                raise ValidationError(f"lead parameter {key} must be finite")
        if self.gamma <= 0 or self.delta <= 0:
            raise ValidationError("lead gamma and delta must be positive")
        if self.beta <= 0:
            raise ValidationError("lead beta must be positive")

    def density(self, omega):
        x = np.asarray(omega, dtype=float) - self.eps
        return self.gamma * self.delta ** 2 / (x * x + self.delta ** 2)

    def shift(self, omega):
        x = np.asarray(omega, dtype=float) - self.eps
        return 0.5 * self.gamma * self.delta * x / (x * x + self.delta ** 2)

    def fermi(self, omega):
        return expit(-self.beta * (np.asarray(omega, dtype=float) - self.mu))

    @property
    def temperature(self) -> float:
        return 1.0 / self.beta


@dataclass(frozen=True)
class SetModel:
    eps: float
    left: LeadSpec
    right: LeadSpec

    def __post_init__(self) -> None:
        if not math.isfinite(self.eps):
            raise ValidationError("dot level must be finite")

    @property
    def leads(self) -> Dict[str, LeadSpec]:
        return {"L": self.left, "R": self.right}

    @property
    def bias(self) -> float:
        return self.left.mu - self.right.mu

    @classmethod
    def symmetric(
        cls,
        voltage: float,
        gamma: float,
        *,
        eps: float = 1.0,
        delta: float = 0.01,
        beta_left: float = 2.0,
        beta_right: float = 1.0,
    ) -> "SetModel":
        """Symmetric leads centred on the dot, cold left lead, bias split as +-V/2."""
        return cls(
            eps=eps,
            left=LeadSpec(gamma=gamma, delta=delta * eps, eps=eps, beta=beta_left / eps, mu=0.5 * voltage),
            right=LeadSpec(gamma=gamma, delta=delta * eps, eps=eps, beta=beta_right / eps, mu=-0.5 * voltage),
        )

    def with_operating_point(self, voltage: float, gamma: float) -> "SetModel":
        """Same leads with the bias re-split symmetrically and both couplings set to gamma."""
        left = LeadSpec(gamma, self.left.delta, self.left.eps, self.left.beta, 0.5 * voltage)
        right = LeadSpec(gamma, self.right.delta, self.right.eps, self.right.beta, -0.5 * voltage)
        return SetModel(self.eps, left, right)

    @classmethod
    def from_dict(cls, payload: Mapping[str, object]) -> "SetModel":
        try:
            leads = payload["leads"]
            return cls(
                eps=float(payload["eps"]),
                left=LeadSpec(**{k: float(v) for k, v in leads["L"].items()}),
                right=LeadSpec(**{k: float(v) for k, v in leads["R"].items()}),
            )
        except (KeyError, TypeError, ValueError) as error:
            raise ValidationError(f"malformed SET model: {error}") from error

    def to_dict(self) -> Dict[str, object]:
        return {"eps": self.eps, "leads": {name: asdict(lead) for name, lead in self.leads.items()}}


@dataclass
class TransportResult:
    matter_current: float
    energy_current: float
    power: float
    heat_left: float
    heat_right: float
    meta: Dict[str, object] = field(default_factory=dict)

    @classmethod
    def from_currents(cls, model: SetModel, matter: float, energy: float, **meta) -> "TransportResult":
        """Build the thermodynamic ledger from left-to-right matter and energy currents."""
        mu_l, mu_r = model.left.mu, model.right.mu
        return cls(
            matter_current=matter,
            energy_current=energy,
            power=-(mu_l - mu_r) * matter,
            heat_left=energy - mu_l * matter,
            heat_right=-(energy - mu_r * matter),
            meta=dict(meta),
        )

    def entropy_production(self, model: SetModel) -> float:
        return -model.left.beta * self.heat_left - model.right.beta * self.heat_right

    def to_dict(self) -> Dict[str, float]:
        return {
            "IM": self.matter_current,
            "IE": self.energy_current,
            "P": self.power,
            "QL": self.heat_left,
            "QR": self.heat_right,
        }


def level_shift(m: SetModel, omega):
    return m.left.shift(omega) + m.right.shift(omega)


def transmission(m: SetModel, omega):
    scalar = np.ndim(omega) == 0
    x = np.atleast_1d(np.asarray(omega, dtype=float))
    g_l = m.left.density(x)
    g_r = m.right.density(x)
    detuning = x - m.eps - level_shift(m, x)
    width = 0.5 * (g_l + g_r)
    out = g_l * g_r / (detuning ** 2 + width ** 2)
    return float(out[0]) if scalar else out


def integration_window(m: SetModel) -> Tuple[float, float, List[float]]:
    """Hull of the Fermi and lead-resonance windows plus interior breakpoints."""
    edges: List[float] = []
    breaks: List[float] = [m.eps]
    for lead in m.leads.values():
        fermi = Config.FERMI_WINDOW / lead.beta
        edges.extend([lead.mu - fermi, lead.mu + fermi])
        split = math.sqrt(lead.gamma * lead.delta)
        reach = Config.RESONANCE_WINDOW * split
        edges.extend([lead.eps - reach, lead.eps + reach])
        breaks.extend([lead.mu, lead.eps, lead.eps - split, lead.eps + split])
    lo, hi = min(edges), max(edges)
    return lo, hi, sorted({b for b in breaks if lo < b < hi})


def _integrate(func, lo: float, hi: float, breaks: Sequence[float], tol: float, floor: float) -> float:
    result = integrate.quad(
        func,
        lo,
        hi,
        points=list(breaks) or None,
        epsabs=tol * floor,
        epsrel=tol,
        limit=QUAD_LIMIT,
        full_output=1,
    )
    value, error = result[0], result[1]
    if len(result) > 3 and error > 10.0 * max(tol * abs(value), tol * floor):
        raise NonConvergent(f"transport integral on [{lo:g}, {hi:g}] stopped at error {error:.3e}")
    return float(value)


def currents(m: SetModel, tol: Optional[float] = None) -> TransportResult:
    """Landauer matter and energy currents, positive from left to right."""
    tol = Config.get_tol() if tol is None else tol
    if not tol > 0:
        raise ValidationError("tolerance must be positive")
    lo, hi, breaks = integration_window(m)
    left, right = m.left, m.right

    def window(w: float) -> float:
        return float(transmission(m, w) * (left.fermi(w) - right.fermi(w)))

    # absolute floor scales with the window width
    floor = 1e-3 / (hi - lo)
    matter = _integrate(window, lo, hi, breaks, tol, floor) / (2.0 * math.pi)
    energy = _integrate(lambda w: w * window(w), lo, hi, breaks, tol, floor * max(1.0, abs(m.eps))) / (
        2.0 * math.pi
    )
    return TransportResult.from_currents(m, matter, energy, solver="exact")


__all__ = [
    "LeadSpec",
    "SetModel",
    "TransportResult",
    "currents",
    "integration_window",
    "level_shift",
    "transmission",
]

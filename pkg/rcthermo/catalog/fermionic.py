#!/usr/bin/env python3
"""Fermionic families on the full frequency axis, centred at eps with width delta."""
from __future__ import annotations

import math
from typing import Dict, Mapping, Optional, Tuple

import numpy as np
from scipy.special import dawsn

from ..mapping.specdens import Statistics
from .base import BaseFamily


class _LeadFamily(BaseFamily):
    defaults = {"gamma": 1.0, "delta": 1.0, "eps": 0.0}
    statistics = Statistics.FERMIONIC_FULL_AXIS
    parameters = ("gamma", "delta", "eps")
    signed = ("eps",)

    def rc_energy(self, params: Mapping[str, float]) -> float:
        return self.validate(params)["eps"]


class _BoxSupported(_LeadFamily):
    def support(self, p: Dict[str, float]) -> Tuple[float, float]:
        return (p["eps"] - p["delta"], p["eps"] + p["delta"])


class FlatFamily(BaseFamily):
    name = "flat"
    defaults = {"value": 1.0}
    description = "Energy-independent coupling density (wide-band lead)"
    statistics = Statistics.FERMIONIC_FULL_AXIS
    parameters = ("value",)
    rigid = False
    decay = 0.0
    residual_decay = 0.0

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        return np.full_like(np.asarray(omega, dtype=float), p["value"])

    def flat_density(self, p: Dict[str, float]) -> Optional[float]:
        return p["value"]

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        raise NotImplementedError("a flat density has no reaction coordinate")

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        raise NotImplementedError("a flat density has no reaction coordinate")

    def rc_energy(self, params: Mapping[str, float]) -> float:
        raise NotImplementedError("a flat density has no reaction coordinate")

    def scale(self, p: Dict[str, float]) -> float:
        return 1.0


class LorentzianFamily(_LeadFamily):
    name = "lorentzian"
    description = "Lorentzian lead, flat residual"
    rigid = False
    decay = 2.0
    residual_decay = 0.0

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        g, d, e = p["gamma"], p["delta"], p["eps"]
        return g * d * d / ((omega - e) ** 2 + d * d)

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        return np.full_like(np.asarray(omega, dtype=float), 2.0 * p["delta"])

    def flat_residual(self, p: Dict[str, float]) -> Optional[float]:
        return 2.0 * p["delta"]

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return 0.5 * p["gamma"] * p["delta"]


class LorentzianSquaredFamily(_LeadFamily):
    name = "lorentzian_sq"
    description = "Squared Lorentzian lead, Lorentzian residual of doubled width"
    rigid = False
    decay = 4.0
    residual_decay = 2.0

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        g, d, e = p["gamma"], p["delta"], p["eps"]
        return g * d ** 4 / ((omega - e) ** 2 + d * d) ** 2

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        d, e = p["delta"], p["eps"]
        width = 2.0 * d
        return d * width * width / ((omega - e) ** 2 + width * width)

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return 0.25 * p["gamma"] * p["delta"]


class GaussianFamily(_LeadFamily):
    name = "gaussian"
    description = "Gaussian lead"
    rigid = False

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        g, d, e = p["gamma"], p["delta"], p["eps"]
        return g * np.exp(-(((omega - e) / d) ** 2))

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        # 1 - erf^2(ix) = 1 + (4/pi) e^{2x^2} D(x)^2, multiplied through by e^{-2x^2}
        d = p["delta"]
        x = (omega - p["eps"]) / d
        damp = np.exp(-x * x)
        return 2.0 * d * damp / (math.sqrt(math.pi) * (damp * damp + 4.0 / math.pi * dawsn(x) ** 2))

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return p["gamma"] * p["delta"] / (2.0 * math.sqrt(math.pi))


class BoxFamily(_BoxSupported):
    name = "box"
    defaults = {"gamma": 1.0, "delta": 5.0, "eps": 3.0}
    description = "Flat band of half-width delta with rigid edges"

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        return np.full_like(np.asarray(omega, dtype=float), p["gamma"])

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        d = p["delta"]
        at = np.arctanh((p["eps"] - omega) / d)
        return 4.0 * math.pi * d / (math.pi ** 2 + 4.0 * at * at)

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return p["gamma"] * p["delta"] / math.pi


class ParabolicFamily(_BoxSupported):
    name = "parabolic"
    description = "Parabolic band of half-width delta"

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        u = (omega - p["eps"]) / p["delta"]
        return p["gamma"] * np.clip(1.0 - u * u, 0.0, None)

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        d = p["delta"]
        y = np.asarray(omega, dtype=float) - p["eps"]
        u = y / d
        inside = np.abs(u) < 1.0
        log_part = np.zeros_like(y)
        log_part[inside] = (d * d - y[inside] ** 2) * np.arctanh(u[inside])
        shape = np.clip(1.0 - u * u, 0.0, None)
        den = 4.0 * (d * y + log_part) ** 2 / (math.pi ** 2 * d ** 4) + shape ** 2
        return 8.0 * d / (3.0 * math.pi) * shape / den

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return 2.0 * p["gamma"] * p["delta"] / (3.0 * math.pi)


class SemicircleFamily(_BoxSupported):
    name = "semicircle"
    defaults = {"gamma": 1.0, "delta": 5.0, "eps": 3.0}
    description = "Semicircular band, the fixed point of the fermionic mapping"

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        u = (omega - p["eps"]) / p["delta"]
        return p["gamma"] * np.sqrt(np.clip(1.0 - u * u, 0.0, None))

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        u = (omega - p["eps"]) / p["delta"]
        return p["delta"] * np.sqrt(np.clip(1.0 - u * u, 0.0, None))

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return 0.25 * p["gamma"] * p["delta"]

#!/usr/bin/env python3
"""Bosonic phonon-type families, stored on omega >= 0 and odd-continued."""
from __future__ import annotations

import math
from typing import Dict, Mapping, Tuple

import numpy as np

from ..mapping.specdens import Statistics
from .base import BaseFamily


class _PhononFamily(BaseFamily):
    statistics = Statistics.BOSONIC_ODD


class SoftLinearFamily(_PhononFamily):
    name = "soft_linear"
    defaults = {"gamma": 1.0, "delta": 1.0, "eps": 1.0}
    description = "Linear at low frequency with a soft quartic cutoff around eps"
    parameters = ("gamma", "delta", "eps")
    rigid = False
    decay = 5.0
    residual_decay = 1.0

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        g, d, e = p["gamma"], p["delta"], p["eps"]
        w = omega
        minus = d * d + (w - e) ** 2
        plus = d * d + (w + e) ** 2
        return 8.0 * g * d ** 4 * e * w * (w * w + d * d + e * e) / (minus * minus * plus * plus)

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        d, e = p["delta"], p["eps"]
        w = omega
        shift = 3.0 * d * d + e * e
        den = math.sqrt(shift) * (2.0 * w * w * (5.0 * d * d - e * e) + shift * shift + w ** 4)
        return 8.0 * d ** 3 * w * (d * d + w * w + e * e) / den

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        g, d, e = p["gamma"], p["delta"], p["eps"]
        return g * d * e / (4.0 * math.sqrt(3.0 * d * d + e * e))

    def rc_energy(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return math.sqrt(3.0 * p["delta"] ** 2 + p["eps"] ** 2)

    def scale(self, p: Dict[str, float]) -> float:
        return max(p["delta"], 0.25 * p["eps"])


class SoftCubicFamily(SoftLinearFamily):
    name = "soft_cubic"
    description = "Cubic at low frequency with a soft cutoff around eps"

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        g, d, e = p["gamma"], p["delta"], p["eps"]
        w = omega
        minus = d * d + (w - e) ** 2
        plus = d * d + (w + e) ** 2
        return 4.0 * g * d ** 5 * w ** 3 / (minus * minus * plus * plus)

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        d, e = p["delta"], p["eps"]
        w = omega
        den = math.sqrt(5.0 * d * d + e * e) * (
            d ** 4 + 2.0 * d * d * (7.0 * w * w + e * e) + (w * w - e * e) ** 2
        )
        return 16.0 * d ** 3 * w ** 3 / den

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        g, d, e = p["gamma"], p["delta"], p["eps"]
        return g * d * d / (16.0 * math.sqrt(5.0 * d * d + e * e))

    def rc_energy(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return math.sqrt(5.0 * p["delta"] ** 2 + p["eps"] ** 2)


class LinearRigidFamily(_PhononFamily):
    name = "linear_rigid"
    defaults = {"gamma": 1.0, "wm": 10.0}
    description = "Ohmic density with a rigid cutoff at wm"
    parameters = ("gamma", "wm")

    def support(self, p: Dict[str, float]) -> Tuple[float, float]:
        return (0.0, p["wm"])

    def center(self, p: Dict[str, float]) -> float:
        return 0.5 * p["wm"]

    def scale(self, p: Dict[str, float]) -> float:
        return p["wm"]

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        return p["gamma"] * omega / p["wm"]

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        wm = p["wm"]
        w = omega
        at = np.arctanh(w / wm)
        den = math.pi ** 2 * w * w + 4.0 * w * at * (w * at - 2.0 * wm) + 4.0 * wm * wm
        return 2.0 * math.sqrt(5.0 / 3.0) * math.pi * w * wm * wm / (3.0 * den)

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return math.sqrt(5.0 / 3.0) * p["gamma"] * p["wm"] / (6.0 * math.pi)

    def rc_energy(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return math.sqrt(3.0 / 5.0) * p["wm"]


class RubinFamily(LinearRigidFamily):
    name = "rubin"
    description = "Rubin density, the fixed point of the phonon mapping"

    def profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        u = omega / p["wm"]
        return p["gamma"] * u * np.sqrt(np.clip(1.0 - u * u, 0.0, None))

    def residual_profile(self, omega: np.ndarray, p: Dict[str, float]) -> np.ndarray:
        u = omega / p["wm"]
        return omega / math.sqrt(2.0) * np.sqrt(np.clip(1.0 - u * u, 0.0, None))

    def lambda_sq(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return p["gamma"] * p["wm"] / (16.0 * math.sqrt(2.0))

    def rc_energy(self, params: Mapping[str, float]) -> float:
        p = self.validate(params)
        return p["wm"] / math.sqrt(2.0)

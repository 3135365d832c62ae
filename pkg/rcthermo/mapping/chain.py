#!/usr/bin/env python3
"""Discrete star reservoirs and their Lanczos chain form."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy.linalg import null_space

from ..errors import Breakdown, ValidationError
from ..ui import console
from .specdens import SpectralDensity, Statistics, evaluate

BREAKDOWN_TOL = 1e-13


@dataclass(frozen=True)
class DiscreteStar:
    mode_energies: np.ndarray
    couplings: np.ndarray
    statistics: Statistics = Statistics.FERMIONIC_FULL_AXIS

    def __post_init__(self) -> None:
        energies = np.asarray(self.mode_energies, dtype=float)
        couplings = np.abs(np.asarray(self.couplings, dtype=float))
        if energies.ndim != 1 or energies.shape != couplings.shape:
            raise ValidationError("star energies and couplings must be equal-length vectors")
        object.__setattr__(self, "mode_energies", energies)
        object.__setattr__(self, "couplings", couplings)

    def __len__(self) -> int:
        return int(self.mode_energies.size)

    @property
    def weights(self) -> np.ndarray:
        """2 pi |h_k|^2, the delta weights of the reconstructed density."""
        return 2.0 * math.pi * self.couplings ** 2


@dataclass
class ChainCoefficients:
    site_energies: np.ndarray
    hop_couplings: np.ndarray
    terminal_residual: Union[SpectralDensity, DiscreteStar, None] = None
    residuals: List[SpectralDensity] = field(default_factory=list)
    breakdown: bool = False
    statistics: Statistics = Statistics.FERMIONIC_FULL_AXIS
    fixed_point_deviation: Optional[float] = None

    def __len__(self) -> int:
        return int(np.size(self.site_energies))

    def to_dict(self, residual_ref: Optional[str] = None) -> dict:
        payload = {
            "sites": [float(x) for x in self.site_energies],
            "hops": [float(x) for x in self.hop_couplings],
            "residual": residual_ref,
            "statistics": self.statistics.value,
            "breakdown": self.breakdown,
        }
        if self.fixed_point_deviation is not None:
            payload["fixed_point_deviation"] = self.fixed_point_deviation
        return payload


def _nodes(lo: float, hi: float, modes: int, center: float, scale: float) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(modes)
    if math.isfinite(lo) and math.isfinite(hi):
        half = 0.5 * (hi - lo)
        return lo + half * (x + 1.0), half * w
    # omega = c + s tan(theta) maps the open axis onto a finite angle range
    t_lo = -0.5 * math.pi if not math.isfinite(lo) else math.atan((lo - center) / scale)
    t_hi = 0.5 * math.pi if not math.isfinite(hi) else math.atan((hi - center) / scale)
    half = 0.5 * (t_hi - t_lo)
    theta = t_lo + half * (x + 1.0)
    omega = center + scale * np.tan(theta)
    return omega, half * w * scale / np.cos(theta) ** 2


def discretize_star(d: SpectralDensity, modes: int) -> DiscreteStar:
    """Gauss-Legendre star with 2 pi h_k^2 = w_k Gamma(omega_k)."""
    if modes < 1:
        raise ValidationError("a star needs at least one mode")
    lo, hi = d.support
    if d.statistics.bosonic:
        lo = max(lo, 0.0)
    omega, weights = _nodes(lo, hi, modes, d.center, d.scale)
    gamma = evaluate(d, omega) if d.statistics is Statistics.FERMIONIC_FULL_AXIS else d.raw(omega)
    couplings = np.sqrt(np.clip(weights * gamma, 0.0, None) / (2.0 * math.pi))
    return DiscreteStar(omega, couplings, d.statistics)


def _quadratic_form(star: DiscreteStar, phonon: bool) -> Tuple[np.ndarray, np.ndarray]:
    energies = star.mode_energies
    if phonon:
        if np.any(energies <= 0):
            raise ValidationError("phonon stars need strictly positive mode energies")
        return energies ** 2, star.couplings * np.sqrt(2.0 * energies)
    return energies.copy(), star.couplings.copy()


def _lanczos(diag: np.ndarray, seed: np.ndarray, count: int) -> Tuple[np.ndarray, List[float], List[float], bool]:
    norm = float(np.linalg.norm(seed))
    if norm == 0.0:
        raise ValidationError("star couplings are all zero")
    basis = [seed / norm]
    alphas: List[float] = []
    betas: List[float] = []
    breakdown = False
    scale = max(float(np.max(np.abs(diag))), 1e-300)
    for n in range(count):
        q = basis[n]
        aq = diag * q
        alphas.append(float(q @ aq))
        if n == count - 1:
            break
        r = aq - alphas[n] * q
        if n > 0:
            r = r - betas[n - 1] * basis[n - 1]
        block = np.array(basis)
        for _ in range(2):
            r = r - block.T @ (block @ r)
        beta = float(np.linalg.norm(r))
        if beta <= BREAKDOWN_TOL * scale:
            breakdown = True
            break
        betas.append(beta)
        basis.append(r / beta)
    return np.array(basis), alphas, betas, breakdown


def _terminal_star(
    diag: np.ndarray, basis: np.ndarray, sites: np.ndarray, phonon: bool, statistics: Statistics
) -> Optional[DiscreteStar]:
    rest = null_space(basis)
    if rest.shape[1] == 0:
        return None
    energies, rotation = np.linalg.eigh(rest.T @ (diag[:, None] * rest))
    coupling = rotation.T @ (rest.T @ (diag * basis[-1]))
    if phonon:
        energies = np.sqrt(np.clip(energies, 0.0, None))
        with np.errstate(divide="ignore", invalid="ignore"):
            coupling = np.nan_to_num(np.abs(coupling) / (2.0 * np.sqrt(sites[-1] * energies)))
    return DiscreteStar(energies, np.abs(coupling), statistics)


def lanczos_chain(star: DiscreteStar, modes: int, phonon: bool = False, strict: bool = False) -> ChainCoefficients:
    """Tridiagonalize a star into its first `modes` chain sites."""
    if modes < 1 or modes > len(star):
        raise ValidationError(f"chain length {modes} must lie in [1, {len(star)}]")
    diag, seed = _quadratic_form(star, phonon)
    basis, alphas, betas, breakdown = _lanczos(diag, seed, modes)
    if breakdown:
        message = f"Lanczos breakdown after {len(alphas)} of {modes} sites"
        if strict:
            raise Breakdown(message, step=len(alphas))
        console.log(f"[yellow]{message}[/yellow]")

    alphas_arr = np.array(alphas)
    norm = float(np.linalg.norm(seed))
    if phonon:
        sites = np.sqrt(np.clip(alphas_arr, 0.0, None))
        hops = [norm / math.sqrt(2.0 * sites[0])]
        hops += [b / (2.0 * math.sqrt(sites[i] * sites[i + 1])) for i, b in enumerate(betas)]
    else:
        sites = alphas_arr
        hops = [norm] + list(betas)

    terminal = None if breakdown else _terminal_star(diag, basis, sites, phonon, star.statistics)
    return ChainCoefficients(
        site_energies=sites,
        hop_couplings=np.array(hops),
        terminal_residual=terminal,
        breakdown=breakdown,
        statistics=star.statistics,
    )


def bogoliubov_transform(star: DiscreteStar, phonon: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """(U, V) with new modes b_q = sum_k U_kq a_k + V_kq a_k^dagger; first column follows the seed."""
    diag, seed = _quadratic_form(star, phonon)
    basis, _, _, _ = _lanczos(diag, seed, len(star))
    rest = null_space(basis)
    orthogonal = np.hstack([basis.T, rest]) if rest.size else basis.T
    if not phonon:
        return orthogonal, np.zeros_like(orthogonal)
    frequencies = np.sqrt(np.einsum("kq,k,kq->q", orthogonal, diag, orthogonal))
    ratio = np.sqrt(star.mode_energies[:, None] / frequencies[None, :])
    u = 0.5 * (ratio + 1.0 / ratio) * orthogonal
    v = 0.5 * (1.0 / ratio - ratio) * orthogonal
    return u, v


def symplectic_defect(u: np.ndarray, v: np.ndarray, bosonic: bool) -> float:
    sign = -1.0 if bosonic else 1.0
    eye = np.eye(u.shape[0])
    normal = u @ u.conj().T + sign * (v @ v.conj().T) - eye
    anomalous = u @ v.T + sign * (v @ u.T)
    return float(max(np.max(np.abs(normal)), np.max(np.abs(anomalous))))

#!/usr/bin/env python3
from __future__ import annotations

import math
import string
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import logm

from ..config import Config
from ..errors import TruncationNotConverged, ValidationError
from .operators import HilbertSpace, OperatorMatrix
from .supersystem import Supersystem, SupersystemSpec, TlsRcSpec, TripleDotSpec, build_supersystem


@dataclass(frozen=True, eq=False)
class GibbsState:
    space: HilbertSpace
    beta: float
    density: OperatorMatrix
    mu: float = 0.0

    @property
    def populations(self) -> np.ndarray:
        return np.real(np.diag(self.density.entries))


def _projector(vectors: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (vectors * weights[None, :]) @ vectors.conj().T


def gibbs(
    h: OperatorMatrix,
    beta: float,
    mu: float = 0.0,
    number: Optional[OperatorMatrix] = None,
) -> GibbsState:
    """exp(-beta (H - mu N)) / Z from the eigen-decomposition, shifted by the lowest level."""
    if not h.hermitian:
        raise ValidationError("Gibbs states need a Hermitian Hamiltonian")
    if beta < 0 or math.isnan(beta):
        raise ValidationError("beta must be nonnegative")
    generator = h.entries
    if number is not None and mu != 0.0:
        generator = generator - mu * number.entries
    energies, vectors = np.linalg.eigh(generator)

    if math.isinf(beta):
        spread = max(1.0, float(np.max(np.abs(energies))))
        ground = energies <= energies[0] + 1e-10 * spread
        weights = ground.astype(float) / np.count_nonzero(ground)
    else:
        weights = np.exp(-beta * (energies - energies[0]))
        weights /= weights.sum()
    rho = _projector(vectors, weights)
    rho = 0.5 * (rho + rho.conj().T)
    return GibbsState(h.space, beta, OperatorMatrix(h.space, rho, True), mu)


def partial_trace(rho: OperatorMatrix, keep: Sequence[str]) -> OperatorMatrix:
    space = rho.space
    kept = sorted(space.index(label) for label in keep)
    dims = space.dims
    n = len(dims)
    letters = string.ascii_letters
    rows = list(letters[:n])
    cols = list(letters[n : 2 * n])
    for i in range(n):
        if i not in kept:
            cols[i] = rows[i]
    out = "".join(rows[i] for i in kept) + "".join(cols[i] for i in kept)
    tensor = rho.entries.reshape(dims + dims)
    reduced = np.einsum(f"{''.join(rows)}{''.join(cols)}->{out}", tensor)
    sub = space.subspace([space.labels[i] for i in kept])
    size = sub.total_dim
    return OperatorMatrix(sub, reduced.reshape(size, size), rho.hermitian)


def trace_distance(a: OperatorMatrix, b: OperatorMatrix) -> float:
    diff = a.entries - b.entries
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))


def _system_label(system: Supersystem) -> str:
    return "system" if isinstance(system.spec, TlsRcSpec) else "d"


def mean_force_state(spec: SupersystemSpec, beta: float, mu: float = 0.0) -> OperatorMatrix:
    """Tr_RC of the supersystem Gibbs state; `mu` is the lead chemical potential for the dot."""
    if isinstance(spec, TripleDotSpec) and spec.lam_l > 0 and spec.lam_r > 0:
        raise ValidationError("mean-force states are defined for a single reservoir")
    if isinstance(spec, TlsRcSpec) and spec.n_max is None and spec.beta is None:
        spec = replace(spec, beta=beta)
    system = build_supersystem(spec)
    state = gibbs(system.hamiltonian, beta, mu, system.number)
    return partial_trace(state.density, [_system_label(system)])


def hamiltonian_of_mean_force(spec: SupersystemSpec, beta: float, mu: float = 0.0) -> OperatorMatrix:
    """-1/beta log[Tr_RC e^{-beta H'} / Tr_RC e^{-beta H_RC}]; grand-canonical when mu is set."""
    if not 0 < beta < math.inf:
        raise ValidationError("the mean-force Hamiltonian needs a finite positive beta")
    if isinstance(spec, TlsRcSpec) and spec.n_max is None and spec.beta is None:
        spec = replace(spec, beta=beta)
    system = build_supersystem(spec)
    generator = system.hamiltonian.entries
    rc = system.parts["rc"].entries
    if system.number is not None and mu != 0.0:
        generator = generator - mu * system.number.entries
        rc = rc - mu * (system.number.entries - _local_number(system))

    energies, vectors = np.linalg.eigh(generator)
    shift = energies[0]
    weights = np.exp(-beta * (energies - shift))
    unnormalized = OperatorMatrix(system.space, _projector(vectors, weights), True)
    reduced = partial_trace(unnormalized, [_system_label(system)]).entries

    # the embedded RC Hamiltonian repeats each bath level once per system level
    levels = system.parts["system_local"].dim
    bath = np.sum(np.exp(-beta * (np.linalg.eigvalsh(rc) - shift))) / levels
    log_reduced = logm(0.5 * (reduced + reduced.conj().T))
    h_star = -(log_reduced - math.log(bath) * np.eye(levels)) / beta
    local = system.parts["system_local"].space
    return OperatorMatrix(local, 0.5 * (h_star + h_star.conj().T), True)


def _local_number(system: Supersystem) -> np.ndarray:
    d = system.parts["d"].entries
    return d.conj().T @ d


def check_truncation(spec: TlsRcSpec, beta: float, tol: Optional[float] = None) -> int:
    """Accept n_max only if 1.5x the truncation leaves bottom-half populations unchanged."""
    tol = Config.TRUNCATION_POPULATION_TOL if tol is None else tol
    if spec.n_max is None:
        spec = replace(spec, beta=beta)
    n_max = spec.resolved_n_max()
    base = build_supersystem(replace(spec, n_max=n_max))
    larger = build_supersystem(replace(spec, n_max=int(math.ceil(1.5 * n_max))))
    p_base = _level_populations(base, beta)
    p_large = _level_populations(larger, beta)
    half = max(1, p_base.size // 2)
    drift = float(np.max(np.abs(p_base[:half] - p_large[:half])))
    if drift >= tol:
        raise TruncationNotConverged(
            f"n_max={n_max}: bottom-half populations move by {drift:.3e} when enlarged by 50%"
        )
    return n_max


def _level_populations(system: Supersystem, beta: float) -> np.ndarray:
    energies = np.linalg.eigvalsh(system.hamiltonian.entries)
    if math.isinf(beta):
        weights = (energies <= energies[0] + 1e-10).astype(float)
    else:
        weights = np.exp(-beta * (energies - energies[0]))
    return weights / weights.sum()

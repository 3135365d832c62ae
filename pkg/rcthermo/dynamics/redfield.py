#!/usr/bin/env python3
"""Non-secular Born-Markov (Redfield) generators in the supersystem eigenbasis.

Density matrices are vectorized column-stacked, so A X B maps to kron(B^T, A).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import digamma, expit

from ..config import Config
from ..errors import (
    DegenerateBasisWarning,
    NonUniqueSteadyState,
    NotRelaxing,
    PositivityViolation,
    ValidationError,
)
from ..mapping.specdens import SpectralDensity, Statistics, cauchy_pv, evaluate
from ..quantum.operators import OperatorMatrix
from ..ui import console

KERNEL_TOL = 1e-12
RELAX_TOL = 1e-10
POSITIVITY_TOL = 1e-8
# Bose factors below this value of |beta*omega| use the linear small-frequency limit.
BOSE_SMALL = 1e-8


@dataclass(frozen=True, eq=False)
class ReservoirSpec:
    name: str
    beta: float
    residual_density: SpectralDensity
    coupling_op: OperatorMatrix
    mu: Optional[float] = None

    def __post_init__(self) -> None:
        if not self.beta > 0:
            raise ValidationError(f"reservoir '{self.name}' needs beta > 0")
        fermionic = self.statistics is Statistics.FERMIONIC_FULL_AXIS
        if fermionic and self.mu is None:
            raise ValidationError(f"fermionic reservoir '{self.name}' needs a chemical potential")

    @property
    def statistics(self) -> Statistics:
        return self.residual_density.statistics

    @property
    def fermionic(self) -> bool:
        return self.statistics is Statistics.FERMIONIC_FULL_AXIS


@dataclass(frozen=True, eq=False)
class Liouvillian:
    generator: np.ndarray
    attachments: List[ReservoirSpec]
    energies: np.ndarray
    basis: np.ndarray
    hamiltonian: OperatorMatrix
    dissipators: Dict[str, np.ndarray] = field(default_factory=dict)
    lamb_shift: bool = True

    @property
    def dim(self) -> int:
        return int(self.energies.size)

    def to_eigenbasis(self, op: np.ndarray) -> np.ndarray:
        return self.basis.conj().T @ op @ self.basis

    def from_eigenbasis(self, op: np.ndarray) -> np.ndarray:
        return self.basis @ op @ self.basis.conj().T

    def apply(self, rho: np.ndarray, piece: Optional[str] = None) -> np.ndarray:
        """L[rho] (or one reservoir's dissipator) for rho given in the original basis."""
        matrix = self.generator if piece is None else self.dissipators[piece]
        local = self.to_eigenbasis(rho)
        out = (matrix @ local.reshape(-1, order="F")).reshape(self.dim, self.dim, order="F")
        return self.from_eigenbasis(out)


@dataclass
class SteadyReport:
    state: OperatorMatrix
    matter_currents: Dict[str, float]
    energy_currents: Dict[str, float]
    residual_norm: float
    min_eigenvalue: float

    def heat_currents(self, attachments: Sequence[ReservoirSpec]) -> Dict[str, float]:
        return {
            r.name: self.energy_currents[r.name] - (r.mu or 0.0) * self.matter_currents[r.name]
            for r in attachments
        }

    def to_dict(self) -> dict:
        return {
            "matter_currents": dict(self.matter_currents),
            "energy_currents": dict(self.energy_currents),
            "residual_norm": self.residual_norm,
            "min_eigenvalue": self.min_eigenvalue,
            "units": "energies in the reference scale, hbar = 1",
        }


# ----------------------------------------------------------------------
# Half-sided correlation functions
# ----------------------------------------------------------------------


def _fermi(beta: float, mu: float, omega):
    return expit(-beta * (np.asarray(omega, dtype=float) - mu))


def _bose_weight(d: SpectralDensity, beta: float, omega: np.ndarray) -> np.ndarray:
    """Gamma_odd(w) (1 + n(w)) on the full axis."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    bx = beta * omega
    small = np.abs(bx) < BOSE_SMALL
    safe = np.where(small, 1.0, bx)
    out = evaluate(d, omega) / -np.expm1(-safe)
    if np.any(small):
        probe = max(d.scale * 1e-6, 1e-12)
        slope = evaluate(d, probe) / probe
        out = np.where(small, slope / beta, out)
    return out


def _pv(func: Callable, d: SpectralDensity, lo: float, hi: float, omega: float, centers: Sequence[float], tol: float) -> float:
    """(1/2 pi) PV integral of func(w)/(w - omega)."""
    points = []
    if d.is_grid:
        points = [d.omega[0], d.omega[-1]]
    return 0.5 * cauchy_pv(
        func,
        lo,
        hi,
        omega,
        tol=tol,
        floor=d.peak,
        scale=d.scale,
        centers=list(centers) + [d.center],
        points=points,
        rigid=d.rigid,
    )


class _Correlations:
    """Rates and Lamb shifts of one reservoir, evaluated on a set of Bohr frequencies."""

    def __init__(self, reservoir: ReservoirSpec, lamb_shift: bool, tol: float) -> None:
        self.r = reservoir
        self.d = reservoir.residual_density
        self.lamb_shift = lamb_shift
        self.tol = tol

    def _fermionic_shift(self, omega: float, occupied: bool) -> float:
        r, d = self.r, self.d
        beta, mu = r.beta, r.mu
        lo, hi = d.support
        if d.flat_value is not None and not math.isfinite(lo) and not math.isfinite(hi):
            # bandwidth constants cancel between the c and c^dagger channels
            value = d.flat_value / (2.0 * math.pi) * float(np.real(digamma(0.5 + 1j * beta * (omega - mu) / (2.0 * math.pi))))
            return value if occupied else -value
        if occupied:
            func = lambda w: evaluate(d, w) * _fermi(beta, mu, w)
        else:
            func = lambda w: evaluate(d, w) * _fermi(-beta, mu, w)
        return _pv(func, d, lo, hi, omega, [mu], self.tol)

    def absorb(self, x: np.ndarray) -> np.ndarray:
        """G_12(x): pairs (c, c^dagger), fed by occupied lead states at y = -x."""
        y = -x
        real = 0.5 * evaluate(self.d, y) * _fermi(self.r.beta, self.r.mu, y)
        if not self.lamb_shift:
            return real.astype(complex)
        imag = np.array([self._fermionic_shift(v, True) for v in y])
        return real + 1j * imag

    def emit(self, x: np.ndarray) -> np.ndarray:
        """G_21(x): pairs (c^dagger, c), fed by empty lead states at x."""
        real = 0.5 * evaluate(self.d, x) * (1.0 - _fermi(self.r.beta, self.r.mu, x))
        if not self.lamb_shift:
            return real.astype(complex)
        imag = -np.array([self._fermionic_shift(v, False) for v in x])
        return real + 1j * imag

    def bosonic(self, x: np.ndarray) -> np.ndarray:
        """G(x) = J(x)/2 - i (1/2 pi) PV int J(w)/(w - x) with J = Gamma_odd (1 + n)."""
        d, beta = self.d, self.r.beta
        real = 0.5 * _bose_weight(d, beta, x)
        if not self.lamb_shift:
            return real.astype(complex)
        hi = d.support[1]
        func = lambda w: _bose_weight(d, beta, w)
        imag = np.array([_pv(func, d, -hi, hi, v, [0.0], self.tol) for v in x])
        return real - 1j * imag


# ----------------------------------------------------------------------
# Assembly
# ----------------------------------------------------------------------


def _bohr_table(energies: np.ndarray, tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """Unique Bohr frequencies E_b - E_a (binned) and the index map into them."""
    diffs = energies[None, :] - energies[:, None]
    flat = diffs.ravel()
    order = np.argsort(flat, kind="stable")
    labels = np.empty(flat.size, dtype=int)
    centers: List[float] = []
    start = 0
    jitter = 0.0
    for i in range(1, flat.size + 1):
        if i == flat.size or flat[order[i]] - flat[order[start]] > tol:
            group = flat[order[start:i]]
            labels[order[start:i]] = len(centers)
            centers.append(float(group.mean()))
            jitter = max(jitter, float(group[-1] - group[0]))
            start = i
    scale = max(1.0, float(np.max(np.abs(energies))))
    if jitter > 1e-13 * scale:
        message = f"Bohr frequencies closer than {tol:.2e} were merged (spread {jitter:.2e})"
        warnings.warn(message, DegenerateBasisWarning, stacklevel=3)
        console.log(f"[yellow]{message}[/yellow]")
    return np.array(centers), labels.reshape(diffs.shape)


def _dissipator(pairs: List[Tuple[np.ndarray, np.ndarray]], n: int) -> np.ndarray:
    """Sum over (A, M) of M rho A - A M rho + A^dag rho M^dag - rho M^dag A^dag."""
    eye = np.eye(n)
    out = np.zeros((n * n, n * n), dtype=complex)
    for a, m in pairs:
        a_dag = a.conj().T
        m_dag = m.conj().T
        out += np.kron(a.T, m)
        out -= np.kron(eye, a @ m)
        out += np.kron(m.conj(), a_dag)
        out -= np.kron((m_dag @ a_dag).T, eye)
    return out


def _validity(reservoir: ReservoirSpec) -> None:
    d = reservoir.residual_density
    width = 0.5 * d.flat_value if d.flat_value is not None else None
    if width is not None and reservoir.beta * width > Config.VALIDITY_BOUND:
        console.log(
            f"[yellow]reservoir '{reservoir.name}': beta*delta = {reservoir.beta * width:.3g} "
            f"exceeds the validity bound {Config.VALIDITY_BOUND:g}[/yellow]"
        )


def build_redfield(
    h: OperatorMatrix,
    attachments: Sequence[ReservoirSpec],
    lamb_shift: Optional[bool] = None,
    tol: Optional[float] = None,
    check_validity: bool = True,
) -> Liouvillian:
    if not h.hermitian:
        raise ValidationError("the supersystem Hamiltonian must be Hermitian")
    names = [r.name for r in attachments]
    if len(set(names)) != len(names):
        raise ValidationError(f"reservoir names must be unique, got {names}")
    lamb_shift = Config.is_lamb_shift_enabled() if lamb_shift is None else lamb_shift
    tol = Config.get_tol() if tol is None else tol

    energies, basis = np.linalg.eigh(h.entries)
    n = energies.size
    bin_tol = Config.DEGENERACY_TOL * max(1.0, float(np.linalg.norm(h.entries, 2)))
    freqs, index = _bohr_table(energies, bin_tol)

    eye = np.eye(n)
    hd = np.diag(energies)
    generator = -1j * (np.kron(eye, hd) - np.kron(hd.T, eye))
    dissipators: Dict[str, np.ndarray] = {}
    for reservoir in attachments:
        if reservoir.coupling_op.dim != n:
            raise ValidationError(f"coupling of '{reservoir.name}' does not act on the supersystem")
        if check_validity:
            _validity(reservoir)
        a = basis.conj().T @ reservoir.coupling_op.entries @ basis
        corr = _Correlations(reservoir, lamb_shift, tol)
        # matrix element (a, b) of M pairs with the Bohr frequency E_b - E_a
        if reservoir.fermionic:
            a_dag = a.conj().T
            g_abs = corr.absorb(freqs)[index]
            g_emit = corr.emit(freqs)[index]
            pairs = [(a, a_dag * g_abs), (a_dag, a * g_emit)]
        else:
            g = corr.bosonic(freqs)[index]
            pairs = [(a, a * g)]
        piece = _dissipator(pairs, n)
        dissipators[reservoir.name] = piece
        generator = generator + piece

    return Liouvillian(
        generator=generator,
        attachments=list(attachments),
        energies=energies,
        basis=basis,
        hamiltonian=h,
        dissipators=dissipators,
        lamb_shift=lamb_shift,
    )


def steady_state(
    liouvillian: Liouvillian,
    number: Optional[OperatorMatrix] = None,
) -> SteadyReport:
    """Kernel of the generator, normalized to unit trace, with reservoir-resolved currents."""
    n = liouvillian.dim
    gen = liouvillian.generator
    _, singular, vh = np.linalg.svd(gen)
    scale = max(1.0, float(singular[0]))
    if singular.size > 1 and singular[-2] <= KERNEL_TOL * scale:
        raise NonUniqueSteadyState(
            f"generator kernel is degenerate (second smallest singular value {singular[-2]:.3e})"
        )
    vec = vh[-1].conj()
    rho = vec.reshape(n, n, order="F")
    trace = np.trace(rho)
    if abs(trace) == 0.0:
        raise NonUniqueSteadyState("kernel vector has zero trace")
    rho = rho / trace
    rho = 0.5 * (rho + rho.conj().T)

    if n * n <= Config.SPECTRUM_CHECK_MAX:
        spectrum = np.linalg.eigvals(gen)
        if np.max(spectrum.real) > RELAX_TOL * scale:
            raise NotRelaxing(f"generator eigenvalue with real part {np.max(spectrum.real):.3e}")

    min_eig = float(np.min(np.linalg.eigvalsh(rho)))
    if min_eig < -POSITIVITY_TOL:
        raise PositivityViolation(f"steady state has eigenvalue {min_eig:.3e}")

    vec = rho.reshape(-1, order="F")
    residual = float(np.linalg.norm(gen @ vec))
    h_diag = np.diag(liouvillian.energies)
    n_local = None if number is None else liouvillian.to_eigenbasis(number.entries)
    matter: Dict[str, float] = {}
    energy: Dict[str, float] = {}
    for name, piece in liouvillian.dissipators.items():
        drho = (piece @ vec).reshape(n, n, order="F")
        energy[name] = float(np.real(np.trace(h_diag @ drho)))
        matter[name] = 0.0 if n_local is None else float(np.real(np.trace(n_local @ drho)))

    state = OperatorMatrix(liouvillian.hamiltonian.space, liouvillian.from_eigenbasis(rho), True)
    return SteadyReport(state, matter, energy, residual, min_eig)


def entropy_production(report: SteadyReport, attachments: Sequence[ReservoirSpec]) -> float:
    """-sum_a beta_a Qdot_a with Qdot_a the heat flowing into the supersystem from reservoir a."""
    heat = report.heat_currents(attachments)
    return float(-sum(r.beta * heat[r.name] for r in attachments))

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import expit

from rcthermo.catalog import create_family
from rcthermo.errors import DimensionCap, TruncationNotConverged, UnknownLabel, ValidationError
from rcthermo.mapping.chain import discretize_star
from rcthermo.quantum import (
    HilbertSpace,
    OperatorMatrix,
    TlsRcSpec,
    TripleDotSpec,
    adaptive_n_max,
    build_supersystem,
    check_truncation,
    gibbs,
    hamiltonian_of_mean_force,
    load_operator,
    mean_force_state,
    partial_trace,
    save_operator,
    sector_energies,
    trace_distance,
    transition_energies,
)
from rcthermo.quantum.operators import SIGMA_Z


def test_dimension_cap():
    with pytest.raises(DimensionCap) as excinfo:
        HilbertSpace((("system", 2), ("rc", 4097)))
    assert excinfo.value.exit_code == 2


def test_unknown_factor_label():
    space = HilbertSpace((("system", 2), ("rc", 3)))
    with pytest.raises(UnknownLabel):
        space.index("bath")


def test_hermitian_flag_is_checked():
    space = HilbertSpace((("system", 2),))
    with pytest.raises(ValidationError):
        OperatorMatrix(space, np.array([[0.0, 1.0], [0.0, 0.0]]), hermitian=True)


def test_operator_file_keeps_entries(tmp_path):
    system = build_supersystem(TlsRcSpec(1.0, 0.4, 1.3, n_max=4))
    path = save_operator(tmp_path / "h", system.hamiltonian, note="tls")
    loaded = load_operator(path)
    assert path.suffix == ".npz"
    assert loaded.space == system.space
    assert loaded.hermitian
    assert loaded.metadata["note"] == "tls"
    assert np.array_equal(loaded.entries, system.hamiltonian.entries)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mu": 1.0, "lam": -0.1, "omega": 1.0},
        {"mu": 1.0, "lam": 0.1, "omega": 0.0},
        {"mu": math.nan, "lam": 0.1, "omega": 1.0},
        {"mu": 1.0, "lam": 0.1, "omega": 1.0, "s_choice": "sy"},
        {"mu": 1.0, "lam": 0.1, "omega": 1.0, "n_max": 1},
    ],
)
def test_tls_spec_validation(kwargs):
    with pytest.raises(ValidationError):
        TlsRcSpec(**kwargs)


def test_adaptive_truncation_needs_a_temperature():
    with pytest.raises(ValidationError):
        build_supersystem(TlsRcSpec(1.0, 0.1, 1.0))


def test_adaptive_truncation_grows_with_coupling_and_temperature():
    assert adaptive_n_max(1.0, 0.5, 1.0) <= adaptive_n_max(1.0, 2.0, 1.0)
    assert adaptive_n_max(1.0, 0.5, 2.0) <= adaptive_n_max(1.0, 0.5, 0.5)
    assert adaptive_n_max(1.0, 0.0, math.inf) >= 2


def test_tls_supersystem_layout():
    system = build_supersystem(TlsRcSpec(1.0, 0.3, 2.0, n_max=5))
    assert system.space.dims == [2, 6]
    assert system.system_label == "system"
    b = np.diag(np.sqrt(np.arange(1, 6)), 1)
    assert np.allclose(system.couplings[0].entries, np.kron(np.eye(2), b + b.T))


def test_renormalization_shifts_by_lambda_squared_over_omega():
    lam, omega = 0.6, 1.5
    with_term = build_supersystem(TlsRcSpec(1.0, lam, omega, n_max=4))
    without = build_supersystem(TlsRcSpec(1.0, lam, omega, n_max=4, include_renormalization=False))
    diff = with_term.hamiltonian.entries - without.hamiltonian.entries
    assert np.allclose(diff, lam * lam / omega * np.eye(10))


def test_triple_dot_transition_energies():
    gamma, delta, eps = 1.2, 0.5, 2.0
    lam = math.sqrt(gamma * delta / 2.0)
    system = build_supersystem(TripleDotSpec(eps, lam, lam, eps, eps))
    split = math.sqrt(gamma * delta)
    found = np.sort(transition_energies(system))
    assert found == pytest.approx([eps - split, eps, eps + split], rel=1e-10)


def test_triple_dot_conserves_particles():
    system = build_supersystem(TripleDotSpec(0.5, 0.3, 0.2, 0.1, -0.4))
    h, n = system.hamiltonian.entries, system.number.entries
    assert np.allclose(h @ n, n @ h)
    assert sector_energies(system, 0) == pytest.approx([0.0])
    assert sector_energies(system, 3) == pytest.approx([0.5 + 0.1 - 0.4])


def test_sectors_need_a_number_operator():
    with pytest.raises(ValidationError):
        sector_energies(build_supersystem(TlsRcSpec(1.0, 0.3, 1.0, n_max=3)), 1)


def test_gibbs_state_is_a_density_matrix():
    system = build_supersystem(TlsRcSpec(1.0, 0.5, 1.3, n_max=6))
    rho = gibbs(system.hamiltonian, 0.7).density
    assert rho.trace() == pytest.approx(1.0)
    assert np.allclose(rho.entries, rho.entries.conj().T)
    assert np.min(np.linalg.eigvalsh(rho.entries)) > -1e-12


def test_zero_temperature_gibbs_state_is_the_ground_state():
    system = build_supersystem(TlsRcSpec(1.0, 0.0, 1.0, n_max=3))
    state = gibbs(system.hamiltonian, math.inf)
    populations = state.populations
    # |down, 0> is the unique ground state
    assert populations[4] == pytest.approx(1.0)


def test_negative_beta_is_rejected():
    system = build_supersystem(TlsRcSpec(1.0, 0.1, 1.0, n_max=3))
    with pytest.raises(ValidationError):
        gibbs(system.hamiltonian, -1.0)


def test_uncoupled_partial_trace_is_the_local_gibbs_state():
    mu, beta = 1.4, 0.8
    system = build_supersystem(TlsRcSpec(mu, 0.0, 1.0, n_max=4))
    reduced = partial_trace(gibbs(system.hamiltonian, beta).density, ["system"])
    weights = np.exp(-beta * 0.5 * mu * np.array([1.0, -1.0]))
    assert np.allclose(reduced.entries, np.diag(weights / weights.sum()))


def test_trace_distance():
    space = HilbertSpace((("system", 2),))
    up = OperatorMatrix(space, np.diag([1.0, 0.0]), True)
    mixed = OperatorMatrix(space, np.diag([0.5, 0.5]), True)
    assert trace_distance(up, mixed) == pytest.approx(0.5)
    assert trace_distance(up, up) == 0.0


def test_uncoupled_mean_force_hamiltonian_is_bare():
    h = hamiltonian_of_mean_force(TlsRcSpec(1.0, 0.0, 1.0, n_max=6), beta=1.2)
    assert np.allclose(h.entries, 0.5 * SIGMA_Z, atol=1e-10)


def test_mean_force_hamiltonian_reproduces_the_reduced_state():
    spec = TlsRcSpec(1.0, 0.7, 1.3, n_max=10)
    beta = 0.9
    h = hamiltonian_of_mean_force(spec, beta)
    weights = gibbs(h, beta).density
    assert trace_distance(weights, mean_force_state(spec, beta)) < 1e-10


def test_mean_force_hamiltonian_needs_finite_beta():
    with pytest.raises(ValidationError):
        hamiltonian_of_mean_force(TlsRcSpec(1.0, 0.3, 1.0, n_max=4), math.inf)


def test_mean_force_needs_a_single_lead():
    with pytest.raises(ValidationError):
        mean_force_state(TripleDotSpec(0.3, 0.1, 0.1, 0.0, 0.0), beta=1.0)


def test_mean_force_occupation_matches_the_exact_lead():
    gamma, delta, eps_d, beta = 1.0, 0.01, 0.3, 1.0
    lam = math.sqrt(gamma * delta / 2.0)
    lead = create_family("lorentzian").density({"gamma": gamma, "delta": delta, "eps": 0.0})
    star = discretize_star(lead, 400)
    single = np.diag(np.concatenate(([eps_d], star.mode_energies)))
    single[0, 1:] = single[1:, 0] = star.couplings
    energies, vectors = np.linalg.eigh(single)
    exact = float((vectors[0] ** 2) @ expit(-beta * energies))

    reduced = mean_force_state(TripleDotSpec(eps_d, lam, 0.0, 0.0, 0.0), beta)
    assert np.real(reduced.entries[1, 1]) == pytest.approx(exact, abs=5e-3)


def test_truncation_check_accepts_the_adaptive_choice():
    spec = TlsRcSpec(1.0, 0.3, 1.0)
    n_max = check_truncation(spec, beta=1.0)
    assert n_max == adaptive_n_max(1.0, 0.3, 1.0)


def test_truncation_check_flags_a_short_ladder():
    with pytest.raises(TruncationNotConverged):
        check_truncation(TlsRcSpec(1.0, 2.0, 1.0, n_max=2), beta=1.0)

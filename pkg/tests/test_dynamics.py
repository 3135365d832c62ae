from __future__ import annotations

import numpy as np
import pytest

from rcthermo.catalog import create_family
from rcthermo.dynamics import ReservoirSpec, build_redfield, entropy_production, steady_state
from rcthermo.engines import solve_rc
from rcthermo.errors import ValidationError
from rcthermo.quantum import OperatorMatrix, TlsRcSpec, TripleDotSpec, build_supersystem, gibbs, trace_distance
from rcthermo.transport import SetModel


def weak_bath():
    return create_family("rubin").density({"gamma": 1e-7, "wm": 20.0})


def flat_lead(width=0.02):
    return create_family("flat").density({"value": width})


def _triple_dot_spec():
    return TripleDotSpec(1.0, 0.1, 0.1, 1.0, 1.0)


@pytest.mark.parametrize("trial", range(3))
def test_single_bath_relaxes_to_gibbs(rng, trial):
    beta, lam = rng.uniform(0.5, 2.0), rng.uniform(0.1, 0.5)
    system = build_supersystem(TlsRcSpec(1.0, lam, 1.0, n_max=5))
    bath = ReservoirSpec("bath", beta, weak_bath(), system.couplings[0])
    report = steady_state(build_redfield(system.hamiltonian, [bath], check_validity=False))
    assert trace_distance(report.state, gibbs(system.hamiltonian, beta).density) <= 1e-6
    assert report.state.trace() == pytest.approx(1.0)
    assert report.min_eigenvalue > -1e-8
    assert report.energy_currents["bath"] == pytest.approx(0.0, abs=1e-12)


def test_lamb_shift_can_be_switched_off():
    system = build_supersystem(TlsRcSpec(1.0, 0.3, 1.0, n_max=4))
    bath = ReservoirSpec("bath", 1.0, weak_bath(), system.couplings[0])
    liouvillian = build_redfield(system.hamiltonian, [bath], lamb_shift=False, check_validity=False)
    assert not liouvillian.lamb_shift
    assert set(liouvillian.dissipators) == {"bath"}


def test_fermionic_reservoir_needs_a_chemical_potential():
    system = build_supersystem(_triple_dot_spec())
    with pytest.raises(ValidationError):
        ReservoirSpec("L", 1.0, flat_lead(), system.couplings[0])


def test_reservoir_needs_positive_beta():
    system = build_supersystem(TlsRcSpec(1.0, 0.3, 1.0, n_max=3))
    with pytest.raises(ValidationError):
        ReservoirSpec("bath", 0.0, weak_bath(), system.couplings[0])


def test_reservoir_names_are_unique():
    system = build_supersystem(TlsRcSpec(1.0, 0.3, 1.0, n_max=3))
    bath = ReservoirSpec("bath", 1.0, weak_bath(), system.couplings[0])
    with pytest.raises(ValidationError):
        build_redfield(system.hamiltonian, [bath, bath])


def test_redfield_needs_a_hermitian_hamiltonian():
    system = build_supersystem(TlsRcSpec(1.0, 0.3, 1.0, n_max=3))
    skewed = OperatorMatrix(system.space, system.hamiltonian.entries + np.triu(np.ones((8, 8)), 1))
    bath = ReservoirSpec("bath", 1.0, weak_bath(), system.couplings[0])
    with pytest.raises(ValidationError):
        build_redfield(skewed, [bath])


def test_equilibrium_transistor_carries_no_current():
    model = SetModel.symmetric(0.0, 1.0, beta_left=1.0, beta_right=1.0)
    result = solve_rc(model)
    assert result.matter_current == pytest.approx(0.0, abs=1e-10)
    assert result.energy_current == pytest.approx(0.0, abs=1e-10)


def test_equal_leads_produce_no_entropy():
    system = build_supersystem(_triple_dot_spec())
    leads = [
        ReservoirSpec(name, 1.0, flat_lead(), coupling, mu=0.0)
        for name, coupling in zip(("L", "R"), system.couplings)
    ]
    report = steady_state(build_redfield(system.hamiltonian, leads, lamb_shift=False), system.number)
    assert sum(report.matter_currents.values()) == pytest.approx(0.0, abs=1e-12)
    assert entropy_production(report, leads) == pytest.approx(0.0, abs=1e-10)


@pytest.mark.parametrize("voltage", [0.3, 1.2])
def test_biased_transistor_conserves_current(voltage):
    result = solve_rc(SetModel.symmetric(voltage, 1.0))
    assert result.meta["conservation"] < 1e-8
    assert result.meta["entropy_production"] >= -1e-10
    assert result.power == pytest.approx(result.heat_left + result.heat_right)

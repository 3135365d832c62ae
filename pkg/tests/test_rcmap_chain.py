from __future__ import annotations

import math

import numpy as np
import pytest

from rcthermo.catalog import create_family
from rcthermo.errors import DegenerateDensity, Divergent, ValidationError
from rcthermo.mapping.chain import (
    DiscreteStar,
    bogoliubov_transform,
    discretize_star,
    lanczos_chain,
    symplectic_defect,
)
from rcthermo.mapping.rcmap import (
    MAPPINGS,
    default_mapping,
    fixed_point_deviation,
    map_particle,
    recurse,
)
from rcthermo.mapping.specdens import GridSpec, SpectralDensity, Statistics


def rubin(gamma=1.0, wm=1.0):
    return create_family("rubin").density({"gamma": gamma, "wm": wm})


def semicircle(gamma=1.0, delta=1.0, eps=0.0):
    return create_family("semicircle").density({"gamma": gamma, "delta": delta, "eps": eps})


def test_mapping_table():
    assert sorted(MAPPINGS) == ["fermionic", "particle", "phonon"]
    assert default_mapping(rubin()) == "phonon"
    assert default_mapping(semicircle()) == "fermionic"
    flat = SpectralDensity.grid([1.0, 2.0], [1.0, 1.0], Statistics.BOSONIC_HALF_AXIS)
    assert default_mapping(flat) == "particle"


def test_particle_mapping_of_a_box():
    omega = GridSpec(1000).samples((1.0, 3.0))
    d = SpectralDensity.grid(omega, np.ones_like(omega), Statistics.BOSONIC_HALF_AXIS, support=(1.0, 3.0))
    result = map_particle(d)
    assert result.lambda_sq == pytest.approx(1.0 / math.pi, rel=1e-9)
    assert result.rc_energy == pytest.approx(2.0, rel=1e-9)


def test_rubin_is_its_own_fixed_point():
    chain = recurse(rubin(), steps=2, grid_spec=GridSpec(2000))
    assert chain.site_energies == pytest.approx([1.0 / math.sqrt(2.0)] * 2, rel=1e-2)
    assert chain.fixed_point_deviation < 2e-2


def test_semicircle_is_its_own_fixed_point():
    chain = recurse(semicircle(gamma=2.0, delta=1.0, eps=0.5), steps=2, grid_spec=GridSpec(2000))
    assert chain.site_energies == pytest.approx([0.5, 0.5], abs=1e-3)
    # after one step the residual forgets gamma: lambda^2 = delta^2 / 4
    assert chain.hop_couplings[1] == pytest.approx(0.5, rel=1e-2)
    assert chain.fixed_point_deviation < 2e-2


@pytest.mark.slow
@pytest.mark.parametrize("density", [rubin(), semicircle(eps=0.3)], ids=["rubin", "semicircle"])
def test_fixed_points_hold_away_from_the_edges(density):
    chain = recurse(density, steps=3, grid_spec=GridSpec(8000))
    assert fixed_point_deviation(chain.residuals[-1], margin=0.05) < 1e-3


@pytest.mark.slow
def test_linear_rigid_flows_to_rubin():
    d = create_family("linear_rigid").density({"gamma": 1.0, "wm": 1.0})
    chain = recurse(d, steps=10, grid_spec=GridSpec(4000))
    assert fixed_point_deviation(chain.residuals[-1], margin=0.05) < 0.02


@pytest.mark.slow
def test_box_flows_to_semicircle():
    d = create_family("box").density({"gamma": 1.0, "delta": 5.0, "eps": 3.0})
    chain = recurse(d, steps=10, grid_spec=GridSpec(4000))
    assert chain.residuals[-1].support == pytest.approx((-2.0, 8.0))
    assert fixed_point_deviation(chain.residuals[-1], margin=0.05) < 0.02


def test_soft_densities_cannot_be_recursed():
    lorentzian = create_family("lorentzian").density({"gamma": 1.0, "delta": 0.5, "eps": 0.0})
    with pytest.raises(Divergent) as excinfo:
        recurse(lorentzian, steps=2)
    assert excinfo.value.step == 1
    assert excinfo.value.exit_code == 3


def test_recursion_needs_a_step():
    with pytest.raises(ValidationError):
        recurse(semicircle(), steps=0)


def test_mapping_must_match_statistics():
    with pytest.raises(ValidationError) as excinfo:
        recurse(semicircle(), steps=1, grid_spec=GridSpec(200), mapping="phonon")
    assert excinfo.value.step == 0


def test_zero_density_has_no_reaction_coordinate():
    d = SpectralDensity.grid([0.5, 1.0, 1.5], [0.0, 0.0, 0.0], Statistics.FERMIONIC_FULL_AXIS)
    with pytest.raises(DegenerateDensity):
        MAPPINGS["fermionic"](d)


def test_deviation_needs_a_sampled_density():
    with pytest.raises(ValidationError):
        fixed_point_deviation(rubin())


def test_discrete_fermionic_chain_matches_the_continuum():
    gamma, delta, eps = 1.0, 0.5, 0.3
    d = create_family("lorentzian").density({"gamma": gamma, "delta": delta, "eps": eps})
    chain = lanczos_chain(discretize_star(d, 400), modes=2)
    assert chain.site_energies[0] == pytest.approx(eps, rel=1e-3)
    assert chain.hop_couplings[0] == pytest.approx(math.sqrt(gamma * delta / 2.0), rel=1e-3)


def test_discrete_phonon_chain_matches_the_continuum():
    wm = 1.0
    chain = lanczos_chain(discretize_star(rubin(wm=wm), 400), modes=3, phonon=True)
    assert chain.site_energies[0] == pytest.approx(wm / math.sqrt(2.0), rel=1e-3)
    assert chain.hop_couplings[0] == pytest.approx(math.sqrt(wm / (16.0 * math.sqrt(2.0))), rel=1e-3)
    assert chain.site_energies[1] == pytest.approx(wm / math.sqrt(2.0), rel=1e-2)
    assert chain.hop_couplings[1] == pytest.approx(wm / (4.0 * math.sqrt(2.0)), rel=1e-2)


def test_chain_length_is_bounded_by_the_star():
    star = DiscreteStar(np.array([1.0, 2.0]), np.array([0.1, 0.2]))
    with pytest.raises(ValidationError):
        lanczos_chain(star, modes=3)


def test_full_chain_exhausts_the_star():
    star = DiscreteStar(np.array([1.0, 2.0, 3.0]), np.array([0.3, 0.2, 0.1]))
    chain = lanczos_chain(star, modes=3)
    assert len(chain) == 3
    assert chain.terminal_residual is None


def test_star_weights_reconstruct_the_zeroth_moment():
    d = semicircle(gamma=1.0, delta=2.0)
    star = discretize_star(d, 200)
    assert np.sum(star.weights) == pytest.approx(math.pi * 1.0 * 2.0 / 2.0, rel=1e-3)


def test_fermionic_transform_is_unitary():
    d = create_family("lorentzian").density({"gamma": 1.0, "delta": 1.0, "eps": 0.0})
    u, v = bogoliubov_transform(discretize_star(d, 400))
    assert not np.any(v)
    assert symplectic_defect(u, v, bosonic=False) < 1e-10


def test_phonon_transform_is_symplectic():
    omega = GridSpec(400).samples((0.5, 2.0))
    d = SpectralDensity.grid(omega, omega * (2.0 - omega), Statistics.BOSONIC_ODD, support=(0.5, 2.0))
    u, v = bogoliubov_transform(discretize_star(d, 400), phonon=True)
    assert np.any(v)
    assert symplectic_defect(u, v, bosonic=True) < 1e-10


@pytest.mark.slow
def test_rubin_transform_is_symplectic():
    u, v = bogoliubov_transform(discretize_star(rubin(), 400), phonon=True)
    assert symplectic_defect(u, v, bosonic=True) < 1e-10


def test_transform_first_column_follows_the_coupling():
    star = DiscreteStar(np.array([1.0, 2.0, 3.0]), np.array([0.3, 0.4, 0.0]))
    u, _ = bogoliubov_transform(star)
    assert np.allclose(np.abs(u[:, 0]), [0.6, 0.8, 0.0])

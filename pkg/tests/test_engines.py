from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from rcthermo.engines import (
    CellResult,
    EngineMapGrid,
    EngineMetrics,
    Mode,
    OttoConfig,
    RcCoupling,
    carnot_cop,
    carnot_efficiency,
    compare_grids,
    engine_metrics,
    mode_boundaries,
    otto_sweep,
    run_otto,
    sweep_map,
)
from rcthermo.engines.otto import LEDGER_KEYS
from rcthermo.errors import ValidationError
from rcthermo.transport import SetModel, TransportResult, currents

VARIANTS = [
    {"treatment": "weak"},
    {"treatment": "rc", "decoupling": "instantaneous"},
    {"treatment": "rc", "decoupling": "adiabatic"},
]


def otto(**kwargs):
    base = dict(
        mu_hot=2.0,
        mu_cold=1.2,
        beta_hot=1.0,
        beta_cold=2.0,
        rc_hot=RcCoupling(0.5, 1.3),
        rc_cold=RcCoupling(0.5, 1.3),
    )
    base.update(kwargs)
    return OttoConfig(**base)


def transport(power, heat_left, heat_right):
    return TransportResult(0.0, 0.0, power, heat_left, heat_right)


# ----------------------------------------------------------------------
# Continuous operation
# ----------------------------------------------------------------------


def test_carnot_bounds():
    assert carnot_efficiency(0.5, 1.0) == pytest.approx(0.5)
    assert carnot_cop(0.5, 1.0) == pytest.approx(1.0)


def test_engine_classification():
    metrics = engine_metrics(transport(0.1, -0.2, 0.3), 0.5, 1.0)
    assert metrics.mode is Mode.ENGINE
    assert metrics.efficiency == pytest.approx(1.0 / 3.0)
    assert metrics.cop is None
    assert metrics.entropy_production == pytest.approx(0.2 / 0.5 - 0.3)


def test_fridge_classification():
    metrics = engine_metrics(transport(-0.4, 0.2, 0.2), 0.5, 1.0)
    assert metrics.mode is Mode.FRIDGE
    assert metrics.cop == pytest.approx(0.5)


@pytest.mark.parametrize("values", [(0.0, 0.0, 0.0), (-0.4, -0.1, 0.5), (0.1, 0.2, -0.1)])
def test_everything_else_is_a_dud(values):
    assert engine_metrics(transport(*values), 0.5, 1.0).mode is Mode.DUD


def test_metrics_need_a_hotter_right_lead():
    with pytest.raises(ValidationError):
        engine_metrics(transport(0.1, 0.1, 0.1), 1.0, 0.5)


def test_weak_coupling_operating_map():
    template = SetModel.symmetric(0.0, 0.01)
    grid = sweep_map(template, [0.3, 1.2], [0.01], solver="exact", jobs=1)
    assert grid.modes()[:, 0].tolist() == [Mode.ENGINE, Mode.FRIDGE]
    engine = grid.cell(0, 0).metrics
    assert 0.0 < engine.efficiency <= carnot_efficiency(0.5, 1.0)
    assert not grid.failures
    assert [row["V"] for row in grid.rows()] == [0.3, 1.2]


def exact_modes(voltages, gamma):
    grid = sweep_map(SetModel.symmetric(0.0, 1.0), voltages, [gamma], solver="exact", jobs=1)
    assert not grid.failures
    return grid, grid.modes()[:, 0].tolist()


def engines_then_fridges(modes):
    engines = [i for i, mode in enumerate(modes) if mode is Mode.ENGINE]
    fridges = [i for i, mode in enumerate(modes) if mode is Mode.FRIDGE]
    assert engines and fridges
    assert max(engines) < min(fridges)
    return max(engines), min(fridges)


@pytest.mark.parametrize("voltage", [0.3, 1.2])
def test_faint_leads_are_tightly_coupled(voltage):
    result = currents(SetModel.symmetric(voltage, 0.01))
    assert result.energy_current / result.matter_current == pytest.approx(1.0, rel=0.01)


def test_faint_leads_switch_directly_from_engine_to_fridge():
    _, modes = exact_modes(np.linspace(0.1, 1.9, 19), 0.01)
    last_engine, first_fridge = engines_then_fridges(modes)
    assert first_fridge == last_engine + 1
    assert Mode.DUD not in modes


def test_moderate_coupling_opens_a_dud_gap():
    # the split levels at eps +- sqrt(Gamma delta) break I_E = eps I_M near the stall voltage
    _, modes = exact_modes(np.linspace(0.5, 0.9, 41), 10.0)
    last_engine, first_fridge = engines_then_fridges(modes)
    gap = modes[last_engine + 1 : first_fridge]
    assert len(gap) >= 2
    assert all(mode is Mode.DUD for mode in gap)


def test_cooling_dies_at_strong_coupling_and_returns_at_ultrastrong():
    voltages = np.linspace(0.1, 1.9, 19)
    grid = sweep_map(SetModel.symmetric(0.0, 1.0), voltages, [100.0, 5000.0], solver="exact", jobs=1)
    assert not grid.failures
    modes = grid.modes()
    assert Mode.FRIDGE not in modes[:, 0].tolist()
    assert Mode.FRIDGE in modes[:, 1].tolist()

    def best_efficiency(j):
        values = [grid.cell(i, j).metrics.efficiency for i in range(len(voltages)) if modes[i, j] is Mode.ENGINE]
        assert values
        return max(values)

    assert best_efficiency(1) > best_efficiency(0)
    carnot = carnot_efficiency(0.5, 1.0)
    for cell in grid.cells.values():
        if cell.metrics.efficiency is not None:
            assert cell.metrics.efficiency <= carnot + 1e-8


def test_ultrastrong_leads_cool_near_unit_bias():
    result = currents(SetModel.symmetric(1.0, 5000.0))
    assert result.heat_left > 0
    assert result.power < 0


def test_sweep_rejects_bad_axes():
    template = SetModel.symmetric(0.0, 1.0)
    with pytest.raises(ValidationError):
        sweep_map(template, [1.0, 0.5], [1.0], jobs=1)
    with pytest.raises(ValidationError):
        sweep_map(template, [0.5], [0.0, 1.0], jobs=1)
    with pytest.raises(ValidationError):
        sweep_map(template, [0.5], [1.0], solver="nrg", jobs=1)
    with pytest.raises(ValidationError):
        sweep_map(SetModel.symmetric(0.0, 1.0, beta_left=1.0, beta_right=2.0), [0.5], [1.0], jobs=1)


def hand_grid(modes, matter):
    voltages = np.arange(len(modes), dtype=float)
    grid = EngineMapGrid(voltages, np.array([1.0]), "exact")
    for i, (mode, current) in enumerate(zip(modes, matter)):
        cell = CellResult((i, 0), float(voltages[i]), 1.0)
        cell.transport = TransportResult(current, 2.0 * current, 0.0, 0.0, 0.0)
        cell.metrics = EngineMetrics(None, None, 0.0, mode)
        grid.cells[(i, 0)] = cell
    return grid


def test_mode_boundaries_sit_between_cells():
    grid = hand_grid([Mode.ENGINE, Mode.ENGINE, Mode.FRIDGE, Mode.DUD], [1.0] * 4)
    assert mode_boundaries(grid) == {"engine|fridge": [[1.5, 1.0]], "fridge|dud": [[2.5, 1.0]]}


def test_identical_grids_agree():
    grid = hand_grid([Mode.ENGINE, Mode.FRIDGE], [1.0, 2.0])
    comparison = compare_grids(grid, grid)
    assert comparison.max_current_error == 0.0
    assert comparison.mode_mismatches == 0
    assert comparison.boundaries_agree


def test_grid_comparison_counts_shifts_and_errors():
    reference = hand_grid([Mode.ENGINE, Mode.ENGINE, Mode.FRIDGE], [1.0, 1.0, 1.0])
    other = hand_grid([Mode.ENGINE, Mode.FRIDGE, Mode.FRIDGE], [1.02, 1.0, 1.0])
    comparison = compare_grids(reference, other)
    assert comparison.max_current_error == pytest.approx(0.02)
    assert comparison.mode_mismatches == 1
    assert comparison.boundary_shift == pytest.approx(1.0)
    assert comparison.boundaries_agree


def test_grids_must_share_axes():
    with pytest.raises(ValidationError):
        compare_grids(hand_grid([Mode.DUD], [1.0]), hand_grid([Mode.DUD, Mode.DUD], [1.0, 1.0]))


@pytest.mark.slow
def test_reaction_coordinate_map_matches_landauer():
    template = SetModel.symmetric(0.0, 1.0)
    voltages = np.linspace(0.0, 2.0, 20)
    gammas = np.geomspace(0.1, 100.0, 20)
    exact = sweep_map(template, voltages, gammas, solver="exact", jobs=4)
    rc = sweep_map(template, voltages, gammas, solver="rc", jobs=4)
    comparison = compare_grids(exact, rc)
    assert not exact.failures and not rc.failures
    assert comparison.max_current_error <= 0.03
    assert comparison.boundaries_agree


# ----------------------------------------------------------------------
# Otto cycle
# ----------------------------------------------------------------------


@pytest.mark.parametrize(
    "kwargs",
    [
        {"mu_cold": 2.5},
        {"mu_cold": 0.0},
        {"beta_cold": 0.5},
        {"s_choice": "sy"},
        {"treatment": "exact"},
    ],
)
def test_otto_config_validation(kwargs):
    with pytest.raises((ValidationError, ValueError)):
        otto(**kwargs)


def test_config_dictionary_form():
    cfg = otto(treatment="rc", decoupling="adiabatic", n_max=8)
    assert OttoConfig.from_dict(cfg.to_dict()) == cfg
    assert cfg.variant == "rc_adiabatic"


def test_malformed_config_dictionary():
    with pytest.raises(ValidationError):
        OttoConfig.from_dict({"mu_hot": 2.0, "mu_cold": 1.0, "beta_hot": 1.0, "beta_cold": 2.0, "rc_hot": {"lam": 1.0}})


@pytest.mark.parametrize("mu_cold", [1.2, 1.8])
def test_weak_cycle_efficiency(mu_cold):
    report = run_otto(otto(mu_cold=mu_cold))
    ratio = mu_cold / 2.0
    assert report.w_net > 0 and report.q_hot > 0
    assert report.efficiency == pytest.approx(1.0 - ratio)
    assert report.w_net == pytest.approx((1.0 - ratio) * report.q_hot)


@pytest.mark.parametrize("mu_cold", [0.2, 0.6])
def test_weak_cycle_below_the_carnot_ratio_has_no_efficiency(mu_cold):
    # below beta_hot / beta_cold the cycle pumps heat into the hot reservoir
    report = run_otto(otto(mu_cold=mu_cold))
    assert report.w_net < 0 and report.q_hot < 0
    assert report.efficiency is None


def test_weak_cycle_stops_at_the_carnot_ratio():
    report = run_otto(otto(mu_cold=1.0))
    assert report.w_net == pytest.approx(0.0, abs=1e-12)
    assert report.efficiency is None
    nearby = run_otto(otto(mu_cold=1.0 + 1e-4))
    assert nearby.w_net > 0
    assert nearby.efficiency == pytest.approx(nearby.config.carnot, abs=1e-4)
    assert nearby.efficiency <= nearby.config.carnot


@pytest.mark.parametrize("variant", VARIANTS, ids=lambda v: "-".join(v.values()))
def test_no_cycle_beats_carnot(variant):
    faint = RcCoupling(0.1, 1.3)
    for mu_cold in np.linspace(0.1, 1.9, 10):
        report = run_otto(otto(mu_cold=mu_cold, rc_hot=faint, rc_cold=faint, **variant))
        if report.efficiency is not None:
            assert report.efficiency <= report.config.carnot + 1e-8


def test_weak_sweep_rows_carry_no_efficiency_below_the_carnot_ratio():
    curve = otto_sweep(otto(), [0.2, 0.6, 1.4])
    assert [row["eta"] for row in curve.rows()][:2] == [None, None]
    assert curve.best_point.mu_ratio == pytest.approx(0.7)


@pytest.mark.parametrize("variant", VARIANTS, ids=lambda v: "-".join(v.values()))
def test_ledger_closes(variant):
    report = run_otto(otto(**variant))
    assert set(report.ledger) == set(LEDGER_KEYS)
    assert abs(report.ledger_sum) <= 1e-8 * report.ledger_scale


def test_ledger_closes_with_renormalization():
    report = run_otto(otto(treatment="rc", renormalize=True))
    assert abs(report.ledger_sum) <= 1e-8 * report.ledger_scale
    assert report.ledger["couple_hot"] > 0.0


def test_uncoupled_reaction_coordinate_reduces_to_weak():
    weak = run_otto(otto())
    free = RcCoupling(0.0, 1.3)
    for decoupling in ("instantaneous", "adiabatic"):
        rc = run_otto(otto(treatment="rc", decoupling=decoupling, rc_hot=free, rc_cold=free))
        assert rc.w_net == pytest.approx(weak.w_net, abs=1e-10)
        assert rc.q_hot == pytest.approx(weak.q_hot, abs=1e-10)
        assert rc.w_decouple_hot == 0.0


def test_weak_limit_is_continuous_in_the_coupling():
    weak = run_otto(otto())
    faint = RcCoupling(1e-3, 1.3)
    rc = run_otto(otto(treatment="rc", rc_hot=faint, rc_cold=faint))
    assert rc.w_net == pytest.approx(weak.w_net, abs=1e-4)


def test_adiabatic_decoupling_costs_no_more_than_a_quench():
    quench = run_otto(otto(treatment="rc", decoupling="instantaneous"))
    slow = run_otto(otto(treatment="rc", decoupling="adiabatic"))
    assert slow.w_decouple_hot <= quench.w_decouple_hot + 1e-10
    assert slow.w_decouple_cold <= quench.w_decouple_cold + 1e-10


def test_strong_coupling_costs_work():
    weak = run_otto(otto())
    strong = run_otto(otto(treatment="rc"))
    assert strong.w_decouple_hot > 0.0
    assert strong.w_net < weak.w_net


def faint_variant(decoupling=None):
    faint = RcCoupling(0.1, 1.3)
    if decoupling is None:
        return otto(rc_hot=faint, rc_cold=faint)
    return otto(treatment="rc", decoupling=decoupling, rc_hot=faint, rc_cold=faint)


def test_decoupling_ranks_the_efficiencies():
    mu_cold = 2.0 * 0.687
    quench = run_otto(replace(faint_variant("instantaneous"), mu_cold=mu_cold))
    slow = run_otto(replace(faint_variant("adiabatic"), mu_cold=mu_cold))
    weak = run_otto(replace(faint_variant(), mu_cold=mu_cold))
    assert 0.0 < quench.efficiency <= slow.efficiency <= weak.efficiency < weak.config.carnot


@pytest.mark.slow
def test_strong_coupling_curves_close_at_finite_ratios():
    ratios = np.linspace(0.52, 0.98, 24)
    curves = {
        name: otto_sweep(faint_variant(decoupling), 2.0 * ratios)
        for name, decoupling in (("quench", "instantaneous"), ("slow", "adiabatic"), ("weak", None))
    }
    quench, slow, weak = curves["quench"], curves["slow"], curves["weak"]
    for a, b, c in zip(quench.points, slow.points, weak.points):
        if a.work > 0 and b.work > 0:
            assert a.efficiency <= b.efficiency + 1e-10
            assert b.efficiency <= c.efficiency + 1e-10

    assert quench.best_point.efficiency < slow.best_point.efficiency < weak.best_point.efficiency
    carnot = faint_variant().carnot
    assert weak.best == 0
    assert all(p.work > 0 for p in weak.points)
    for curve in (quench, slow):
        engines = [i for i, p in enumerate(curve.points) if p.work > 0]
        # work vanishes at both ends of the ratio window, not only at mu_cold -> mu_hot
        assert 0 < engines[0] and engines[-1] < len(ratios) - 1
        assert engines == list(range(engines[0], engines[-1] + 1))
        best = curve.best_point.efficiency
        assert 0.0 < best < carnot
        for edge in (engines[0], engines[-1]):
            assert curve.points[edge].efficiency < 0.5 * best


def test_sweep_finds_the_most_efficient_engine():
    curve = otto_sweep(otto(), [1.6, 0.4, 1.2, 0.8])
    assert [point.mu_ratio for point in curve.points] == pytest.approx([0.2, 0.4, 0.6, 0.8])
    assert curve.best_point.mu_ratio == pytest.approx(0.6)
    assert curve.best_point.efficiency == pytest.approx(0.4)
    assert curve.rows()[0]["variant"] == "weak"


def test_sweep_without_engine_points():
    curve = otto_sweep(otto(), [0.2, 0.4])
    assert curve.best_point is None


def test_sweep_values_must_lie_below_the_hot_splitting():
    with pytest.raises(ValidationError):
        otto_sweep(otto(), [0.5, 2.0])
    with pytest.raises(ValidationError):
        otto_sweep(otto(), [])


def test_report_serializes_every_stroke():
    payload = run_otto(replace(otto(), treatment="rc")).to_dict()
    assert payload["variant"] == "rc_instantaneous"
    assert payload["ledger"].keys() == set(LEDGER_KEYS)
    assert payload["W_decouple_hot"] == payload["ledger"]["decouple_hot"]

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from rcthermo import __version__, app, cli
from rcthermo.commands import parse_range
from rcthermo.errors import ValidationError
from rcthermo.runconfig import load_run_config


def run(out_dir, *argv):
    return app.main(["--out", str(out_dir), *argv])


def read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def read_rows(path):
    lines = [line for line in path.read_text(encoding="utf-8").splitlines() if not line.startswith("#")]
    return list(csv.DictReader(lines))


@pytest.mark.parametrize(
    "text, points, log, expected",
    [
        ("0:2:5", 20, False, [0.0, 0.5, 1.0, 1.5, 2.0]),
        ("1:3", 3, False, [1.0, 2.0, 3.0]),
        ("1:100:3", 20, True, [1.0, 10.0, 100.0]),
        ([0.1, 0.4], 20, False, [0.1, 0.4]),
    ],
)
def test_parse_range(text, points, log, expected):
    assert parse_range(text, points, log) == pytest.approx(expected)


@pytest.mark.parametrize("text, log", [("1", False), ("a:b", False), ("2:1", False), ("0:1:3", True), ("0:1:0", False)])
def test_parse_range_rejects(text, log):
    with pytest.raises(ValidationError):
        parse_range(text, 10, log)


def test_flags_override_the_config_file(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"tol": 1e-5, "set": {"solver": "rc", "eps": 2.0}}), encoding="utf-8")
    run_config = load_run_config("set", path, {"solver": "exact", "eps": None})
    assert run_config.get("solver") == "exact"
    assert run_config.get("eps") == 2.0
    assert run_config.tol == 1e-5


def test_map_lorentzian(out_dir):
    assert run(out_dir, "map", "--family", "lorentzian", "--gamma", "2", "--delta", "0.5", "--eps", "1") == 0
    payload = read_json(out_dir / "map_result.json")
    assert payload["meta"]["version"] == __version__
    assert payload["result"]["mapping"] == "fermionic"
    assert payload["result"]["lambda_sq"] == pytest.approx(0.5, rel=1e-5)
    assert payload["result"]["rc_energy"] == pytest.approx(1.0, rel=1e-5)
    assert payload["reference"] == {"name": "eps", "value": 1.0}
    header = (out_dir / "residual.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith(f"# rcthermo {__version__} config=")
    assert header.endswith("units=eps")
    rows = read_rows(out_dir / "residual.csv")
    assert np.allclose([float(row["gamma"]) for row in rows], 1.0, rtol=1e-3)


def test_map_with_verification(out_dir):
    code = run(out_dir, "map", "--family", "semicircle", "--gamma", "1", "--delta", "1", "--eps", "2", "--verify")
    assert code == 0
    verification = read_json(out_dir / "map_result.json")["verification"]
    assert verification["passed"]
    assert verification["family_id"] == "semicircle"


def test_map_of_a_density_file(out_dir, tmp_path):
    path = tmp_path / "ohmic.csv"
    omega = np.linspace(0.01, 2.0, 200)
    lines = ["omega,gamma"] + [f"{w:.17g},{w * (2.0 - w):.17g}" for w in omega]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert run(out_dir, "map", "--density", str(path), "--statistics", "bosonic_odd") == 0
    payload = read_json(out_dir / "map_result.json")
    assert payload["family"] is None
    assert payload["result"]["mapping"] == "phonon"


def test_zero_density_is_an_input_error(out_dir, tmp_path):
    path = tmp_path / "zero.csv"
    path.write_text("omega,gamma\n0.5,0\n1.0,0\n1.5,0\n", encoding="utf-8")
    assert run(out_dir, "map", "--density", str(path)) == 2


def test_missing_density_source_is_an_input_error(out_dir):
    assert run(out_dir, "map") == 2


def test_verify_needs_a_family(out_dir, tmp_path):
    path = tmp_path / "flat.csv"
    path.write_text("omega,gamma\n0.5,1\n1.0,1\n1.5,1\n", encoding="utf-8")
    assert run(out_dir, "map", "--density", str(path), "--verify") == 2


def test_unknown_family_is_rejected_by_the_parser(out_dir):
    with pytest.raises(SystemExit) as excinfo:
        run(out_dir, "map", "--family", "ohmic")
    assert excinfo.value.code == 2


def test_bad_config_file(out_dir, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert app.main(["--config", str(path), "--out", str(out_dir), "catalog", "list"]) == 0
    assert app.main(["--config", str(path), "--out", str(out_dir), "map", "--family", "box"]) == 2


def test_outputs_are_deterministic(tmp_path):
    argv = ("map", "--family", "rubin", "--gamma", "1", "--wm", "2")
    assert run(tmp_path / "a", *argv) == 0
    assert run(tmp_path / "b", *argv) == 0
    first = (tmp_path / "a" / "residual.csv").read_bytes()
    assert first == (tmp_path / "b" / "residual.csv").read_bytes()
    assert read_json(tmp_path / "a" / "map_result.json") == read_json(tmp_path / "b" / "map_result.json")


def test_chain(out_dir):
    code = run(out_dir, "chain", "--family", "semicircle", "--delta", "1", "--eps", "0", "--steps", "3", "--points", "500")
    assert code == 0
    payload = read_json(out_dir / "chain.json")
    assert len(payload["sites"]) == 3
    assert payload["residuals"] == [f"residual_step_{k:02d}.csv" for k in range(3)]
    assert all((out_dir / name).exists() for name in payload["residuals"])


def test_chain_of_a_soft_density_fails_numerically(out_dir):
    assert run(out_dir, "chain", "--family", "lorentzian", "--steps", "2") == 3


def test_otto_weak_curve(out_dir):
    code = run(out_dir, "otto", "--treatment", "weak", "--mu-hot", "2", "--mu-cold-range", "0.3:1.9:9")
    assert code == 0
    payload = read_json(out_dir / "cycle_report.json")
    assert payload["carnot"] == pytest.approx(0.5)
    assert set(payload["reports"]) == {"weak"}
    rows = read_rows(out_dir / "parametric.csv")
    assert len(rows) == 9
    assert payload["best"]["weak"]["mu_ratio"] == pytest.approx(0.55)


def test_otto_rejects_inverted_splittings(out_dir):
    assert run(out_dir, "otto", "--mu-hot", "1", "--mu-cold", "1.5") == 2


def test_set_small_map(out_dir):
    code = run(out_dir, "--jobs", "1", "set", "--v-range", "0.3:1.2:2", "--gamma-range", "0.01:0.01:1")
    assert code == 0
    rows = read_rows(out_dir / "engine_map.csv")
    assert [row["mode"] for row in rows] == ["engine", "fridge"]
    boundaries = read_json(out_dir / "boundaries.json")["boundaries"]
    assert list(boundaries["exact"]) == ["engine|fridge"]
    assert not (out_dir / "errors.csv").exists()


def test_catalog_list(out_dir):
    assert run(out_dir, "catalog", "list") == 0


def test_console_entry_point_reports_interrupts(monkeypatch):
    def interrupted(argv=None):
        raise KeyboardInterrupt

    monkeypatch.setattr(app, "main", interrupted)
    assert cli.main([]) == 130


@pytest.mark.slow
def test_selftest(out_dir):
    assert run(out_dir, "--seed", "3", "selftest") == 0

"""Built-in round-trip scenarios and their reports."""

import pytest

from fluxcav.errors import ValidationError
from fluxcav.scenarios import (
    CheckLine,
    SCENARIO_NAMES,
    run_scenario,
    scenario_config,
)


def test_scenario_catalogue():
    assert SCENARIO_NAMES == (
        "S", "AB", "single-qubit", "dispersive-w1", "dispersive-w2"
    )
    with pytest.raises(ValidationError):
        scenario_config("unknown")


def test_scenario_config_contents():
    config = scenario_config("S")
    assert config.steps == 2001
    assert config.modes == (3,)
    assert config.noise_sigma == pytest.approx(5e-4)
    (spec,) = config.groups
    assert spec.count == 8
    config_ab = scenario_config("AB", seed=11)
    assert config_ab.seed == 11
    assert [g.name for g in config_ab.groups] == ["A", "B"]


def test_single_qubit_scenario_passes():
    report = run_scenario("single-qubit", seed=2)
    assert report.passed
    assert report.seed == 2
    assert report.fit.names == ("g_bare", "gamma_phi")
    lines = report.render()
    assert lines[0] == "scenario single-qubit (seed 2)"
    assert lines[-1].endswith("PASS")


def test_dispersive_count_scenario_passes():
    report = run_scenario("dispersive-w1", seed=5)
    assert report.passed
    (check,) = report.checks
    assert check.expected == 10.0
    assert check.rel_tol == 0.0


def test_check_line_semantics():
    exact = CheckLine("count", 8.0, 8.0, 0.0)
    assert exact.passed
    assert "PASS" in exact.render()
    off = CheckLine("count", 7.0, 8.0, 0.0)
    assert not off.passed
    assert "FAIL" in off.render()
    loose = CheckLine("gamma", 52.0, 53.0, 0.05, "MHz")
    assert loose.passed
    assert "MHz" in loose.render()

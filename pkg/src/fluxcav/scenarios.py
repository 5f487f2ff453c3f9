"""Built-in generate-and-refit scenarios with pass/fail reporting.

Each scenario is a small built-in configuration (same grammar as user
config files) describing a flux sweep, plus the estimation round trip
appropriate to it.  Running a scenario generates synthetic traces with
seeded noise, refits them, and compares the recovered parameters against
the generating values at a stated tolerance.  Counts must come back
exactly; continuous parameters within a few percent.
"""

import math
from dataclasses import dataclass
from collections.abc import Mapping

from .config import parse_config_text
from .constants import TWO_PI
from .core import bare_coupling
from .errors import ValidationError
from .fitting import FitResult, ModeFitSetup, fit_dispersive, fit_resonant_mode, fit_two_modes
from .sweep import SweepConfig, run_sweep, sweep_config_from_map
from .trace import PhaseTrace

__all__ = ["CheckLine", "ScenarioReport", "SCENARIO_NAMES", "scenario_config", "run_scenario"]


@dataclass(frozen=True)
class CheckLine:
    """One recovered-versus-expected comparison in a scenario report."""

    label: str
    recovered: float
    expected: float
    rel_tol: float
    unit: str = ""

    @property
    def passed(self) -> bool:
        if self.rel_tol == 0.0:
            return self.recovered == self.expected
        return abs(self.recovered - self.expected) <= self.rel_tol * abs(self.expected)

    def render(self) -> str:
        if self.rel_tol == 0.0:
            tol = "exact"
        else:
            tol = f"tol {100 * self.rel_tol:g}%"
        verdict = "PASS" if self.passed else "FAIL"
        unit = f" {self.unit}" if self.unit else ""
        return (
            f"{self.label} = {self.recovered:.6g}{unit} "
            f"(expected {self.expected:.6g}{unit}, {tol}): {verdict}"
        )


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    seed: int
    fit: FitResult
    checks: tuple[CheckLine, ...]
    traces: Mapping[int, PhaseTrace]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> list[str]:
        lines = [f"scenario {self.scenario} (seed {self.seed})"]
        lines += [f"  {c.render()}" for c in self.checks]
        lines.append(f"  overall: {'PASS' if self.passed else 'FAIL'}")
        return lines


_CONFIG_S = """\
# eight identical qubits crossing the third harmonic
sweep.flux_start = -0.02
sweep.flux_stop = 0.02
sweep.steps = 2001
sweep.modes = 3
group.S.count = 8
group.S.delta = 5.6GHz
group.S.current = 74nA
group.S.gamma_phi = 53MHz
noise.sigma = 0.5mrad
"""

_CONFIG_AB = """\
# two four-qubit groups crossing the third harmonic at separate fluxes
sweep.flux_start = -0.02
sweep.flux_stop = 0.02
sweep.steps = 2001
sweep.modes = 3
group.A.count = 4
group.A.delta = 5.3GHz
group.A.current = 76nA
group.A.gamma_phi = 54MHz
group.B.count = 4
group.B.delta = 6.1GHz
group.B.current = 72nA
group.B.gamma_phi = 41MHz
noise.sigma = 0.5mrad
"""

_CONFIG_SINGLE = """\
# one strongly coupled qubit on a sample with a 7.77 GHz third harmonic
sweep.flux_start = -0.015
sweep.flux_stop = 0.015
sweep.steps = 2001
sweep.modes = 3
resonator.omega3 = 7.77GHz
resonator.kappa3 = 0.46MHz
geometry.mutual_inductance = 0.91pH
group.q.count = 1
group.q.delta = 3GHz
group.q.current = 158nA
group.q.gamma_phi = 141MHz
group.q.g_override.3 = 4.9MHz
noise.sigma = 0.5mrad
"""

_CONFIG_W1 = """\
# ten qubits probed far below their gap at the fundamental
sweep.flux_start = -0.02
sweep.flux_stop = 0.02
sweep.steps = 2001
sweep.modes = 1
group.S.count = 10
group.S.delta = 5.6GHz
group.S.current = 74nA
group.S.gamma_phi = 53MHz
noise.sigma = 0.5mrad
"""

_CONFIG_W2 = """\
# ten qubits just below the second harmonic, weak capacitive-like coupling
sweep.flux_start = -0.02
sweep.flux_stop = 0.02
sweep.steps = 2001
sweep.modes = 2
group.S.count = 10
group.S.delta = 5.6GHz
group.S.current = 74nA
group.S.gamma_phi = 53MHz
group.S.g_override.2 = 0.4MHz
noise.sigma = 0.5mrad
"""

_SCENARIO_TEXT = {
    "S": _CONFIG_S,
    "AB": _CONFIG_AB,
    "single-qubit": _CONFIG_SINGLE,
    "dispersive-w1": _CONFIG_W1,
    "dispersive-w2": _CONFIG_W2,
}

SCENARIO_NAMES = tuple(_SCENARIO_TEXT)


def scenario_config(name: str, seed: int | None = None) -> SweepConfig:
    """The built-in sweep configuration behind a scenario."""
    if name not in _SCENARIO_TEXT:
        raise ValidationError(
            f"unknown scenario {name!r}; choose from {', '.join(SCENARIO_NAMES)}"
        )
    cfg = parse_config_text(_SCENARIO_TEXT[name], source=f"<scenario {name}>")
    return sweep_config_from_map(cfg, seed=seed)


def _setup_for(config: SweepConfig, group_name: str, mode_index: int) -> ModeFitSetup:
    spec = next(g for g in config.groups if g.name == group_name)
    mode = config.mode(mode_index)
    return ModeFitSetup(
        mode=mode,
        delta=spec.delta,
        current=spec.current,
        g_bare=bare_coupling(config.geometry, spec.qubit(), mode),
    )


def _hz(value: float) -> float:
    return value / TWO_PI


def run_scenario(name: str, seed: int | None = None) -> ScenarioReport:
    """Generate the scenario's traces, refit them, and compare."""
    config = scenario_config(name, seed=seed)
    traces = run_sweep(config)

    if name == "S":
        trace = traces[3]
        fit = fit_resonant_mode(trace, _setup_for(config, "S", 3))
        checks = (
            CheckLine("count", fit.value("count"), 8.0, 0.0),
            CheckLine(
                "gamma_phi/2pi",
                _hz(fit.value("gamma_phi")) / 1e6,
                53.0,
                0.05,
                "MHz",
            ),
        )
    elif name == "AB":
        trace = traces[3]
        fit = fit_two_modes(
            trace, _setup_for(config, "A", 3), _setup_for(config, "B", 3)
        )
        checks = (
            CheckLine("count_a", fit.value("count_a"), 4.0, 0.0),
            CheckLine(
                "gamma_phi_a/2pi",
                _hz(fit.value("gamma_phi_a")) / 1e6,
                54.0,
                0.05,
                "MHz",
            ),
            CheckLine("count_b", fit.value("count_b"), 4.0, 0.0),
            CheckLine(
                "gamma_phi_b/2pi",
                _hz(fit.value("gamma_phi_b")) / 1e6,
                41.0,
                0.05,
                "MHz",
            ),
        )
    elif name == "single-qubit":
        trace = traces[3]
        fit = fit_resonant_mode(
            trace, _setup_for(config, "q", 3), free="coupling", count=1
        )
        checks = (
            CheckLine(
                "g_bare/2pi", _hz(fit.value("g_bare")) / 1e6, 4.9, 0.05, "MHz"
            ),
            CheckLine(
                "gamma_phi/2pi",
                _hz(fit.value("gamma_phi")) / 1e6,
                141.0,
                0.05,
                "MHz",
            ),
        )
    elif name == "dispersive-w1":
        trace = traces[1]
        fit = fit_dispersive(trace, _setup_for(config, "S", 1), free="count")
        checks = (CheckLine("count", fit.value("count"), 10.0, 0.0),)
    elif name == "dispersive-w2":
        trace = traces[2]
        spec = next(g for g in config.groups if g.name == "S")
        setup = ModeFitSetup(
            mode=config.mode(2),
            delta=spec.delta,
            current=spec.current,
            g_bare=bare_coupling(config.geometry, spec.qubit(), config.mode(2)),
        )
        fit = fit_dispersive(trace, setup, free="coupling", count=10)
        checks = (
            CheckLine(
                "g_bare/2pi", _hz(fit.value("g_bare")) / 1e6, 0.4, 0.10, "MHz"
            ),
        )
    else:  # pragma: no cover - guarded by scenario_config
        raise ValidationError(f"unknown scenario {name!r}")

    if not math.isfinite(fit.residual_norm):
        raise ValidationError("scenario fit produced a non-finite residual")
    return ScenarioReport(
        scenario=name,
        seed=config.seed,
        fit=fit,
        checks=checks,
        traces=traces,
    )

"""Shared builders for the test suite.

Synthetic traces are produced directly from the susceptibility sum (the
same forward model the sweep layer uses) so estimation tests control
every generating parameter explicitly.
"""

import math

import numpy as np

from fluxcav import TWO_PI
from fluxcav.core import QubitParams, ResonatorMode, bare_coupling
from fluxcav.fitting import ModeFitSetup
from fluxcav.semiclassical import EPS_COEF, QubitGroup, group_susceptibility
from fluxcav.sweep import DEFAULT_GEOMETRY, GroupSpec, SweepConfig, default_mode
from fluxcav.trace import PhaseTrace

# generating parameters of the built-in eight-qubit scenario
S_DELTA = TWO_PI * 5.6e9
S_CURRENT = 74e-9
S_GAMMA_PHI = TWO_PI * 53e6
S_COUNT = 8


def s_qubit() -> QubitParams:
    return QubitParams(
        delta=S_DELTA, persistent_current=S_CURRENT, gamma_phi=S_GAMMA_PHI
    )


def s_setup(mode: ResonatorMode | None = None) -> ModeFitSetup:
    mode = default_mode(3) if mode is None else mode
    return ModeFitSetup(
        mode=mode,
        delta=S_DELTA,
        current=S_CURRENT,
        g_bare=bare_coupling(DEFAULT_GEOMETRY, s_qubit(), mode),
    )


def s_group(mode: ResonatorMode | None = None, count: float = S_COUNT) -> QubitGroup:
    setup = s_setup(mode)
    return QubitGroup(
        count=float(count),
        delta=S_DELTA,
        current=S_CURRENT,
        gamma_phi=S_GAMMA_PHI,
        g_bare=setup.g_bare,
    )


def detuning_of(delta: float, current: float, flux, omega: float):
    """Qubit-probe detuning along a flux axis, rad/s."""
    x = np.asarray(flux, dtype=np.float64)
    return np.hypot(delta, EPS_COEF * current * x) - omega


def clean_phase(groups, mode: ResonatorMode, flux) -> np.ndarray:
    """Noise-free forward-model phase of ``groups`` at ``mode``."""
    s = group_susceptibility(groups, np.asarray(flux, float), mode.omega)
    return np.arctan2(s.imag, mode.kappa / 2.0 + s.real)


def group_trace(
    groups,
    mode: ResonatorMode,
    flux,
    noise_sigma: float = 0.0,
    seed: int | None = None,
) -> PhaseTrace:
    """PhaseTrace of the forward model, optionally with seeded phase noise."""
    flux = np.asarray(flux, dtype=np.float64)
    phase = clean_phase(groups, mode, flux)
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        phase = phase + rng.normal(0.0, noise_sigma, flux.size)
    return PhaseTrace(
        mode_index=mode.index,
        flux=flux,
        phase=phase,
        amplitude=np.ones_like(flux),
        omega_hz=mode.omega / TWO_PI,
        kappa_hz=mode.kappa / TWO_PI,
    )


def windowed(trace: PhaseTrace, mask: np.ndarray) -> PhaseTrace:
    """The sub-trace selected by a boolean mask (order preserved)."""
    return PhaseTrace(
        mode_index=trace.mode_index,
        flux=trace.flux[mask],
        phase=trace.phase[mask],
        amplitude=trace.amplitude[mask],
        omega_hz=trace.omega_hz,
        kappa_hz=trace.kappa_hz,
        config_hash=trace.config_hash,
        seed=trace.seed,
    )


def setup_for_group(config: SweepConfig, name: str, mode_index: int) -> ModeFitSetup:
    """Fixed-parameter fit setup for one named group of a sweep config."""
    spec: GroupSpec = next(g for g in config.groups if g.name == name)
    mode = config.mode(mode_index)
    g_bare = spec.overrides.get(mode_index)
    if g_bare is None:
        g_bare = bare_coupling(config.geometry, spec.qubit(), mode)
    return ModeFitSetup(
        mode=mode, delta=spec.delta, current=spec.current, g_bare=g_bare
    )


def lorentzian(w, center, fwhm, height=1.0, baseline=0.0):
    return baseline + height / (1.0 + (2.0 * (np.asarray(w) - center) / fwhm) ** 2)

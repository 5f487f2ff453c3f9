"""Stationary cavity response, closed-form limits, and corrections."""

import math

import numpy as np
import pytest

import helpers
from fluxcav import TWO_PI
from fluxcav.core import flux_at_frequency, resonance_flux
from fluxcav.errors import (
    PerturbativeCouplingWarning,
    StepTooLarge,
    ValidationError,
    WeakDriveViolation,
    ZeroDetuning,
)
from fluxcav.semiclassical import (
    CouplingRule,
    DriveSpec,
    QubitGroup,
    group_phase,
    group_susceptibility,
    homogeneous_ensemble,
    integrate_field,
    phase_shift_dispersive,
    phase_shift_resonant,
    qubit_susceptibility,
    sigma_minus_with_qq,
    sigma_z_saturation,
    steady_state_field,
    sweep_response,
)
from fluxcav.sweep import DEFAULT_GEOMETRY, default_mode

GAMMA = TWO_PI * 53e6
G_EPS = TWO_PI * 0.863e6


def bare_ensemble(count=1):
    """Qubits decoupled from every mode (zero coupling overrides)."""
    overrides = {j: 0.0 for j in range(1, 6)}
    return homogeneous_ensemble(
        count, helpers.S_DELTA, helpers.S_CURRENT, helpers.S_GAMMA_PHI,
        CouplingRule(overrides=overrides),
    )


@pytest.fixture(scope="module")
def ensemble_s():
    return homogeneous_ensemble(
        8, helpers.S_DELTA, helpers.S_CURRENT, helpers.S_GAMMA_PHI,
        CouplingRule(geometry=DEFAULT_GEOMETRY),
    )


class TestQubitSusceptibility:
    def test_real_on_resonance(self, qubit_s):
        chi = qubit_susceptibility(qubit_s, G_EPS, 0.0)
        assert chi.imag == 0.0
        assert chi.real == pytest.approx(G_EPS**2 / GAMMA, rel=1e-15)

    def test_example_magnitude(self, qubit_s):
        # g_eps/2pi = 0.863 MHz on a 53 MHz linewidth damps at about 14.1 kHz
        chi = qubit_susceptibility(qubit_s, G_EPS, 0.0)
        assert chi.real / TWO_PI == pytest.approx(0.863e6**2 / 53e6, rel=1e-13)
        assert chi.real / TWO_PI == pytest.approx(14.1e3, rel=1e-2)

    def test_vanishes_far_detuned(self, qubit_s):
        far = qubit_susceptibility(qubit_s, G_EPS, 1e6 * GAMMA)
        assert abs(far) <= G_EPS**2 / (1e6 * GAMMA) * (1.0 + 1e-12)


class TestSteadyStateField:
    def test_bare_cavity(self, mode3):
        drive = DriveSpec.resonant(mode3, 0.1)
        resp = steady_state_field(bare_ensemble(), mode3, 0.0, drive)
        assert resp.phase_shift == 0.0
        assert resp.amplitude == pytest.approx(drive.strength / mode3.kappa, rel=1e-15)
        assert resp.field == pytest.approx(1j * drive.strength / mode3.kappa, rel=1e-15)

    def test_resonant_qubits_damp_without_phase(self, ensemble_s, qubit_s, mode3):
        x = resonance_flux(qubit_s, mode3)
        drive = DriveSpec.resonant(mode3, 0.1)
        resp = steady_state_field(ensemble_s, mode3, x, drive)
        bare = drive.strength / mode3.kappa
        assert abs(resp.phase_shift) < 1e-6
        assert 0.5 * bare < resp.amplitude < 0.9 * bare

    def test_detuned_example(self, qubit_s, mode3):
        # eight qubits with g_eps/2pi = 0.863 MHz, biased 60.8 MHz above the
        # mode, shift the probe phase by about -0.136 rad; that detuning is
        # near the extremum of the lineshape
        delta = TWO_PI * 60.8e6
        x = flux_at_frequency(qubit_s, mode3.omega + delta).value
        g_pin = G_EPS * (mode3.omega + delta) / qubit_s.delta
        ens = homogeneous_ensemble(
            8, helpers.S_DELTA, helpers.S_CURRENT, helpers.S_GAMMA_PHI,
            CouplingRule(overrides={3: g_pin}),
        )
        drive = DriveSpec.resonant(mode3, 0.1)
        resp = steady_state_field(ens, mode3, x, drive)
        assert resp.phase_shift == pytest.approx(-0.136, abs=1e-3)
        for scale in (0.8, 1.2):
            x_off = flux_at_frequency(qubit_s, mode3.omega + scale * delta).value
            off = steady_state_field(ens, mode3, x_off, drive)
            assert abs(off.phase_shift) < abs(resp.phase_shift)
        traj = integrate_field(ens, mode3, x, drive, t_end=50.0 / mode3.kappa)
        assert traj.final == pytest.approx(resp.field, rel=1e-8)

    def test_requires_positive_drive(self, ensemble_s, mode3):
        silent = DriveSpec(strength=0.0, frequency=mode3.omega)
        with pytest.raises(ValidationError):
            steady_state_field(ensemble_s, mode3, 0.0, silent)
        with pytest.raises(ValidationError):
            sweep_response(ensemble_s, mode3, np.array([0.0]), silent)

    def test_rejects_off_resonant_drive(self, ensemble_s, mode3):
        drive = DriveSpec(strength=0.1 * mode3.kappa, frequency=1.001 * mode3.omega)
        with pytest.raises(ValidationError):
            steady_state_field(ensemble_s, mode3, 0.0, drive)

    def test_warns_when_drive_too_strong(self, mode3):
        drive = DriveSpec.resonant(mode3, 0.4)
        with pytest.warns(WeakDriveViolation):
            steady_state_field(bare_ensemble(), mode3, 0.0, drive)

    def test_sweep_matches_pointwise(self, ensemble_s, mode3):
        flux = np.linspace(-0.015, 0.015, 7)
        drive = DriveSpec.resonant(mode3, 0.1)
        phase, amp, field = sweep_response(ensemble_s, mode3, flux, drive)
        for i, x in enumerate(flux):
            single = steady_state_field(ensemble_s, mode3, x, drive)
            assert phase[i] == pytest.approx(single.phase_shift, rel=1e-14, abs=1e-15)
            assert amp[i] == pytest.approx(single.amplitude, rel=1e-14)
            assert field[i] == pytest.approx(single.field, rel=1e-14)


class TestClosedFormPhase:
    def test_zero_on_resonance_and_without_qubits(self, mode3):
        assert phase_shift_resonant(8, G_EPS, GAMMA, mode3.kappa, 0.0) == 0.0
        assert phase_shift_resonant(0, G_EPS, GAMMA, mode3.kappa, TWO_PI * 1e7) == 0.0

    def test_odd_in_detuning(self, mode3):
        delta = TWO_PI * 31e6
        assert phase_shift_resonant(
            8, G_EPS, GAMMA, mode3.kappa, -delta
        ) == -phase_shift_resonant(8, G_EPS, GAMMA, mode3.kappa, delta)

    def test_matches_susceptibility_phase(self, mode3):
        # the closed form is exactly atan2(Im S, kappa/2 + Re S)
        delta = np.linspace(-TWO_PI * 600e6, TWO_PI * 600e6, 501)
        s = 8 * G_EPS**2 / (GAMMA + 1j * delta)
        full = np.arctan2(s.imag, mode3.kappa / 2.0 + s.real)
        closed = phase_shift_resonant(8, G_EPS, GAMMA, mode3.kappa, delta)
        np.testing.assert_allclose(closed, full, atol=1e-12, rtol=0.0)

    def test_approaches_dispersive_far_detuned(self, mode3):
        delta = TWO_PI * 500e6
        full = phase_shift_resonant(8, G_EPS, GAMMA, mode3.kappa, delta)
        disp = phase_shift_dispersive(8, G_EPS, mode3.kappa, delta)
        assert abs(full - disp) / abs(disp) < 0.02

    def test_dispersive_tangent_linear_in_count(self, mode1):
        delta = TWO_PI * 3.006e9
        one = math.tan(phase_shift_dispersive(1, G_EPS, mode1.kappa, delta))
        ten = math.tan(phase_shift_dispersive(10, G_EPS, mode1.kappa, delta))
        assert ten == pytest.approx(10.0 * one, rel=1e-12)
        assert abs(phase_shift_dispersive(1, G_EPS, mode1.kappa, delta)) < abs(
            phase_shift_dispersive(10, G_EPS, mode1.kappa, delta)
        )

    def test_dispersive_matches_steady_state(self, mode1):
        # ten qubits far below their gap; the dispersive formula should
        # agree with the full stationary response to about gamma^2/delta^2
        ens = homogeneous_ensemble(
            10, helpers.S_DELTA, helpers.S_CURRENT, helpers.S_GAMMA_PHI,
            CouplingRule(geometry=DEFAULT_GEOMETRY),
        )
        resp = steady_state_field(ens, mode1, 0.0, DriveSpec.resonant(mode1, 0.1))
        g_bare = ens.coupling.bare(ens.qubits[0], mode1)
        delta = helpers.S_DELTA - mode1.omega
        disp = phase_shift_dispersive(10, g_bare, mode1.kappa, delta)
        assert abs(disp - resp.phase_shift) / abs(resp.phase_shift) < 0.01

    def test_dispersive_vanishes_far_detuned(self, mode1):
        assert abs(phase_shift_dispersive(10, G_EPS, mode1.kappa, TWO_PI * 1e15)) < 1e-6

    def test_dispersive_rejects_zero_detuning(self, mode1):
        with pytest.raises(ZeroDetuning):
            phase_shift_dispersive(10, G_EPS, mode1.kappa, 0.0)
        with pytest.raises(ZeroDetuning):
            phase_shift_dispersive(10, G_EPS, mode1.kappa, np.array([1.0, 0.0]))


class TestGroupSusceptibility:
    def test_additive_over_groups(self, mode3):
        groups = [
            QubitGroup(4.0, TWO_PI * 5.3e9, 76e-9, TWO_PI * 54e6, TWO_PI * 1.1e6),
            QubitGroup(4.0, TWO_PI * 6.1e9, 72e-9, TWO_PI * 41e6, TWO_PI * 1.3e6),
            QubitGroup(2.5, TWO_PI * 5.6e9, 74e-9, TWO_PI * 53e6, TWO_PI * 0.8e6),
        ]
        flux = np.linspace(-0.02, 0.02, 101)
        total = group_susceptibility(groups, flux, mode3.omega)
        parts = sum(group_susceptibility([g], flux, mode3.omega) for g in groups)
        np.testing.assert_allclose(total, parts, rtol=1e-13)

    def test_real_part_nonnegative(self, mode3):
        rng = np.random.default_rng(7)
        for _ in range(10):
            grp = QubitGroup(
                count=float(rng.uniform(0.5, 20)),
                delta=TWO_PI * rng.uniform(1e9, 9e9),
                current=rng.uniform(20e-9, 300e-9),
                gamma_phi=TWO_PI * rng.uniform(1e6, 300e6),
                g_bare=TWO_PI * rng.uniform(0.1e6, 5e6),
            )
            flux = np.linspace(-0.4, 0.4, 81)
            s = group_susceptibility([grp], flux, mode3.omega)
            assert np.all(s.real >= 0.0)

    def test_group_phase_matches_manual(self, mode3, group_s, flux_grid_s):
        s = group_susceptibility([group_s], flux_grid_s, mode3.omega)
        manual = np.arctan2(s.imag, mode3.kappa / 2.0 + s.real)
        np.testing.assert_array_equal(
            group_phase([group_s], mode3, flux_grid_s), manual
        )


class TestSaturation:
    def test_exactly_inverted_without_field(self):
        assert sigma_z_saturation(G_EPS, GAMMA, GAMMA, 0.0, 0.0) == -1.0

    def test_far_detuned_stays_inverted(self):
        sz = sigma_z_saturation(1.0, 1.0, 1.0, 1e6, 1.0)
        assert abs(sz + 1.0) < 1e-11

    def test_equal_rates_one_photon(self):
        # g = gamma_1 = gamma_phi, resonant, |a|^2 = 1 saturates to -1/5
        assert sigma_z_saturation(1.0, 1.0, 1.0, 0.0, 1.0) == -0.2

    def test_recovers_inversion_as_drive_vanishes(self):
        values = [
            sigma_z_saturation(G_EPS, GAMMA, GAMMA, 0.0, n2)
            for n2 in (1e-2, 1e-4, 1e-6, 1e-8)
        ]
        assert all(b < a for a, b in zip(values, values[1:]))
        assert abs(values[-1] + 1.0) < 1e-7

    def test_rejects_nonpositive_rates(self):
        with pytest.raises(ValidationError):
            sigma_z_saturation(1.0, 0.0, 1.0, 0.0, 0.1)


class TestQubitQubitCorrection:
    def test_zero_coupling_reduces_to_leading_term(self):
        field = 0.05j
        got = sigma_minus_with_qq(G_EPS, 0.0, GAMMA, TWO_PI * 1e7, field)
        lead = -1j * G_EPS * field / (GAMMA + 1j * TWO_PI * 1e7)
        assert got == lead

    def test_relative_correction_on_resonance(self):
        # 1 MHz neighbour coupling against 53 MHz dephasing: 2/53
        g_qq = TWO_PI * 1e6
        field = 0.05j
        got = sigma_minus_with_qq(G_EPS, g_qq, GAMMA, 0.0, field)
        lead = -1j * G_EPS * field / GAMMA
        ratio = abs(got - lead) / abs(lead)
        assert ratio == pytest.approx(2.0 / 53.0, rel=1e-12)

    def test_correction_decays_as_inverse_square(self):
        g_qq = TWO_PI * 1e6
        field = 0.05j

        def correction(delta):
            got = sigma_minus_with_qq(G_EPS, g_qq, GAMMA, delta, field)
            lead = -1j * G_EPS * field / (GAMMA + 1j * delta)
            return abs(got - lead)

        big = 1e4 * GAMMA
        assert correction(2.0 * big) / correction(big) == pytest.approx(0.25, rel=1e-3)

    def test_relative_correction_bounded(self):
        g_qq = TWO_PI * 1e6
        bound = 2.0 * g_qq / GAMMA
        field = 0.05j
        for delta in np.linspace(-TWO_PI * 600e6, TWO_PI * 600e6, 41):
            got = sigma_minus_with_qq(G_EPS, g_qq, GAMMA, delta, field)
            lead = -1j * G_EPS * field / (GAMMA + 1j * delta)
            assert abs(got - lead) / abs(lead) <= bound * (1.0 + 1e-12)


class TestIntegrateField:
    def test_bare_cavity_matches_analytic(self, mode3):
        drive = DriveSpec.resonant(mode3, 0.1)
        t_end = 10.0 / mode3.kappa
        traj = integrate_field(bare_ensemble(), mode3, 0.0, drive, t_end)
        analytic = (
            1j * drive.strength / mode3.kappa
            * (1.0 - np.exp(-mode3.kappa * traj.times / 2.0))
        )
        err = np.abs(traj.values[1:] - analytic[1:]) / np.abs(analytic[-1])
        assert err.max() < 1e-6

    def test_converges_to_steady_state(self, ensemble_s, qubit_s, mode3):
        x = resonance_flux(qubit_s, mode3).value + 5e-4
        drive = DriveSpec.resonant(mode3, 0.1)
        target = steady_state_field(ensemble_s, mode3, x, drive)
        traj = integrate_field(ensemble_s, mode3, x, drive, t_end=50.0 / mode3.kappa)
        assert abs(traj.final - target.field) / abs(target.field) < 1e-8

    def test_undriven_field_stays_zero(self, ensemble_s, mode3):
        silent = DriveSpec(strength=0.0, frequency=mode3.omega)
        traj = integrate_field(ensemble_s, mode3, 0.0, silent, t_end=5.0 / mode3.kappa)
        assert np.all(traj.values == 0.0)

    def test_rejects_unstable_step(self, ensemble_s, mode3):
        drive = DriveSpec.resonant(mode3, 0.1)
        with pytest.raises(StepTooLarge):
            integrate_field(
                ensemble_s, mode3, 0.0, drive, t_end=1.0 / mode3.kappa,
                dt=1.0 / mode3.kappa,
            )


class TestSpecValidation:
    def test_drive_spec(self, mode3):
        DriveSpec(strength=0.0, frequency=mode3.omega)
        with pytest.raises(ValidationError):
            DriveSpec(strength=-1.0, frequency=mode3.omega)
        with pytest.raises(ValidationError):
            DriveSpec(strength=1.0, frequency=0.0)
        drive = DriveSpec.resonant(mode3, 0.05)
        assert drive.strength == 0.05 * mode3.kappa
        assert drive.frequency == mode3.omega

    def test_ensemble_warns_on_large_qubit_coupling(self):
        with pytest.warns(PerturbativeCouplingWarning):
            homogeneous_ensemble(
                2, helpers.S_DELTA, helpers.S_CURRENT, helpers.S_GAMMA_PHI,
                CouplingRule(geometry=DEFAULT_GEOMETRY),
                g_qq=helpers.S_GAMMA_PHI / 5.0,
            )

    def test_empty_ensemble_rejected(self):
        with pytest.raises(ValidationError):
            homogeneous_ensemble(
                0, helpers.S_DELTA, helpers.S_CURRENT, helpers.S_GAMMA_PHI,
                CouplingRule(geometry=DEFAULT_GEOMETRY),
            )

    def test_coupling_rule_requires_geometry_or_override(self, qubit_s, mode3):
        rule = CouplingRule(overrides={2: TWO_PI * 0.4e6})
        assert rule.bare(qubit_s, default_mode(2)) == TWO_PI * 0.4e6
        with pytest.raises(ValidationError):
            rule.bare(qubit_s, mode3)

"""Single-qubit relations, couplings, and thermal occupancy."""

import math

import numpy as np
import pytest

from fluxcav import CONSTANTS, TWO_PI
from fluxcav.core import (
    CouplingGeometry,
    FluxBias,
    QubitParams,
    ResonatorMode,
    bare_coupling,
    energy_bias,
    flux_at_frequency,
    flux_value,
    resonance_flux,
    thermal_photon_number,
    transition_frequency,
    transversal_coupling,
)
from fluxcav.errors import NoCrossing, ValidationError
from fluxcav.sweep import DEFAULT_GEOMETRY, default_mode


class TestConstants:
    def test_flux_quantum(self):
        # h/(2e) with the exact SI-2019 h and e
        assert CONSTANTS.flux_quantum == pytest.approx(
            2.0678338484619295e-15, rel=1e-15
        )
        assert CONSTANTS.flux_quantum == CONSTANTS.h / (2.0 * 1.602176634e-19)

    def test_hbar_identity(self):
        assert CONSTANTS.h == pytest.approx(TWO_PI * CONSTANTS.hbar, rel=1e-15)

    def test_codata_values_to_six_digits(self):
        assert CONSTANTS.h == pytest.approx(6.62607e-34, rel=1e-5)
        assert CONSTANTS.boltzmann == pytest.approx(1.38065e-23, rel=1e-5)


class TestEnergyBias:
    def test_zero_at_degeneracy(self, qubit_s):
        assert energy_bias(qubit_s, 0.0) == 0.0

    def test_odd_in_flux(self, qubit_s):
        for x in (1e-4, 0.0117, 0.3):
            assert energy_bias(qubit_s, -x) == -energy_bias(qubit_s, x)

    def test_example_value(self, qubit_s):
        # 2*I*Phi0*x/h at I = 74 nA, x = 0.01168 is about 5.40 GHz
        expected_hz = (
            2.0 * 74e-9 * CONSTANTS.flux_quantum * 0.01168 / CONSTANTS.h
        )
        got_hz = energy_bias(qubit_s, 0.01168) / TWO_PI
        assert got_hz == pytest.approx(expected_hz, rel=1e-14)
        assert got_hz == pytest.approx(5.394661123237927e9, rel=1e-12)
        assert got_hz == pytest.approx(5.40e9, rel=2e-3)

    def test_linear_in_flux(self, qubit_s):
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = float(rng.uniform(-0.4, 0.4))
            c = float(rng.uniform(-1.2, 1.2))
            assert energy_bias(qubit_s, c * x) == pytest.approx(
                c * energy_bias(qubit_s, x), rel=1e-14, abs=1e-6
            )

    def test_accepts_flux_bias_object(self, qubit_s):
        assert energy_bias(qubit_s, FluxBias(0.01)) == energy_bias(qubit_s, 0.01)


class TestTransitionFrequency:
    def test_gap_at_degeneracy(self, qubit_s):
        assert transition_frequency(qubit_s, 0.0) == qubit_s.delta

    def test_hypot_example(self, qubit_s):
        # flux chosen so eps/2pi = 5.403 GHz; E is then the hypotenuse
        x = TWO_PI * 5.403e9 * CONSTANTS.hbar / (
            2.0 * qubit_s.persistent_current * CONSTANTS.flux_quantum
        )
        expected = TWO_PI * math.hypot(5.6e9, 5.403e9)
        assert transition_frequency(qubit_s, x) == pytest.approx(expected, rel=1e-12)

    def test_linear_asymptote(self, qubit_s):
        x = 0.4
        ratio = transition_frequency(qubit_s, x) / abs(energy_bias(qubit_s, x))
        assert 1.0 < ratio < 1.001

    def test_even_in_flux(self, qubit_s):
        assert transition_frequency(qubit_s, -0.013) == transition_frequency(
            qubit_s, 0.013
        )


class TestResonanceFlux:
    def test_zero_when_gap_equals_mode(self, qubit_s):
        mode = ResonatorMode(index=1, omega=qubit_s.delta, kappa=1e-5 * qubit_s.delta)
        assert resonance_flux(qubit_s, mode).value == 0.0

    def test_third_harmonic_crossing(self, qubit_s, mode3):
        x = resonance_flux(qubit_s, mode3).value
        assert x == pytest.approx(0.011699480015129899, rel=1e-12)
        assert 0.0116 < x < 0.0118

    def test_matches_bisection(self, qubit_s, mode3):
        # independent inversion of the forward map
        lo, hi = 0.0, 0.1
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if transition_frequency(qubit_s, mid) < mode3.omega:
                lo = mid
            else:
                hi = mid
        assert resonance_flux(qubit_s, mode3).value == pytest.approx(
            0.5 * (lo + hi), rel=1e-12
        )

    def test_below_gap_raises(self, qubit_s):
        low = ResonatorMode(index=1, omega=0.5 * qubit_s.delta, kappa=1e3)
        with pytest.raises(NoCrossing):
            resonance_flux(qubit_s, low)

    def test_transition_matches_mode_at_crossing(self, qubit_s):
        for j in (3, 4, 5):
            mode = default_mode(j)
            x = resonance_flux(qubit_s, mode)
            assert transition_frequency(qubit_s, x) == pytest.approx(
                mode.omega, rel=1e-9
            )

    def test_flux_at_frequency_inverts_forward_map(self, qubit_s):
        omega = TWO_PI * 9.1e9
        x = flux_at_frequency(qubit_s, omega)
        assert transition_frequency(qubit_s, x) == pytest.approx(omega, rel=1e-12)


class TestBareCoupling:
    def test_ensemble_to_third_harmonic(self, qubit_s, mode3, geometry):
        g_hz = bare_coupling(geometry, qubit_s, mode3) / TWO_PI
        assert abs(g_hz - 1.2e6) < 0.1e6
        assert g_hz == pytest.approx(1208990.7553540864, rel=1e-12)

    def test_single_strong_qubit(self):
        geom = CouplingGeometry(mutual_inductance=0.91e-12, resonator_inductance=11e-9)
        q = QubitParams(delta=TWO_PI * 3e9, persistent_current=158e-9, gamma_phi=TWO_PI * 141e6)
        mode = ResonatorMode(index=3, omega=TWO_PI * 7.77e9, kappa=TWO_PI * 0.46e6)
        g_hz = bare_coupling(geom, q, mode) / TWO_PI
        assert abs(g_hz - 4.7e6) < 0.3e6
        assert g_hz == pytest.approx(4694449.065816882, rel=1e-12)

    def test_sqrt_omega_scaling(self, qubit_s, mode3, geometry):
        quad = ResonatorMode(index=4, omega=4.0 * mode3.omega, kappa=mode3.kappa)
        assert bare_coupling(geometry, qubit_s, quad) == pytest.approx(
            2.0 * bare_coupling(geometry, qubit_s, mode3), rel=1e-14
        )


class TestTransversalCoupling:
    def test_full_at_degeneracy(self, qubit_s):
        g = TWO_PI * 1.2e6
        assert transversal_coupling(qubit_s, 0.0, g) == g

    def test_value_at_crossing(self, qubit_s, mode3):
        x = resonance_flux(qubit_s, mode3)
        g_t = transversal_coupling(qubit_s, x, TWO_PI * 1.2e6)
        assert g_t / TWO_PI == pytest.approx(0.863e6, rel=1e-3)

    def test_vanishes_far_from_degeneracy(self, qubit_s):
        g = TWO_PI * 1.2e6
        assert transversal_coupling(qubit_s, 0.45, g) < 0.03 * g

    def test_never_exceeds_bare(self, qubit_s):
        g = TWO_PI * 1.2e6
        for x in (0.001, 0.05, 0.2, 0.4):
            assert transversal_coupling(qubit_s, x, g) < g
        assert transversal_coupling(qubit_s, 0.0, g) == g


class TestThermalOccupancy:
    def test_fundamental_in_dilution_fridge(self, mode1):
        n = thermal_photon_number(mode1, 0.020)
        assert n == pytest.approx(0.0019840080281671867, rel=1e-12)
        assert abs(n - 0.002) < 0.2 * 0.002

    def test_vanishes_at_low_temperature(self, mode1):
        assert thermal_photon_number(mode1, 1e-5) == 0.0

    def test_one_photon_at_log2_temperature(self, mode1):
        # hbar*omega = kB*T*ln2 puts exactly one photon in the mode
        t = CONSTANTS.hbar * mode1.omega / (CONSTANTS.boltzmann * math.log(2.0))
        assert thermal_photon_number(mode1, t) == pytest.approx(1.0, rel=1e-12)

    def test_rejects_nonpositive_temperature(self, mode1):
        for t in (0.0, -0.02):
            with pytest.raises(ValidationError):
                thermal_photon_number(mode1, t)


class TestValidation:
    def test_flux_window(self):
        FluxBias(0.499)
        FluxBias(-0.499)
        for x in (0.5, -0.5, 0.7, math.inf, math.nan):
            with pytest.raises(ValidationError):
                FluxBias(x)

    def test_flux_value_coercion(self):
        assert flux_value(FluxBias(0.01)) == 0.01
        assert flux_value(0.01) == 0.01
        with pytest.raises(ValidationError):
            flux_value(0.6)

    def test_qubit_parameters(self):
        with pytest.raises(ValidationError):
            QubitParams(delta=0.0, persistent_current=74e-9, gamma_phi=1.0)
        with pytest.raises(ValidationError):
            QubitParams(delta=1.0, persistent_current=-1e-9, gamma_phi=1.0)
        with pytest.raises(ValidationError):
            QubitParams(delta=1.0, persistent_current=74e-9, gamma_phi=0.0)
        # gamma_phi below gamma_1/2 would mean negative pure dephasing
        with pytest.raises(ValidationError):
            QubitParams(
                delta=1.0, persistent_current=74e-9, gamma_phi=1.0, gamma_1=3.0
            )

    def test_qubit_gamma_1_defaults_to_gamma_phi(self):
        q = QubitParams(delta=1.0, persistent_current=74e-9, gamma_phi=5.0)
        assert q.gamma_1 == 5.0
        assert q.pure_dephasing == pytest.approx(2.5)

    def test_mode_parameters(self):
        with pytest.raises(ValidationError):
            ResonatorMode(index=0, omega=1e9, kappa=1e3)
        with pytest.raises(ValidationError):
            ResonatorMode(index=1, omega=-1e9, kappa=1e3)
        # low-Q mode violates the resolved-linewidth assumption
        with pytest.raises(ValidationError):
            ResonatorMode(index=1, omega=1e9, kappa=2e6)

    def test_geometry_parameters(self):
        with pytest.raises(ValidationError):
            CouplingGeometry(mutual_inductance=0.0, resonator_inductance=11e-9)
        with pytest.raises(ValidationError):
            CouplingGeometry(mutual_inductance=11e-9, resonator_inductance=11e-9)

    def test_functions_reject_out_of_window_flux(self, qubit_s):
        with pytest.raises(ValidationError):
            energy_bias(qubit_s, 0.7)
        with pytest.raises(ValidationError):
            transition_frequency(qubit_s, -0.51)

"""Sweep generation: forward model, seeded noise, trace packaging."""

import numpy as np
import pytest

import helpers
from fluxcav import TWO_PI
from fluxcav.config import parse_config_text
from fluxcav.errors import ValidationError
from fluxcav.semiclassical import QubitGroup, group_susceptibility
from fluxcav.sweep import (
    DEFAULT_KAPPA_HZ,
    DEFAULT_OMEGA_HZ,
    SweepConfig,
    default_mode,
    phase_noise,
    run_sweep,
    sweep_config_from_map,
)

S_TEXT = """\
sweep.flux_start = -0.02
sweep.flux_stop = 0.02
sweep.steps = 401
sweep.modes = 3
group.S.count = 8
group.S.delta = 5.6GHz
group.S.current = 74nA
group.S.gamma_phi = 53MHz
"""


def config_from(text, seed=None):
    return sweep_config_from_map(parse_config_text(text), seed=seed)


class TestDefaultTable:
    def test_harmonics_follow_fundamental(self):
        for j in (3, 4, 5):
            assert DEFAULT_OMEGA_HZ[j] == j * 2.594e9
        assert default_mode(3).omega == pytest.approx(TWO_PI * 3 * 2.594e9)
        assert default_mode(1).kappa == pytest.approx(TWO_PI * 55.5e3)

    def test_linewidths(self):
        assert [DEFAULT_KAPPA_HZ[j] for j in (1, 2, 3, 4, 5)] == [
            55.5e3, 216e3, 715e3, 950e3, 1400e3,
        ]

    def test_unknown_index(self):
        with pytest.raises(ValidationError):
            default_mode(6)


class TestPhaseNoise:
    def test_zero_sigma_is_exactly_zero(self):
        noise = phase_noise(seed=1, mode_index=3, count=100, sigma=0.0)
        assert np.all(noise == 0.0)

    def test_deterministic_given_seed(self):
        a = phase_noise(seed=7, mode_index=3, count=50, sigma=1e-3)
        b = phase_noise(seed=7, mode_index=3, count=50, sigma=1e-3)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ_between_modes_and_seeds(self):
        base = phase_noise(seed=7, mode_index=3, count=50, sigma=1e-3)
        assert not np.array_equal(base, phase_noise(7, 1, 50, 1e-3))
        assert not np.array_equal(base, phase_noise(8, 3, 50, 1e-3))

    def test_per_point_seeding_is_length_independent(self):
        # each sample has its own generator, so a longer sweep shares its
        # prefix with a shorter one
        long = phase_noise(seed=7, mode_index=3, count=20, sigma=1e-3)
        short = phase_noise(seed=7, mode_index=3, count=5, sigma=1e-3)
        np.testing.assert_array_equal(long[:5], short)


class TestRunSweep:
    def test_matches_forward_model(self, mode3):
        config = config_from(S_TEXT)
        trace = run_sweep(config)[3]
        spec = config.groups[0]
        group = QubitGroup(
            count=8.0, delta=spec.delta, current=spec.current,
            gamma_phi=spec.gamma_phi,
            g_bare=spec.coupling_for(mode3, config.geometry),
        )
        flux = config.flux_grid()
        s = group_susceptibility([group], flux, mode3.omega)
        expected_phase = np.arctan2(s.imag, mode3.kappa / 2.0 + s.real)
        drive = config.drive_ratio * mode3.kappa
        expected_amp = (drive / 2.0) / np.abs(mode3.kappa / 2.0 + s)
        np.testing.assert_allclose(trace.phase, expected_phase, atol=1e-15)
        np.testing.assert_allclose(trace.amplitude, expected_amp, rtol=1e-14)

    def test_trace_carries_provenance(self):
        config = config_from(S_TEXT, seed=5)
        trace = run_sweep(config)[3]
        assert trace.mode_index == 3
        assert trace.seed == 5
        assert trace.config_hash == config.config_hash
        assert trace.omega_hz == pytest.approx(3 * 2.594e9)
        assert trace.size == 401

    def test_zero_count_group_is_inert(self):
        with_zero = config_from(
            S_TEXT
            + "group.T.count = 0\n"
            + "group.T.delta = 6GHz\n"
            + "group.T.current = 80nA\n"
            + "group.T.gamma_phi = 40MHz\n"
        )
        base = config_from(S_TEXT)
        np.testing.assert_array_equal(
            run_sweep(with_zero)[3].phase, run_sweep(base)[3].phase
        )

    def test_no_groups_gives_bare_response(self):
        config = config_from("sweep.steps = 51\n")
        trace = run_sweep(config)[3]
        assert np.all(trace.phase == 0.0)
        np.testing.assert_allclose(trace.amplitude, config.drive_ratio, rtol=1e-14)

    def test_noise_is_reproducible(self):
        noisy = S_TEXT + "noise.sigma = 0.5mrad\n"
        a = run_sweep(config_from(noisy, seed=3))[3]
        b = run_sweep(config_from(noisy, seed=3))[3]
        c = run_sweep(config_from(noisy, seed=4))[3]
        np.testing.assert_array_equal(a.phase, b.phase)
        assert not np.array_equal(a.phase, c.phase)

    def test_multi_mode_sweep(self):
        config = config_from(S_TEXT.replace("sweep.modes = 3", "sweep.modes = 1,3"))
        traces = run_sweep(config)
        assert sorted(traces) == [1, 3]
        # fundamental sits far below the qubit gap: dispersive, featureless
        assert np.max(np.abs(traces[1].phase)) < np.max(np.abs(traces[3].phase))


class TestSweepConfigValidation:
    def base(self, **overrides):
        fields = dict(
            flux_start=-0.02, flux_stop=0.02, steps=101, modes=(3,),
            resonator={3: default_mode(3)}, groups=(),
            geometry=helpers.DEFAULT_GEOMETRY,
        )
        fields.update(overrides)
        return SweepConfig(**fields)

    def test_accepts_valid(self):
        self.base()

    def test_rejects_bad_grid(self):
        with pytest.raises(ValidationError):
            self.base(steps=1)
        with pytest.raises(ValidationError):
            self.base(flux_start=0.03, flux_stop=0.02)
        with pytest.raises(ValidationError):
            self.base(flux_start=-0.6)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValidationError):
            self.base(modes=(2,))

    def test_rejects_bad_noise_and_drive(self):
        with pytest.raises(ValidationError):
            self.base(noise_sigma=-1e-3)
        with pytest.raises(ValidationError):
            self.base(drive_ratio=0.0)

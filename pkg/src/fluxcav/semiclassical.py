"""Semiclassical cavity response of a driven mode loaded with flux qubits.

In the rotating frame of the (resonant) drive, the mean cavity field obeys
the linear equation of motion

    d<a>/dt = -(kappa/2 + S) <a> + i f/2,
    S       = sum_i g_eps_i**2 / (gamma_phi_i + 1j*delta_i),

valid for weak driving (|<a>|**2 << 1, so <sigma_z> = -1) and strong
dephasing.  Each qubit only ever adds damping: Re S >= 0.  The stationary
field is ``<a> = (i f/2) / (kappa/2 + S)`` and the transmission phase shift
is measured relative to the bare cavity,

    phi = arg(<a>_bare) - arg(<a>) = atan2(Im S, kappa/2 + Re S),

which for ``n`` identical resonant qubits reduces to the closed form

    tan(phi) = -2 n g**2 delta / (kappa*(gamma**2 + delta**2) + 2 n g**2 gamma).

Far off resonance (|delta| >> gamma) this further simplifies to the
dispersive shift ``tan(phi) = -2 n g**2 / (kappa * delta)``.

Saturation (``sigma_z_saturation``) and nearest-neighbour qubit-qubit
coupling (``sigma_minus_with_qq``) corrections are provided to check that
both are negligible in the weak-drive, strong-dephasing regime; neither
enters the forward model itself.
"""

import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constants import CONSTANTS
from .core import (
    CouplingGeometry,
    QubitParams,
    ResonatorMode,
    bare_coupling,
    flux_value,
)
from .errors import (
    PerturbativeCouplingWarning,
    StepTooLarge,
    UnstableRegime,
    ValidationError,
    WeakDriveViolation,
    ZeroDetuning,
)

__all__ = [
    "CouplingRule",
    "Ensemble",
    "DriveSpec",
    "CavityResponse",
    "QubitGroup",
    "homogeneous_ensemble",
    "ensemble_groups",
    "group_susceptibility",
    "group_phase",
    "qubit_susceptibility",
    "steady_state_field",
    "sweep_response",
    "phase_shift_resonant",
    "phase_shift_dispersive",
    "sigma_z_saturation",
    "sigma_minus_with_qq",
    "integrate_field",
]

# 2*Phi0/hbar, converts flux (Phi0 units) times current (A) to rad/s
EPS_COEF = 2.0 * CONSTANTS.flux_quantum / CONSTANTS.hbar

WEAK_DRIVE_PHOTON_LIMIT = 0.1
DEFAULT_DRIVE_RATIO = 0.1


@dataclass(frozen=True)
class CouplingRule:
    """How each qubit couples to each mode.

    ``overrides`` maps a mode index to a fixed bare coupling (rad/s) applied
    to every qubit at that mode (e.g. a capacitive coupling measured rather
    than derived); all other modes use the inductive geometry formula.
    """

    geometry: CouplingGeometry | None = None
    overrides: Mapping[int, float] = field(default_factory=dict)

    def bare(self, q: QubitParams, mode: ResonatorMode) -> float:
        if mode.index in self.overrides:
            return float(self.overrides[mode.index])
        if self.geometry is None:
            raise ValidationError(
                f"no coupling defined for mode {mode.index}: provide a "
                "geometry or a per-mode override"
            )
        return bare_coupling(self.geometry, q, mode)


@dataclass(frozen=True)
class Ensemble:
    """A set of qubits sharing a coupling rule.

    ``g_qq`` is the nearest-neighbour qubit-qubit coupling (rad/s).  It is
    kept only to quantify the first-order correction (see
    ``sigma_minus_with_qq``); the forward model neglects it, which requires
    ``g_qq`` well below the dephasing rates.
    """

    qubits: tuple[QubitParams, ...]
    coupling: CouplingRule
    g_qq: float = 0.0

    def __post_init__(self) -> None:
        if len(self.qubits) == 0:
            raise ValidationError("ensemble must contain at least one qubit")
        if self.g_qq < 0:
            raise ValidationError("g_qq must be >= 0")
        min_gamma = min(q.gamma_phi for q in self.qubits)
        if self.g_qq > 0 and self.g_qq >= min_gamma / 10.0:
            warnings.warn(
                f"g_qq = {self.g_qq:.3e} rad/s is not small against the "
                f"dephasing ({min_gamma:.3e} rad/s); first-order neglect "
                "of qubit-qubit coupling is questionable",
                PerturbativeCouplingWarning,
                stacklevel=2,
            )

    @property
    def size(self) -> int:
        return len(self.qubits)


def homogeneous_ensemble(
    count: int,
    delta: float,
    current: float,
    gamma_phi: float,
    coupling: CouplingRule,
    gamma_1: float | None = None,
    g_qq: float = 0.0,
    prefix: str = "q",
) -> Ensemble:
    """Ensemble of ``count`` identical qubits labelled ``prefix0..``."""
    qubits = tuple(
        QubitParams(delta, current, gamma_phi, gamma_1, label=f"{prefix}{i}")
        for i in range(count)
    )
    return Ensemble(qubits=qubits, coupling=coupling, g_qq=g_qq)


@dataclass(frozen=True)
class DriveSpec:
    """Resonant probe tone: strength f (rad/s) at the probed mode frequency.

    ``strength`` may be zero for undriven time integration; the stationary
    response requires a positive probe (the phase is undefined otherwise).
    """

    strength: float
    frequency: float

    def __post_init__(self) -> None:
        if self.strength < 0:
            raise ValidationError("drive strength must be >= 0")
        if self.frequency <= 0:
            raise ValidationError("drive frequency must be > 0")

    @classmethod
    def resonant(cls, mode: ResonatorMode, ratio: float = DEFAULT_DRIVE_RATIO) -> "DriveSpec":
        """Drive at the mode frequency with strength ``ratio * kappa``."""
        return cls(strength=ratio * mode.kappa, frequency=mode.omega)


@dataclass(frozen=True)
class CavityResponse:
    """Stationary field, its phase shift against the bare cavity, and |<a>|."""

    field: complex
    phase_shift: float
    amplitude: float


@dataclass(frozen=True)
class QubitGroup:
    """``count`` identical qubits as one summand of the susceptibility.

    ``count`` may be fractional; estimation routines use that to treat the
    qubit number as a continuous fit parameter.
    """

    count: float
    delta: float
    current: float
    gamma_phi: float
    g_bare: float


def ensemble_groups(ens: Ensemble, mode: ResonatorMode) -> tuple[QubitGroup, ...]:
    """Resolve an ensemble into per-qubit groups for the given mode."""
    return tuple(
        QubitGroup(
            count=1.0,
            delta=q.delta,
            current=q.persistent_current,
            gamma_phi=q.gamma_phi,
            g_bare=ens.coupling.bare(q, mode),
        )
        for q in ens.qubits
    )


def _group_arrays(groups) -> tuple[np.ndarray, ...]:
    g = list(groups)
    return (
        np.array([p.count for p in g], dtype=np.float64),
        np.array([p.delta for p in g], dtype=np.float64),
        np.array([p.current for p in g], dtype=np.float64),
        np.array([p.g_bare for p in g], dtype=np.float64),
        np.array([p.gamma_phi for p in g], dtype=np.float64),
    )


def group_susceptibility(groups, flux, omega: float) -> np.ndarray:
    """Summed complex susceptibility S(x) of the groups over a flux grid."""
    counts, delta, current, g_bare, gamma_phi = _group_arrays(groups)
    x = np.atleast_1d(np.asarray(flux, dtype=np.float64))
    return kernels.susceptibility_grid(
        x, counts, delta, current, g_bare, gamma_phi, omega, EPS_COEF
    )


def _phase_from_susceptibility(s: np.ndarray, kappa: float) -> np.ndarray:
    denom = kappa / 2.0 + s.real
    if np.any(denom <= 0):
        raise UnstableRegime(
            "effective damping is non-positive; sign convention violated"
        )
    return np.arctan2(s.imag, denom)


def group_phase(groups, mode: ResonatorMode, flux) -> np.ndarray:
    """Transmission phase shift over a flux grid (drive-strength independent)."""
    s = group_susceptibility(groups, flux, mode.omega)
    return _phase_from_susceptibility(s, mode.kappa)


def qubit_susceptibility(q: QubitParams, g_eps: float, detuning: float) -> complex:
    """Per-qubit damping term ``g_eps**2 / (gamma_phi + 1j*detuning)``."""
    if q.gamma_phi <= 0:
        raise ValidationError("gamma_phi must be > 0")
    return g_eps**2 / (q.gamma_phi + 1j * detuning)


def _check_resonant(drive: DriveSpec, mode: ResonatorMode) -> None:
    if not math.isclose(drive.frequency, mode.omega, rel_tol=1e-12):
        raise ValidationError(
            "only resonant probing is modeled: drive frequency must equal "
            "the probed mode frequency"
        )


def steady_state_field(
    ens: Ensemble,
    mode: ResonatorMode,
    flux,
    drive: DriveSpec,
) -> CavityResponse:
    """Stationary cavity field at one flux point.

    The phase shift is relative to the bare cavity and lies in
    (-pi/2, pi/2); a warning is emitted if the solved photon number exceeds
    the weak-drive regime.
    """
    if drive.strength == 0:
        raise ValidationError("stationary response needs a positive probe tone")
    _check_resonant(drive, mode)
    x = flux_value(flux)
    s = group_susceptibility(ensemble_groups(ens, mode), x, mode.omega)[0]
    denom = mode.kappa / 2.0 + s
    if denom.real <= 0:
        raise UnstableRegime(
            "effective damping is non-positive; sign convention violated"
        )
    a = 1j * drive.strength / 2.0 / denom
    if abs(a) ** 2 >= WEAK_DRIVE_PHOTON_LIMIT:
        warnings.warn(
            f"|<a>|^2 = {abs(a) ** 2:.3g} exceeds the weak-drive regime",
            WeakDriveViolation,
            stacklevel=2,
        )
    return CavityResponse(
        field=complex(a),
        phase_shift=float(math.atan2(s.imag, mode.kappa / 2.0 + s.real)),
        amplitude=float(abs(a)),
    )


def sweep_response(
    ens: Ensemble,
    mode: ResonatorMode,
    flux,
    drive: DriveSpec,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized ``steady_state_field``: (phase, amplitude, field) arrays."""
    if drive.strength == 0:
        raise ValidationError("stationary response needs a positive probe tone")
    _check_resonant(drive, mode)
    x = np.asarray(flux, dtype=np.float64)
    s = group_susceptibility(ensemble_groups(ens, mode), x, mode.omega)
    phase = _phase_from_susceptibility(s, mode.kappa)
    a = 1j * drive.strength / 2.0 / (mode.kappa / 2.0 + s)
    return phase, np.abs(a), a


def phase_shift_resonant(n, g_eps, gamma_phi, kappa, detuning):
    """Closed-form phase shift of ``n`` identical qubits at detuning ``delta``.

    Odd in the detuning, zero on resonance, and decaying to zero far away.
    Accepts scalars or arrays.
    """
    delta = np.asarray(detuning, dtype=np.float64)
    num = -2.0 * n * g_eps**2 * delta
    den = kappa * (gamma_phi**2 + delta**2) + 2.0 * n * g_eps**2 * gamma_phi
    out = np.arctan(num / den)
    return float(out) if np.isscalar(detuning) else out


def phase_shift_dispersive(n, g_eps, kappa, detuning):
    """Far-detuned phase shift ``atan(-2 n g**2 / (kappa * delta))``."""
    delta = np.asarray(detuning, dtype=np.float64)
    if np.any(delta == 0):
        raise ZeroDetuning("dispersive formula is invalid on resonance")
    out = np.arctan(-2.0 * n * g_eps**2 / (kappa * delta))
    return float(out) if np.isscalar(detuning) else out


def sigma_z_saturation(
    g: float, gamma_1: float, gamma_phi: float, detuning: float, photon_sq: float
) -> float:
    """Stationary ``<sigma_z>`` including drive saturation; -1 at zero field."""
    if gamma_1 <= 0 or gamma_phi <= 0:
        raise ValidationError("rates must be > 0")
    x = (4.0 * g**2 / gamma_1) * (
        gamma_phi * photon_sq / (gamma_phi**2 + detuning**2)
    )
    return -1.0 / (1.0 + x)


def sigma_minus_with_qq(
    g: float, g_qq: float, gamma_phi: float, detuning: float, field: complex
) -> complex:
    """Stationary ``<sigma_->`` to first order in the qubit-qubit coupling.

    The correction term is down by ``2*g_qq/sqrt(gamma_phi**2 + detuning**2)``
    relative to the leading term, hence negligible for ``g_qq << gamma_phi``.
    """
    if gamma_phi <= 0:
        raise ValidationError("gamma_phi must be > 0")
    den = gamma_phi + 1j * detuning
    return -1j * g * field / den - 2.0 * g_qq * g * field / den**2


@dataclass(frozen=True)
class FieldTrajectory:
    """Time grid and complex field values from explicit integration."""

    times: np.ndarray
    values: np.ndarray

    @property
    def final(self) -> complex:
        return complex(self.values[-1])


def integrate_field(
    ens: Ensemble,
    mode: ResonatorMode,
    flux,
    drive: DriveSpec,
    t_end: float,
    dt: float | None = None,
) -> FieldTrajectory:
    """Integrate the field equation from <a>(0) = 0 with fixed-step RK4.

    The equation is linear with a single attracting fixed point, so the
    final value converges to the stationary field as ``t_end`` grows.
    Default step is ``0.01/kappa``; a step violating the stability bound
    ``dt < 0.1 / (kappa + |kappa/2 + S|)`` raises ``StepTooLarge``.
    """
    _check_resonant(drive, mode)
    x = flux_value(flux)
    s = group_susceptibility(ensemble_groups(ens, mode), x, mode.omega)[0]
    lam = -(mode.kappa / 2.0 + s)
    c = 1j * drive.strength / 2.0
    if dt is None:
        dt = 0.01 / mode.kappa
    rate_scale = mode.kappa + abs(lam)
    if dt >= 0.1 / rate_scale:
        raise StepTooLarge(
            f"dt = {dt:.3e} s violates the stability bound "
            f"{0.1 / rate_scale:.3e} s"
        )
    n_steps = max(1, int(math.ceil(t_end / dt)))
    times = np.linspace(0.0, n_steps * dt, n_steps + 1)
    values = np.empty(n_steps + 1, dtype=np.complex128)
    a = 0.0 + 0.0j
    values[0] = a

    def rhs(v):
        return lam * v + c

    for i in range(1, n_steps + 1):
        k1 = rhs(a)
        k2 = rhs(a + 0.5 * dt * k1)
        k3 = rhs(a + 0.5 * dt * k2)
        k4 = rhs(a + dt * k3)
        a = a + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        values[i] = a
    return FieldTrajectory(times=times, values=values)

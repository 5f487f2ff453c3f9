"""Closed-form single-qubit and resonator relations.

A persistent-current (flux) qubit biased by an external flux ``x`` (in units
of the flux quantum, measured from the half-quantum degeneracy point) has an
energy bias ``eps = 2*I*Phi0*x/hbar`` and a transition frequency
``E = sqrt(delta**2 + eps**2)``, where ``delta`` is the minimal level
splitting at the degeneracy point and ``I`` the persistent current.

The inductive coupling of one qubit to resonator mode ``j`` follows from the
sample geometry as ``g = M_qr * I * sqrt(omega_j / (hbar * L_r))``; projected
onto the qubit energy eigenbasis it acquires the transversal factor
``delta/E``.

All frequencies and rates here are angular (rad/s); see :mod:`.constants`.
"""

import math
from dataclasses import dataclass, field

from .constants import CONSTANTS
from .errors import NoCrossing, ValidationError

__all__ = [
    "QubitParams",
    "ResonatorMode",
    "CouplingGeometry",
    "FluxBias",
    "flux_value",
    "energy_bias",
    "transition_frequency",
    "flux_at_frequency",
    "resonance_flux",
    "bare_coupling",
    "transversal_coupling",
    "thermal_photon_number",
]

FLUX_LIMIT = 0.5  # one flux-quantum period; the model is not periodic-aware
_HIGH_Q_RATIO = 1e-3


@dataclass(frozen=True)
class QubitParams:
    """Two-level artificial atom.

    Parameters
    ----------
    delta : float
        Minimal level splitting at the degeneracy point, rad/s.
    persistent_current : float
        Circulating current setting the flux sensitivity, A.
    gamma_phi : float
        Total dephasing rate of the coherence, rad/s.
    gamma_1 : float, optional
        Energy relaxation rate, rad/s.  Defaults to ``gamma_phi`` (an
        assumption, only relevant for the saturation correction); must
        satisfy ``gamma_phi >= gamma_1/2`` so pure dephasing is non-negative.
    """

    delta: float
    persistent_current: float
    gamma_phi: float
    gamma_1: float | None = None
    label: str = "q"

    def __post_init__(self) -> None:
        if self.delta <= 0:
            raise ValidationError(f"qubit {self.label}: delta must be > 0")
        if self.persistent_current <= 0:
            raise ValidationError(
                f"qubit {self.label}: persistent_current must be > 0"
            )
        if self.gamma_phi <= 0:
            raise ValidationError(f"qubit {self.label}: gamma_phi must be > 0")
        if self.gamma_1 is None:
            object.__setattr__(self, "gamma_1", self.gamma_phi)
        if self.gamma_1 < 0:
            raise ValidationError(f"qubit {self.label}: gamma_1 must be >= 0")
        if self.gamma_phi < self.gamma_1 / 2.0:
            raise ValidationError(
                f"qubit {self.label}: gamma_phi must be >= gamma_1/2 "
                "(pure dephasing cannot be negative)"
            )

    @property
    def pure_dephasing(self) -> float:
        """Pure dephasing rate ``gamma_phi - gamma_1/2``, rad/s."""
        return self.gamma_phi - self.gamma_1 / 2.0


@dataclass(frozen=True)
class ResonatorMode:
    """One harmonic of the cavity: index, angular frequency, photon loss rate."""

    index: int
    omega: float
    kappa: float

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValidationError("mode index must be a positive integer")
        if self.omega <= 0 or self.kappa <= 0:
            raise ValidationError("mode omega and kappa must be > 0")
        if self.kappa / self.omega >= _HIGH_Q_RATIO:
            raise ValidationError(
                f"mode {self.index}: kappa/omega = {self.kappa / self.omega:.2e} "
                f"violates the high-Q assumption (< {_HIGH_Q_RATIO:g})"
            )


@dataclass(frozen=True)
class CouplingGeometry:
    """Mutual inductance to the resonator and the resonator inductance."""

    mutual_inductance: float
    resonator_inductance: float

    def __post_init__(self) -> None:
        if self.mutual_inductance <= 0 or self.resonator_inductance <= 0:
            raise ValidationError("inductances must be > 0")
        if self.mutual_inductance >= self.resonator_inductance:
            raise ValidationError("mutual inductance must be < resonator inductance")


@dataclass(frozen=True)
class FluxBias:
    """Flux detuning from the degeneracy point, in units of the flux quantum."""

    value: float = field(default=0.0)

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or abs(self.value) >= FLUX_LIMIT:
            raise ValidationError(
                f"flux bias {self.value!r} outside the modeled window "
                f"(|x| < {FLUX_LIMIT})"
            )


def flux_value(flux: "FluxBias | float") -> float:
    """Coerce a flux argument (``FluxBias`` or bare number) to a validated float."""
    if isinstance(flux, FluxBias):
        return flux.value
    return FluxBias(float(flux)).value


def energy_bias(q: QubitParams, flux: "FluxBias | float") -> float:
    """Energy bias ``2*I*Phi0*x/hbar`` in rad/s; odd and exactly linear in x."""
    x = flux_value(flux)
    return 2.0 * q.persistent_current * CONSTANTS.flux_quantum * x / CONSTANTS.hbar


def transition_frequency(q: QubitParams, flux: "FluxBias | float") -> float:
    """Level splitting ``sqrt(delta**2 + eps**2)`` in rad/s; even in flux."""
    return math.hypot(q.delta, energy_bias(q, flux))


def flux_at_frequency(q: QubitParams, omega: float) -> FluxBias:
    """Non-negative flux where the qubit transition equals ``omega``.

    Raises
    ------
    NoCrossing
        If ``omega`` is below the qubit gap, which the spectrum never reaches.
    """
    if omega < q.delta:
        raise NoCrossing(
            f"target frequency {omega:.4e} rad/s below the qubit gap "
            f"{q.delta:.4e} rad/s"
        )
    eps = math.sqrt((omega - q.delta) * (omega + q.delta))
    x = eps * CONSTANTS.hbar / (2.0 * q.persistent_current * CONSTANTS.flux_quantum)
    return FluxBias(x)


def resonance_flux(q: QubitParams, mode: ResonatorMode) -> FluxBias:
    """Non-negative flux where the qubit crosses the mode; mirror at -flux."""
    return flux_at_frequency(q, mode.omega)


def bare_coupling(
    geom: CouplingGeometry, q: QubitParams, mode: ResonatorMode
) -> float:
    """Inductive qubit-mode coupling ``M*I*sqrt(omega/(hbar*L))`` in rad/s."""
    return (
        geom.mutual_inductance
        * q.persistent_current
        * math.sqrt(mode.omega / (CONSTANTS.hbar * geom.resonator_inductance))
    )


def transversal_coupling(
    q: QubitParams, flux: "FluxBias | float", g_bare: float
) -> float:
    """Coupling projected onto the energy eigenbasis: ``(delta/E) * g_bare``."""
    return q.delta / transition_frequency(q, flux) * g_bare


def thermal_photon_number(mode: ResonatorMode, temperature: float) -> float:
    """Bose-Einstein occupancy ``1/(exp(hbar*omega/kB*T) - 1)``."""
    if temperature <= 0:
        raise ValidationError("temperature must be > 0")
    x = CONSTANTS.hbar * mode.omega / (CONSTANTS.boltzmann * temperature)
    if x > 700.0:  # exp would overflow; occupancy is numerically zero
        return 0.0
    return 1.0 / math.expm1(x)

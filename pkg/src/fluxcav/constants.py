"""Physical constants and unit conventions.

All frequencies and rates inside the package are angular (rad/s).  External
interfaces (configuration files, CSV, CLI output) use cyclic units (Hz), i.e.
the conventional "/2pi" values; conversion happens at the boundary only.

Magnetic flux is handled as the dimensionless detuning from the half-quantum
degeneracy point, (Phi - Phi0/2) / Phi0.

Constants are the exact SI-2019 defining values; hbar and the flux quantum are
derived from h and e so the identities h = 2*pi*hbar and Phi0 = h/(2e) hold to
machine precision.
"""

import math
from dataclasses import dataclass

_H = 6.62607015e-34  # J s, exact
_E = 1.602176634e-19  # C, exact
_KB = 1.380649e-23  # J/K, exact


@dataclass(frozen=True)
class PhysicalConstants:
    h: float = _H
    hbar: float = _H / (2.0 * math.pi)
    flux_quantum: float = _H / (2.0 * _E)
    boltzmann: float = _KB


CONSTANTS = PhysicalConstants()

TWO_PI = 2.0 * math.pi


def cyclic_to_angular(f_hz: float) -> float:
    """Convert a cyclic frequency in Hz to rad/s."""
    return TWO_PI * f_hz


def angular_to_cyclic(omega: float) -> float:
    """Convert an angular frequency in rad/s to Hz."""
    return omega / TWO_PI

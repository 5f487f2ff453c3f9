"""Exception and warning types shared across the package."""


class FluxcavError(Exception):
    """Base class for all package errors."""


class ValidationError(FluxcavError):
    """Invalid input data, parameters or configuration."""


class ConfigError(ValidationError):
    """Malformed configuration file; message carries the offending line."""


class TraceFormatError(ValidationError):
    """Malformed trace file; message carries the offending line."""


class NoCrossing(FluxcavError):
    """The qubit transition never reaches the requested frequency."""


class UnstableRegime(FluxcavError):
    """Effective cavity damping is non-positive; fixed point not attracting."""


class ZeroDetuning(FluxcavError):
    """Dispersive formula evaluated on resonance where it diverges."""


class StepTooLarge(FluxcavError):
    """Integration step violates the explicit-scheme stability bound."""


class DimensionTooLarge(FluxcavError):
    """Truncated Hilbert space exceeds the supported dense-solver size."""


class DegenerateKernel(FluxcavError):
    """Liouvillian kernel has dimension > 1; steady state not unique."""


class FitError(FluxcavError):
    """Base class for estimation failures (CLI exit code 2)."""


class MaxIterations(FitError):
    """Optimizer hit the iteration cap before meeting any tolerance."""


class SingularJacobian(FitError):
    """Normal equations singular; at least one parameter unidentifiable."""


class NoPeak(FitError):
    """Lineshape data is monotone; no resonance peak to fit."""


class FeatureNotFound(FitError):
    """No resonant (antisymmetric) feature present in the trace."""


class UnderDetermined(FitError):
    """Data cannot constrain all requested parameters."""


class ResonantContamination(FitError):
    """Dispersive fit requested on a trace containing a resonant crossing."""


class AmbiguousN(UserWarning):
    """Two qubit-count hypotheses fit almost equally well; smaller one kept."""


class WeakDriveViolation(UserWarning):
    """Solved photon number too large for the weak-drive model."""


class PerturbativeCouplingWarning(UserWarning):
    """Qubit-qubit coupling too large for the first-order treatment."""

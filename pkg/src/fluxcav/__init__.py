"""Flux qubits in a multimode cavity: forward models and estimation.

The package models the transmission phase of a coplanar resonator loaded
with persistent-current qubits, provides a dense Lindblad reference
solver for small systems, and recovers physical parameters (linewidths,
qubit spectra, qubit counts, dephasing and coupling rates) from phase
traces.  A command-line tool (``fluxcav``) wraps sweep generation, the
fits, and built-in round-trip scenarios.
"""

from .constants import CONSTANTS, TWO_PI, angular_to_cyclic, cyclic_to_angular
from .core import (
    CouplingGeometry,
    FluxBias,
    QubitParams,
    ResonatorMode,
    bare_coupling,
    energy_bias,
    flux_at_frequency,
    resonance_flux,
    thermal_photon_number,
    transition_frequency,
    transversal_coupling,
)
from .errors import (
    AmbiguousN,
    ConfigError,
    DegenerateKernel,
    DimensionTooLarge,
    FeatureNotFound,
    FitError,
    FluxcavError,
    MaxIterations,
    NoCrossing,
    NoPeak,
    PerturbativeCouplingWarning,
    ResonantContamination,
    SingularJacobian,
    StepTooLarge,
    TraceFormatError,
    UnderDetermined,
    UnstableRegime,
    ValidationError,
    WeakDriveViolation,
    ZeroDetuning,
)
from .fitting import (
    CrossingPoint,
    FitResult,
    LeastSquaresProblem,
    ModeFitSetup,
    detect_crossings,
    fit_dispersive,
    fit_lorentzian,
    fit_resonant_mode,
    fit_spectrum,
    fit_two_modes,
    solve_least_squares,
)
from .semiclassical import (
    CavityResponse,
    CouplingRule,
    DriveSpec,
    Ensemble,
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
from .lindblad import (
    DiscrepancyReport,
    QuantumModel,
    compare_semiclassical,
    model_from_ensemble,
    steady_state,
)
from .scenarios import SCENARIO_NAMES, run_scenario, scenario_config
from .sweep import GroupSpec, SweepConfig, run_sweep, sweep_config_from_map
from .trace import PhaseTrace, export_trace, import_trace

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "CONSTANTS",
    "TWO_PI",
    "angular_to_cyclic",
    "cyclic_to_angular",
    "QubitParams",
    "ResonatorMode",
    "CouplingGeometry",
    "FluxBias",
    "energy_bias",
    "transition_frequency",
    "flux_at_frequency",
    "resonance_flux",
    "bare_coupling",
    "transversal_coupling",
    "thermal_photon_number",
    "CouplingRule",
    "Ensemble",
    "DriveSpec",
    "CavityResponse",
    "QubitGroup",
    "homogeneous_ensemble",
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
    "QuantumModel",
    "model_from_ensemble",
    "steady_state",
    "DiscrepancyReport",
    "compare_semiclassical",
    "LeastSquaresProblem",
    "FitResult",
    "CrossingPoint",
    "ModeFitSetup",
    "solve_least_squares",
    "fit_lorentzian",
    "detect_crossings",
    "fit_spectrum",
    "fit_resonant_mode",
    "fit_two_modes",
    "fit_dispersive",
    "PhaseTrace",
    "export_trace",
    "import_trace",
    "SweepConfig",
    "GroupSpec",
    "sweep_config_from_map",
    "run_sweep",
    "SCENARIO_NAMES",
    "scenario_config",
    "run_scenario",
    "FluxcavError",
    "ValidationError",
    "ConfigError",
    "TraceFormatError",
    "NoCrossing",
    "UnstableRegime",
    "ZeroDetuning",
    "StepTooLarge",
    "DimensionTooLarge",
    "DegenerateKernel",
    "FitError",
    "MaxIterations",
    "SingularJacobian",
    "NoPeak",
    "FeatureNotFound",
    "UnderDetermined",
    "ResonantContamination",
    "AmbiguousN",
    "WeakDriveViolation",
    "PerturbativeCouplingWarning",
]

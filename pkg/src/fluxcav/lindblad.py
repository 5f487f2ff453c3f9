"""Dense Lindblad steady state for a driven mode coupled to few qubits.

This is the reference solver the semiclassical model is checked against.
Everything is written in the frame rotating at the drive, which is taken
resonant with the probed mode, so the Hamiltonian is

    H = sum_i (delta_i/2) sigma_z_i
        + sum_i g_i (sigma_+_i a + sigma_-_i a')
        - (f/2) (a + a'),

with delta_i the qubit-drive detuning and g_i the transversal coupling.
Dissipation enters through collapse operators sqrt(kappa) a,
sqrt(gamma_1_i) sigma_-_i and sqrt(gamma_phi_i* / 2) sigma_z_i, where
``gamma_phi* = gamma_phi - gamma_1/2`` is the pure dephasing rate; with
this split the qubit coherence decays at exactly ``gamma_phi``.

The drive sign is chosen so the bare cavity settles at ``<a> = i f / kappa``
(phase +pi/2), matching the semiclassical convention; the observable phase
shift is ``arg(<a>_bare) - arg(<a>)``.

Superoperators use row-major vectorization, ``vec(A rho B) =
(A kron B^T) vec(rho)``, and the solver is dense, limited to Hilbert-space
dimension 64 (e.g. four qubits with four photon states).
"""

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np
from scipy.linalg import svdvals

from .core import (
    ResonatorMode,
    flux_value,
    transition_frequency,
    transversal_coupling,
)
from .errors import DegenerateKernel, DimensionTooLarge, ValidationError
from .semiclassical import DriveSpec, Ensemble, ensemble_groups, steady_state_field

__all__ = [
    "MAX_DIMENSION",
    "QuantumModel",
    "model_from_ensemble",
    "annihilation",
    "system_operators",
    "hamiltonian",
    "collapse_operators",
    "liouvillian",
    "kernel_dimension",
    "steady_state",
    "expectation",
    "cavity_field",
    "photon_number",
    "qubit_inversion",
    "occupation_of_top_level",
    "phase_shift",
    "bare_field",
    "DiscrepancyReport",
    "compare_semiclassical",
]

MAX_DIMENSION = 64
KERNEL_RTOL = 1e-10

_SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
_SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=np.complex128)


@dataclass(frozen=True)
class QuantumModel:
    """Truncated driven cavity with qubits, in the resonant rotating frame.

    Parameters
    ----------
    photon_cutoff : int
        Highest Fock state kept; the cavity has ``photon_cutoff + 1`` levels.
    detunings, couplings, gamma_phi, gamma_1 : tuple of float
        Per-qubit detuning from the drive, transversal coupling, coherence
        decay rate and energy relaxation rate, all rad/s.
    kappa : float
        Cavity linewidth, rad/s.
    drive : float
        Drive strength f, rad/s.
    """

    photon_cutoff: int
    detunings: tuple[float, ...]
    couplings: tuple[float, ...]
    gamma_phi: tuple[float, ...]
    gamma_1: tuple[float, ...]
    kappa: float
    drive: float

    def __post_init__(self) -> None:
        if self.photon_cutoff < 1:
            raise ValidationError("photon_cutoff must be >= 1")
        n = len(self.detunings)
        if not (len(self.couplings) == len(self.gamma_phi) == len(self.gamma_1) == n):
            raise ValidationError("per-qubit parameter tuples must share a length")
        if self.kappa <= 0:
            raise ValidationError("kappa must be > 0")
        if self.drive < 0:
            raise ValidationError("drive must be >= 0")
        for i in range(n):
            if self.gamma_phi[i] <= 0:
                raise ValidationError("gamma_phi must be > 0")
            if self.gamma_1[i] < 0:
                raise ValidationError("gamma_1 must be >= 0")
            if self.gamma_phi[i] < self.gamma_1[i] / 2.0:
                raise ValidationError("pure dephasing gamma_phi - gamma_1/2 < 0")
        if self.dimension > MAX_DIMENSION:
            raise DimensionTooLarge(
                f"Hilbert space dimension {self.dimension} exceeds the dense "
                f"solver limit {MAX_DIMENSION}"
            )

    @property
    def n_qubits(self) -> int:
        return len(self.detunings)

    @property
    def cavity_levels(self) -> int:
        return self.photon_cutoff + 1

    @property
    def dimension(self) -> int:
        return self.cavity_levels * 2**self.n_qubits


def model_from_ensemble(
    ens: Ensemble,
    mode: ResonatorMode,
    flux,
    drive: DriveSpec,
    photon_cutoff: int,
) -> QuantumModel:
    """Quantum model of an ensemble probed resonantly at one flux point."""
    if not math.isclose(drive.frequency, mode.omega, rel_tol=1e-12):
        raise ValidationError("drive frequency must equal the probed mode frequency")
    x = flux_value(flux)
    groups = ensemble_groups(ens, mode)
    detunings = []
    couplings = []
    for q, grp in zip(ens.qubits, groups):
        detunings.append(transition_frequency(q, x) - mode.omega)
        couplings.append(transversal_coupling(q, x, grp.g_bare))
    return QuantumModel(
        photon_cutoff=photon_cutoff,
        detunings=tuple(detunings),
        couplings=tuple(couplings),
        gamma_phi=tuple(q.gamma_phi for q in ens.qubits),
        gamma_1=tuple(q.gamma_1 for q in ens.qubits),
        kappa=mode.kappa,
        drive=drive.strength,
    )


def annihilation(levels: int) -> np.ndarray:
    """Cavity lowering operator on ``levels`` Fock states."""
    a = np.zeros((levels, levels), dtype=np.complex128)
    for n in range(1, levels):
        a[n - 1, n] = math.sqrt(n)
    return a


def _kron_chain(mats) -> np.ndarray:
    return reduce(np.kron, mats)


def system_operators(model: QuantumModel):
    """Full-space operators: ``(a, sigma_minus[], sigma_z[])``.

    Ordering is cavity first, then qubit 0, qubit 1, ...; qubit basis is
    (ground, excited) so sigma_z = diag(-1, +1).
    """
    eye_c = np.eye(model.cavity_levels, dtype=np.complex128)
    eye_q = np.eye(2, dtype=np.complex128)
    a = _kron_chain([annihilation(model.cavity_levels)] + [eye_q] * model.n_qubits)
    sm = []
    sz = []
    for i in range(model.n_qubits):
        mats_m = [eye_c] + [eye_q] * model.n_qubits
        mats_z = [eye_c] + [eye_q] * model.n_qubits
        mats_m[1 + i] = _SIGMA_MINUS
        mats_z[1 + i] = _SIGMA_Z
        sm.append(_kron_chain(mats_m))
        sz.append(_kron_chain(mats_z))
    return a, sm, sz


def hamiltonian(model: QuantumModel) -> np.ndarray:
    """Rotating-frame Hamiltonian in rad/s (hbar = 1)."""
    a, sm, sz = system_operators(model)
    ad = a.conj().T
    h = -(model.drive / 2.0) * (a + ad)
    for i in range(model.n_qubits):
        sp = sm[i].conj().T
        h = h + (model.detunings[i] / 2.0) * sz[i]
        h = h + model.couplings[i] * (sp @ a + sm[i] @ ad)
    return h


def collapse_operators(model: QuantumModel) -> list[np.ndarray]:
    """Photon loss, qubit relaxation and pure dephasing, as sqrt-rate ops."""
    a, sm, sz = system_operators(model)
    ops = [math.sqrt(model.kappa) * a]
    for i in range(model.n_qubits):
        if model.gamma_1[i] > 0:
            ops.append(math.sqrt(model.gamma_1[i]) * sm[i])
        pure = model.gamma_phi[i] - model.gamma_1[i] / 2.0
        if pure > 0:
            ops.append(math.sqrt(pure / 2.0) * sz[i])
    return ops


def _spre(op: np.ndarray) -> np.ndarray:
    return np.kron(op, np.eye(op.shape[0], dtype=np.complex128))


def _spost(op: np.ndarray) -> np.ndarray:
    return np.kron(np.eye(op.shape[0], dtype=np.complex128), op.T)


def liouvillian(model: QuantumModel) -> np.ndarray:
    """Generator L with ``d vec(rho)/dt = L vec(rho)`` (row-major vec)."""
    h = hamiltonian(model)
    lmat = -1j * (_spre(h) - _spost(h))
    for c in collapse_operators(model):
        cdc = c.conj().T @ c
        lmat += np.kron(c, c.conj())
        lmat -= 0.5 * (_spre(cdc) + _spost(cdc))
    return lmat


def kernel_dimension(lmat: np.ndarray, rtol: float = KERNEL_RTOL) -> int:
    """Nullity of the generator from its singular-value spectrum."""
    s = svdvals(lmat)
    if s[0] == 0.0:
        return lmat.shape[0]
    return int(np.count_nonzero(s < rtol * s[0]))


def steady_state(model: QuantumModel, check_unique: bool = False) -> np.ndarray:
    """Stationary density matrix, found by a trace-normalized linear solve.

    One row of ``L vec(rho) = 0`` is replaced by the trace condition.  With
    photon loss and a drive the stationary state is unique; pass
    ``check_unique=True`` to verify that via the kernel dimension (costly:
    a full SVD of the generator).
    """
    lmat = liouvillian(model)
    if check_unique:
        nullity = kernel_dimension(lmat)
        if nullity != 1:
            raise DegenerateKernel(
                f"generator kernel has dimension {nullity}, expected 1"
            )
    dim = model.dimension
    trace_row = np.zeros(dim * dim, dtype=np.complex128)
    trace_row[:: dim + 1] = 1.0
    m = lmat.copy()
    m[0, :] = trace_row
    b = np.zeros(dim * dim, dtype=np.complex128)
    b[0] = 1.0
    try:
        v = np.linalg.solve(m, b)
    except np.linalg.LinAlgError:
        # row replacement can clash with the kernel structure; fall back to
        # least squares on the stacked system
        stacked = np.vstack([lmat, trace_row])
        rhs = np.zeros(dim * dim + 1, dtype=np.complex128)
        rhs[-1] = 1.0
        v = np.linalg.lstsq(stacked, rhs, rcond=None)[0]
    rho = v.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return rho


def expectation(rho: np.ndarray, op: np.ndarray) -> complex:
    """``Tr(op rho)``."""
    return complex(np.trace(op @ rho))


def cavity_field(model: QuantumModel, rho: np.ndarray | None = None) -> complex:
    """``<a>`` in the rotating frame."""
    if rho is None:
        rho = steady_state(model)
    a, _, _ = system_operators(model)
    return expectation(rho, a)


def photon_number(model: QuantumModel, rho: np.ndarray | None = None) -> float:
    """``<a' a>``."""
    if rho is None:
        rho = steady_state(model)
    a, _, _ = system_operators(model)
    return expectation(rho, a.conj().T @ a).real


def qubit_inversion(model: QuantumModel, index: int, rho: np.ndarray | None = None) -> float:
    """``<sigma_z>`` of one qubit; close to -1 in the weak-drive regime."""
    if rho is None:
        rho = steady_state(model)
    _, _, sz = system_operators(model)
    return expectation(rho, sz[index]).real


def occupation_of_top_level(model: QuantumModel, rho: np.ndarray) -> float:
    """Population of the highest kept Fock state; a truncation diagnostic."""
    dim_q = 2**model.n_qubits
    start = model.photon_cutoff * dim_q
    return float(np.trace(rho[start:, start:]).real)


def bare_field(model: QuantumModel) -> complex:
    """Stationary ``<a>`` of the same cavity without qubits: ``i f / kappa``."""
    return 1j * model.drive / model.kappa


def phase_shift(model: QuantumModel, rho: np.ndarray | None = None) -> float:
    """Probe phase shift ``arg(<a>_bare) - arg(<a>)``, wrapped to (-pi, pi]."""
    a = cavity_field(model, rho)
    if a == 0:
        raise ValidationError("cavity field vanished; phase undefined")
    phi = math.pi / 2.0 - math.atan2(a.imag, a.real)
    if phi > math.pi:
        phi -= 2.0 * math.pi
    elif phi <= -math.pi:
        phi += 2.0 * math.pi
    return phi


@dataclass(frozen=True)
class DiscrepancyReport:
    """Worst-case quantum-versus-semiclassical differences over a flux grid."""

    max_phase_diff: float
    max_amplitude_rel_diff: float
    points: int


def compare_semiclassical(
    ens: Ensemble,
    mode: ResonatorMode,
    flux_grid,
    drive: DriveSpec,
    photon_cutoff: int = 6,
) -> DiscrepancyReport:
    """Pointwise quantum-versus-semiclassical phases and amplitudes.

    Solves the full steady state at every flux point and compares it with
    the weak-drive closed form.  Only meaningful in the strong-dephasing
    regime the closed form claims, so ``gamma_phi >= 10 * g_eps`` is
    required for every qubit at every grid point.
    """
    worst_phase = 0.0
    worst_amp = 0.0
    grid = np.atleast_1d(np.asarray(flux_grid, dtype=np.float64))
    for x in grid:
        model = model_from_ensemble(ens, mode, x, drive, photon_cutoff)
        for g, gamma in zip(model.couplings, model.gamma_phi):
            if gamma < 10.0 * abs(g):
                raise ValidationError(
                    "comparison regime requires gamma_phi >= 10 * g_eps "
                    f"(got ratio {gamma / abs(g):.2f} at flux {x:g})"
                )
        rho = steady_state(model)
        quantum_phase = phase_shift(model, rho)
        quantum_amp = abs(cavity_field(model, rho))
        semi = steady_state_field(ens, mode, x, drive)
        worst_phase = max(worst_phase, abs(quantum_phase - semi.phase_shift))
        worst_amp = max(
            worst_amp, abs(quantum_amp - semi.amplitude) / semi.amplitude
        )
    return DiscrepancyReport(
        max_phase_diff=worst_phase,
        max_amplitude_rel_diff=worst_amp,
        points=int(grid.size),
    )

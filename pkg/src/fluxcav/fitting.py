"""Least-squares estimation: linewidths, qubit spectra, and qubit counts.

The inverse problems solved here are those of a flux-sweep phase
measurement: Lorentzian linewidth extraction, locating resonant crossings
in a phase trace, fitting the hyperbolic qubit spectrum through crossing
positions at several harmonics, and recovering the qubit number and the
dephasing rate (or the coupling) from the phase lineshape, either at a
resonant crossing or in the dispersive regime.

All lineshape fits act on the phase alone.  The discrete qubit count is
handled by an exhaustive outer grid with a nested continuous fit of the
dephasing rate, so the continuous optimizer (a hand-rolled
Levenberg-Marquardt loop, `solve_least_squares`) never sees an integer
parameter.  Reported 1-sigma uncertainties come from the linearized
covariance (J^T J)^-1 scaled by the residual variance and are therefore
approximate.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels
from .core import FluxBias, ResonatorMode
from .errors import (
    AmbiguousN,
    FeatureNotFound,
    MaxIterations,
    NoPeak,
    ResonantContamination,
    SingularJacobian,
    UnderDetermined,
    ValidationError,
)
from .semiclassical import EPS_COEF
from .trace import PhaseTrace

__all__ = [
    "LeastSquaresProblem",
    "FitResult",
    "CrossingPoint",
    "solve_least_squares",
    "fit_lorentzian",
    "detect_crossings",
    "fit_spectrum",
    "ModeFitSetup",
    "fit_resonant_mode",
    "fit_two_modes",
    "fit_dispersive",
]

REL_STEP = math.sqrt(np.finfo(np.float64).eps)
LAMBDA_MAX = 1e15
TIE_FRACTION = 0.01
COUNT_GRID_MAX = 40
RATE_LOWER = 1.0
RATE_UPPER = 1e14


@dataclass
class LeastSquaresProblem:
    """A residual to minimize in the 2-norm with box constraints.

    ``residual`` maps a parameter vector to a residual vector whose length
    must be at least the number of parameters.  Bounds are enforced by
    clipping trial steps.  ``x_scale`` sets the absolute floor used for
    relative finite-difference steps and the step-size stopping test.
    """

    residual: Callable[[np.ndarray], np.ndarray]
    initial: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    x_scale: np.ndarray | None = None
    max_iter: int = 200
    ftol: float = 1e-12
    xtol: float = 1e-12
    gtol: float = 1e-10

    def __post_init__(self) -> None:
        x0 = np.atleast_1d(np.asarray(self.initial, dtype=np.float64))
        self.initial = x0
        p = x0.size
        self.lower = (
            np.full(p, -np.inf) if self.lower is None
            else np.broadcast_to(np.asarray(self.lower, float), (p,)).copy()
        )
        self.upper = (
            np.full(p, np.inf) if self.upper is None
            else np.broadcast_to(np.asarray(self.upper, float), (p,)).copy()
        )
        self.x_scale = (
            np.ones(p) if self.x_scale is None
            else np.abs(np.broadcast_to(np.asarray(self.x_scale, float), (p,))).copy()
        )
        if np.any(self.lower >= self.upper):
            raise ValidationError("lower bounds must be strictly below upper bounds")
        if np.any(x0 < self.lower) or np.any(x0 > self.upper):
            raise ValidationError("initial guess violates the bounds")
        if self.max_iter < 1:
            raise ValidationError("max_iter must be >= 1")


@dataclass(frozen=True)
class FitResult:
    """Point estimates with approximate 1-sigma uncertainties."""

    names: tuple[str, ...]
    params: np.ndarray
    uncertainties: np.ndarray
    residual_norm: float
    iterations: int
    converged: bool
    gradient_norm: float = 0.0
    flags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if len(self.names) != len(self.params):
            raise ValidationError("one name per parameter required")
        if np.any(np.asarray(self.uncertainties) < 0):
            raise ValidationError("uncertainties must be >= 0")

    def value(self, name: str) -> float:
        return float(self.params[self.names.index(name)])

    def uncertainty(self, name: str) -> float:
        return float(self.uncertainties[self.names.index(name)])


def _jacobian(fun, x, r0, lower, upper, x_scale) -> np.ndarray:
    jac = np.empty((r0.size, x.size))
    for j in range(x.size):
        h = REL_STEP * max(abs(x[j]), x_scale[j])
        if x[j] + h > upper[j]:
            h = -h
        xp = x.copy()
        xp[j] = min(max(x[j] + h, lower[j]), upper[j])
        dh = xp[j] - x[j]
        if dh == 0.0:
            raise SingularJacobian(f"parameter {j} is pinned by its bounds")
        jac[:, j] = (fun(xp) - r0) / dh
    return jac


def _scaled_gradient(jac, r, cost) -> float:
    """Largest cosine between the residual and a Jacobian column."""
    if cost == 0.0:
        return 0.0
    colnorm = np.sqrt(np.sum(jac**2, axis=0))
    g = jac.T @ r
    safe = np.where(colnorm > 0, colnorm, 1.0)
    return float(np.max(np.abs(g) / (safe * math.sqrt(cost))))


def solve_least_squares(problem: LeastSquaresProblem, strict: bool = True) -> FitResult:
    """Damped Gauss-Newton iteration to a stationary point.

    The damping parameter starts at zero (a pure Gauss-Newton step, exact
    for linear residuals) and is raised only when a step fails to reduce
    the cost, with Marquardt diag(J^T J) scaling.  Deterministic given
    identical inputs.  With ``strict`` unset, hitting the iteration cap
    returns the best point found (``converged=False``) instead of raising.
    """
    fun = problem.residual
    lower, upper, x_scale = problem.lower, problem.upper, problem.x_scale
    x = problem.initial.copy()
    r = np.atleast_1d(np.asarray(fun(x), dtype=np.float64))
    if r.size < x.size:
        raise UnderDetermined(
            f"{r.size} residuals cannot constrain {x.size} parameters"
        )
    cost = float(r @ r)
    lam = 0.0
    converged = False
    iterations = 0
    jac = None
    while iterations < problem.max_iter and not converged:
        iterations += 1
        jac = _jacobian(fun, x, r, lower, upper, x_scale)
        if not np.all(np.isfinite(jac)):
            raise SingularJacobian("non-finite Jacobian entries")
        a = jac.T @ jac
        diag = np.diag(a).copy()
        if np.any(diag <= 0):
            dead = int(np.argmin(diag))
            raise SingularJacobian(
                f"parameter {dead} has no influence on the residual"
            )
        g = jac.T @ r
        if cost == 0.0 or _scaled_gradient(jac, r, cost) <= problem.gtol:
            converged = True
            break
        # Marquardt scaling in normalized coordinates: the damped system
        # then has unit diagonal, so parameters of wildly different
        # magnitude (rates vs currents) do not wreck the conditioning
        d = np.sqrt(diag)
        a_norm = a / np.outer(d, d)
        g_norm = g / d
        while True:
            try:
                dy = np.linalg.solve(a_norm + lam * np.eye(d.size), -g_norm)
            except np.linalg.LinAlgError:
                lam = 1e-4 if lam == 0.0 else lam * 10.0
                if lam > LAMBDA_MAX:
                    raise SingularJacobian("normal equations singular") from None
                continue
            dx = dy / d
            x_trial = np.clip(x + dx, lower, upper)
            step = x_trial - x
            step_small = np.linalg.norm(step) <= problem.xtol * (
                np.linalg.norm(x) + problem.xtol
            )
            r_trial = np.atleast_1d(np.asarray(fun(x_trial), dtype=np.float64))
            cost_trial = float(r_trial @ r_trial)
            if cost_trial <= cost:
                reduction = (cost - cost_trial) / cost if cost > 0 else 1.0
                x, r, cost = x_trial, r_trial, cost_trial
                lam = 0.0 if lam < 1e-12 else lam * 0.25
                if reduction <= problem.ftol or step_small:
                    converged = True
                break
            if step_small:
                converged = True
                break
            lam = 1e-4 if lam == 0.0 else lam * 10.0
            if lam > LAMBDA_MAX:
                # no damped step descends: numerically stationary
                converged = True
                break
    if not converged and strict:
        raise MaxIterations(
            f"no convergence in {problem.max_iter} iterations "
            f"(residual norm {math.sqrt(cost):.3e})"
        )
    jac = _jacobian(fun, x, r, lower, upper, x_scale)
    grad = _scaled_gradient(jac, r, cost)
    dof = max(r.size - x.size, 1)
    a = jac.T @ jac
    diag = np.diag(a).copy()
    if np.any(diag <= 0):
        # a parameter without influence at the optimum is unconstrained
        unc = np.where(diag > 0, 0.0, np.inf)
    else:
        d = np.sqrt(diag)
        cov_norm = np.linalg.pinv(a / np.outer(d, d))
        cov = cov_norm / np.outer(d, d) * (cost / dof)
        unc = np.sqrt(np.clip(np.diag(cov), 0.0, np.inf))
    return FitResult(
        names=tuple(f"p{j}" for j in range(x.size)),
        params=x,
        uncertainties=unc,
        residual_norm=math.sqrt(cost),
        iterations=iterations,
        converged=converged,
        gradient_norm=grad,
    )


def _renamed(res: FitResult, names: tuple[str, ...], **overrides) -> FitResult:
    fields = dict(
        names=names,
        params=res.params,
        uncertainties=res.uncertainties,
        residual_norm=res.residual_norm,
        iterations=res.iterations,
        converged=res.converged,
        gradient_norm=res.gradient_norm,
        flags=res.flags,
    )
    fields.update(overrides)
    return FitResult(**fields)


# ---------------------------------------------------------------------------
# Lorentzian lineshape


def fit_lorentzian(freqs, amplitudes) -> FitResult:
    """Fit ``baseline + h / (1 + (2(w - w0)/kappa)^2)`` to a lineshape.

    ``kappa`` is the full width at half maximum in the same (angular)
    units as ``freqs``.  Result names: center, width, height, baseline.
    """
    w = np.asarray(freqs, dtype=np.float64)
    y = np.asarray(amplitudes, dtype=np.float64)
    if w.shape != y.shape or w.ndim != 1:
        raise ValidationError("freqs and amplitudes must be equal-length 1-d")
    if w.size < 8:
        raise ValidationError("need at least 8 samples to fit a lineshape")
    order = np.argsort(w)
    w, y = w[order], y[order]
    d = np.diff(y)
    if np.all(d >= 0) or np.all(d <= 0):
        raise NoPeak("amplitude data is monotone; no resonance to fit")

    med = float(np.median(y))
    if y.max() - med >= med - y.min():
        center0, base0, h0 = float(w[np.argmax(y)]), float(y.min()), float(y.max() - y.min())
    else:
        center0, base0, h0 = float(w[np.argmin(y)]), float(y.max()), float(y.min() - y.max())
    half = base0 + h0 / 2.0
    above = (y - half) * np.sign(h0) > 0
    span = float(w[-1] - w[0])
    if np.any(above):
        idx = np.flatnonzero(above)
        width0 = float(w[idx[-1]] - w[idx[0]]) or span / 4.0
    else:
        width0 = span / 4.0

    def resid(p):
        center, width, h, base = p
        return base + h / (1.0 + (2.0 * (w - center) / width) ** 2) - y

    scale = max(abs(h0), 1e-12)
    problem = LeastSquaresProblem(
        residual=resid,
        initial=np.array([center0, width0, h0, base0]),
        lower=np.array([w[0] - span, span * 1e-9, -np.inf, -np.inf]),
        upper=np.array([w[-1] + span, np.inf, np.inf, np.inf]),
        x_scale=np.array([span, span, scale, scale]),
    )
    res = solve_least_squares(problem)
    return _renamed(res, ("center", "width", "height", "baseline"))


# ---------------------------------------------------------------------------
# Crossing detection


@dataclass(frozen=True)
class CrossingPoint:
    """Flux position where a qubit transition meets the probed mode."""

    flux: FluxBias
    omega: float
    side: int

    def __post_init__(self) -> None:
        if self.side not in (-1, 1):
            raise ValidationError("side must be -1 or +1")
        if self.omega <= 0:
            raise ValidationError("omega must be > 0")


def _noise_scale(phase: np.ndarray) -> float:
    d2 = np.diff(phase, 2)
    mad = float(np.median(np.abs(d2 - np.median(d2))))
    return 1.4826 * mad / math.sqrt(6.0)


def _smooth(y: np.ndarray, width: int) -> np.ndarray:
    if width <= 1:
        return y
    kernel = np.ones(width) / width
    return np.convolve(y, kernel, mode="same")


def detect_crossings(
    trace: PhaseTrace, min_prominence: float | None = None
) -> list[CrossingPoint]:
    """Locate resonant crossings as the zero between opposite-sign lobes.

    The phase lineshape of a crossing is odd in the qubit detuning, so its
    center is the zero crossing flanked by two prominent lobes of opposite
    sign.  Zeros where tails of neighbouring features cancel have the
    opposite orientation (the phase slope through zero points the wrong
    way for the local flux sign) and are rejected.  Prominence defaults to
    ``max(8 * noise, 1e-4 rad)`` with the noise scale estimated from
    second differences.
    """
    if trace.size < 5:
        raise ValidationError("trace too short for feature detection")
    flux = trace.flux
    phase = trace.phase
    if flux[0] > flux[-1]:
        flux, phase = flux[::-1], phase[::-1]
    sigma = _noise_scale(phase)
    prom = max(8.0 * sigma, 1e-4) if min_prominence is None else float(min_prominence)
    width = 5 if sigma > 0 else 1
    smooth = _smooth(phase, width)

    sign = np.sign(smooth)
    boundaries = np.flatnonzero(sign[:-1] * sign[1:] < 0)
    if boundaries.size == 0:
        raise FeatureNotFound("no zero crossing with prominent lobes in trace")
    # per-segment peak magnitudes (segments delimited by the boundaries)
    edges = [0, *(int(b) + 1 for b in boundaries), smooth.size]
    peaks = [float(np.max(np.abs(smooth[a:b]))) for a, b in zip(edges[:-1], edges[1:])]

    found: list[CrossingPoint] = []
    for k, b in enumerate(boundaries):
        if peaks[k] < prom or peaks[k + 1] < prom:
            continue
        descending = smooth[b] > smooth[b + 1]
        x0 = flux[b] - smooth[b] * (flux[b + 1] - flux[b]) / (smooth[b + 1] - smooth[b])
        # true crossings descend through zero at positive flux and ascend
        # at negative flux (qubit frequency is even in flux and the phase
        # is odd in detuning); tail-cancellation zeros are oriented the
        # other way
        if x0 >= 0 and not descending:
            continue
        if x0 < 0 and descending:
            continue
        found.append(
            CrossingPoint(
                flux=FluxBias(float(x0)),
                omega=trace.omega,
                side=1 if x0 >= 0 else -1,
            )
        )
    if not found:
        raise FeatureNotFound("no zero crossing with prominent lobes in trace")
    return sorted(found, key=lambda c: c.flux.value)


# ---------------------------------------------------------------------------
# Hyperbolic spectrum through crossing positions


def fit_spectrum(points: list[CrossingPoint]) -> FitResult:
    """Fit the two-level spectrum ``sqrt(delta^2 + (c I x)^2)`` through
    crossing positions observed at two or more probe frequencies.

    Result names: delta, current (rad/s and A).
    """
    if len(points) < 2:
        raise UnderDetermined("need crossings from at least two frequencies")
    omegas = np.array([p.omega for p in points])
    x = np.abs(np.array([p.flux.value for p in points]))
    distinct = np.unique(np.round(np.log(omegas), 9))
    if distinct.size < 2:
        raise UnderDetermined(
            "all crossings share one probe frequency; delta and current "
            "are not separable"
        )
    slope, intercept = np.polyfit(x**2, omegas**2, 1)
    delta0 = math.sqrt(max(float(intercept), (1e-3 * omegas.min()) ** 2))
    current0 = math.sqrt(max(float(slope), 1e-6 * float(intercept))) / EPS_COEF

    def resid(p):
        return np.hypot(p[0], EPS_COEF * p[1] * x) - omegas

    problem = LeastSquaresProblem(
        residual=resid,
        initial=np.array([delta0, current0]),
        lower=np.array([RATE_LOWER, 1e-12]),
        upper=np.array([RATE_UPPER, 1e-3]),
        x_scale=np.array([delta0, current0]),
    )
    res = solve_least_squares(problem)
    return _renamed(res, ("delta", "current"))


# ---------------------------------------------------------------------------
# Resonant-mode and dispersive phase fits


@dataclass(frozen=True)
class ModeFitSetup:
    """Fixed quantities for phase-lineshape fits at one probe mode."""

    mode: ResonatorMode
    delta: float
    current: float
    g_bare: float

    def __post_init__(self) -> None:
        if self.delta <= 0 or self.current <= 0 or self.g_bare <= 0:
            raise ValidationError("delta, current and g_bare must be > 0")

    def crossing_flux(self) -> float:
        """Non-negative flux of the crossing, or nan if never resonant."""
        if self.mode.omega <= self.delta:
            return math.nan
        eps = math.sqrt((self.mode.omega - self.delta) * (self.mode.omega + self.delta))
        return eps / (EPS_COEF * self.current)


def _grid_phase(flux, omega, kappa, counts, deltas, currents, g_bares, gammas):
    s = kernels.susceptibility_grid(
        np.asarray(flux, dtype=np.float64),
        np.asarray(counts, dtype=np.float64),
        np.asarray(deltas, dtype=np.float64),
        np.asarray(currents, dtype=np.float64),
        np.asarray(g_bares, dtype=np.float64),
        np.asarray(gammas, dtype=np.float64),
        omega,
        EPS_COEF,
    )
    return np.arctan2(s.imag, kappa / 2.0 + s.real)


def _detuning(setup: ModeFitSetup, flux: np.ndarray) -> np.ndarray:
    return np.hypot(setup.delta, EPS_COEF * setup.current * flux) - setup.mode.omega


def _gamma_guess(trace: PhaseTrace, setup: ModeFitSetup, window=None) -> float:
    """Dephasing guess from the location of the extremal phase lobe.

    The lobes of the resonant lineshape peak near a detuning comparable to
    the dephasing rate, so 0.7 times the detuning of the largest |phase|
    sample is an adequate starting point.
    """
    flux = trace.flux
    phase = trace.phase
    if window is not None:
        flux, phase = flux[window], phase[window]
    if flux.size == 0:
        return 10.0 * setup.mode.kappa
    pk = int(np.argmax(np.abs(phase)))
    guess = 0.7 * abs(_detuning(setup, flux[pk : pk + 1])[0])
    return max(guess, setup.mode.kappa)


def _select_count(records: dict, tie_fraction: float = TIE_FRACTION):
    """Pick the lowest-residual grid cell; near-ties go to the smaller key.

    ``records`` maps a grid key (int or tuple) to a (residual_norm, payload)
    pair.  Returns (key, payload, ambiguous_flag).
    """
    items = sorted(records.items(), key=lambda kv: (kv[1][0], _count_order(kv[0])))
    best_key, (best_res, _) = items[0]
    tied = [
        k
        for k, (r, _) in items
        if (best_res == 0.0 and r == 0.0) or (best_res > 0.0 and r <= best_res * (1.0 + tie_fraction))
    ]
    ambiguous = len(tied) > 1
    chosen = min(tied, key=_count_order) if ambiguous else best_key
    if ambiguous:
        warnings.warn(
            f"qubit counts {sorted(tied, key=_count_order)} fit within "
            f"{100 * tie_fraction:.0f}% of each other; reporting the smallest",
            AmbiguousN,
            stacklevel=3,
        )
    return chosen, records[chosen][1], ambiguous


def _count_order(key):
    if isinstance(key, tuple):
        return (sum(key), *key)
    return (key,)


def fit_resonant_mode(
    trace: PhaseTrace,
    setup: ModeFitSetup,
    free: str = "count",
    count: int = 1,
    gamma_phi: float | None = None,
    n_max: int = COUNT_GRID_MAX,
    gamma_init: float | None = None,
    check_feature: bool = True,
) -> FitResult:
    """Recover qubit number and dephasing from a resonant phase trace.

    ``free`` selects the parameterization:

    - ``"count"``: exhaustive grid over the qubit number 1..n_max with a
      nested continuous fit of gamma_phi (or none, if ``gamma_phi`` pins
      it); near-ties are resolved toward the smaller count and flagged.
    - ``"coupling"``: fixed ``count``, continuous (g_bare, gamma_phi) fit,
      the single-qubit calibration variant.
    - ``"gamma"``: fixed ``count``, continuous gamma_phi only.

    Raises FeatureNotFound when the trace shows no resonant feature
    (suppress with ``check_feature=False`` for windowed refits).
    """
    omega, kappa = trace.omega, trace.kappa
    if check_feature:
        detect_crossings(trace)
    gamma0 = gamma_init if gamma_init is not None else _gamma_guess(trace, setup)
    flux, phase = trace.flux, trace.phase

    def phase_model(n, g, gamma):
        return _grid_phase(
            flux, omega, kappa, [n], [setup.delta], [setup.current], [g], [gamma]
        )

    if free == "count":
        records = {}
        for n in range(1, n_max + 1):
            if gamma_phi is not None:
                rn = float(
                    np.linalg.norm(phase_model(n, setup.g_bare, gamma_phi) - phase)
                )
                records[n] = (rn, None)
                continue
            problem = LeastSquaresProblem(
                residual=lambda p, n=n: phase_model(n, setup.g_bare, p[0]) - phase,
                initial=np.array([gamma0]),
                lower=np.array([RATE_LOWER]),
                upper=np.array([RATE_UPPER]),
                x_scale=np.array([gamma0]),
            )
            inner = solve_least_squares(problem, strict=False)
            records[n] = (inner.residual_norm, inner)
        n_best, inner, ambiguous = _select_count(records)
        flags = ("ambiguous_count",) if ambiguous else ()
        if gamma_phi is not None:
            return FitResult(
                names=("count",),
                params=np.array([float(n_best)]),
                uncertainties=np.array([0.0]),
                residual_norm=records[n_best][0],
                iterations=0,
                converged=True,
                flags=flags,
            )
        if not inner.converged:
            raise MaxIterations(
                f"dephasing fit for count {n_best} did not converge"
            )
        return FitResult(
            names=("count", "gamma_phi"),
            params=np.array([float(n_best), inner.params[0]]),
            uncertainties=np.array([0.0, inner.uncertainties[0]]),
            residual_norm=inner.residual_norm,
            iterations=inner.iterations,
            converged=inner.converged,
            gradient_norm=inner.gradient_norm,
            flags=flags,
        )

    if free == "coupling":
        if gamma_phi is not None:
            problem = LeastSquaresProblem(
                residual=lambda p: phase_model(count, p[0], gamma_phi) - phase,
                initial=np.array([setup.g_bare]),
                lower=np.array([RATE_LOWER]),
                upper=np.array([1e12]),
                x_scale=np.array([setup.g_bare]),
            )
            res = solve_least_squares(problem)
            return _renamed(res, ("g_bare",))
        problem = LeastSquaresProblem(
            residual=lambda p: phase_model(count, p[0], p[1]) - phase,
            initial=np.array([setup.g_bare, gamma0]),
            lower=np.array([RATE_LOWER, RATE_LOWER]),
            upper=np.array([1e12, RATE_UPPER]),
            x_scale=np.array([setup.g_bare, gamma0]),
        )
        res = solve_least_squares(problem)
        return _renamed(res, ("g_bare", "gamma_phi"))

    if free == "gamma":
        problem = LeastSquaresProblem(
            residual=lambda p: phase_model(count, setup.g_bare, p[0]) - phase,
            initial=np.array([gamma0]),
            lower=np.array([RATE_LOWER]),
            upper=np.array([RATE_UPPER]),
            x_scale=np.array([gamma0]),
        )
        res = solve_least_squares(problem)
        return _renamed(res, ("gamma_phi",))

    raise ValidationError(f"unknown free parameter choice {free!r}")


def fit_two_modes(
    trace: PhaseTrace,
    setup_a: ModeFitSetup,
    setup_b: ModeFitSetup,
    n_max: int = 10,
) -> FitResult:
    """Joint count/dephasing fit for two qubit groups crossing one mode.

    The forward model is the susceptibility sum of both groups; the
    integer grid runs over (n_a, n_b) in [0, n_max]^2, the dephasing of
    any group with a nonzero count is fit continuously.  A zero count
    leaves that group's dephasing unconstrained (reported at its initial
    guess with infinite uncertainty and a flag).

    Result names: count_a, gamma_phi_a, count_b, gamma_phi_b.
    """
    omega, kappa = trace.omega, trace.kappa
    detect_crossings(trace)
    flux, phase = trace.flux, trace.phase
    xa, xb = setup_a.crossing_flux(), setup_b.crossing_flux()
    if math.isnan(xa) or math.isnan(xb):
        raise ValidationError("both groups must cross the probed mode")
    gap = abs(xa - xb)

    def window(center):
        if gap == 0:
            return None
        return np.abs(np.abs(flux) - center) <= gap / 2.0

    gamma0_a = _gamma_guess(trace, setup_a, window(xa))
    gamma0_b = _gamma_guess(trace, setup_b, window(xb))

    def model(na, nb, ga, gb):
        return _grid_phase(
            flux,
            omega,
            kappa,
            [na, nb],
            [setup_a.delta, setup_b.delta],
            [setup_a.current, setup_b.current],
            [setup_a.g_bare, setup_b.g_bare],
            [ga, gb],
        )

    records = {}
    for na in range(0, n_max + 1):
        for nb in range(0, n_max + 1):
            if na == 0 and nb == 0:
                rn = float(np.linalg.norm(phase))
                records[(na, nb)] = (rn, None)
                continue
            free_a, free_b = na > 0, nb > 0

            def resid(p, na=na, nb=nb, free_a=free_a, free_b=free_b):
                i = 0
                if free_a:
                    ga = p[i]
                    i += 1
                else:
                    ga = gamma0_a
                gb = p[i] if free_b else gamma0_b
                return model(na, nb, ga, gb) - phase

            init = []
            scale = []
            if free_a:
                init.append(gamma0_a)
                scale.append(gamma0_a)
            if free_b:
                init.append(gamma0_b)
                scale.append(gamma0_b)
            problem = LeastSquaresProblem(
                residual=resid,
                initial=np.array(init),
                lower=np.full(len(init), RATE_LOWER),
                upper=np.full(len(init), RATE_UPPER),
                x_scale=np.array(scale),
            )
            inner = solve_least_squares(problem, strict=False)
            records[(na, nb)] = (inner.residual_norm, inner)

    (na, nb), inner, ambiguous = _select_count(records)
    flags = ["ambiguous_count"] if ambiguous else []
    gamma_a, gamma_b = gamma0_a, gamma0_b
    unc_a = unc_b = math.inf
    if inner is not None:
        if not inner.converged:
            raise MaxIterations(
                f"dephasing fit for counts ({na}, {nb}) did not converge"
            )
        i = 0
        if na > 0:
            gamma_a, unc_a = inner.params[i], inner.uncertainties[i]
            i += 1
        if nb > 0:
            gamma_b, unc_b = inner.params[i], inner.uncertainties[i]
    if na == 0:
        flags.append("gamma_phi_a_unconstrained")
    if nb == 0:
        flags.append("gamma_phi_b_unconstrained")
    return FitResult(
        names=("count_a", "gamma_phi_a", "count_b", "gamma_phi_b"),
        params=np.array([float(na), gamma_a, float(nb), gamma_b]),
        uncertainties=np.array([0.0, unc_a, 0.0, unc_b]),
        residual_norm=records[(na, nb)][0],
        iterations=inner.iterations if inner is not None else 0,
        converged=inner.converged if inner is not None else True,
        gradient_norm=inner.gradient_norm if inner is not None else 0.0,
        flags=tuple(flags),
    )


def fit_dispersive(
    trace: PhaseTrace,
    setup: ModeFitSetup,
    free: str = "count",
    count: int | None = None,
    n_max: int = COUNT_GRID_MAX,
) -> FitResult:
    """Fit the dispersive phase dip, freeing the count or the coupling.

    The forward model is the zero-dephasing limit of the susceptibility
    sum, evaluated along the trace's flux-dependent detunings; it is valid
    only when no crossing lies inside the trace, so a detected resonant
    feature raises ResonantContamination.
    """
    omega, kappa = trace.omega, trace.kappa
    try:
        found = detect_crossings(trace)
    except FeatureNotFound:
        found = []
    if found:
        raise ResonantContamination(
            f"trace contains {len(found)} resonant feature(s); the "
            "dispersive model does not apply"
        )
    flux, phase = trace.flux, trace.phase

    def phase_model(n, g):
        return _grid_phase(
            flux, omega, kappa, [n], [setup.delta], [setup.current], [g], [0.0]
        )

    if free == "count":
        records = {}
        for n in range(1, n_max + 1):
            rn = float(np.linalg.norm(phase_model(n, setup.g_bare) - phase))
            records[n] = (rn, None)
        n_best, _, ambiguous = _select_count(records)
        return FitResult(
            names=("count",),
            params=np.array([float(n_best)]),
            uncertainties=np.array([0.0]),
            residual_norm=records[n_best][0],
            iterations=0,
            converged=True,
            flags=("ambiguous_count",) if ambiguous else (),
        )

    if free == "coupling":
        if count is None:
            raise ValidationError("freeing the coupling requires a fixed count")
        pk = int(np.argmax(np.abs(phase)))
        delta_pk = abs(_detuning(setup, flux[pk : pk + 1])[0])
        tan_pk = abs(math.tan(phase[pk]))
        if tan_pk > 0 and delta_pk > 0:
            g0 = math.sqrt(tan_pk * kappa * delta_pk / (2.0 * count))
        else:
            g0 = setup.g_bare
        problem = LeastSquaresProblem(
            residual=lambda p: phase_model(count, p[0]) - phase,
            initial=np.array([g0]),
            lower=np.array([RATE_LOWER]),
            upper=np.array([1e12]),
            x_scale=np.array([g0]),
        )
        res = solve_least_squares(problem)
        return _renamed(res, ("g_bare",))

    raise ValidationError(f"unknown free parameter choice {free!r}")

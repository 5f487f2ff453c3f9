"""Phase-trace container and its CSV serialization.

A trace is one flux sweep of one resonator mode: probe phase shift and
field amplitude sampled on a strictly monotone flux axis.  The on-disk
format is plot-ready CSV with in-band provenance:

    # tool_version = 0.1.0
    # config_hash = 3f9ae2c41b07
    # seed = 7
    # mode_index = 3
    # omega_hz = 7782000000
    # kappa_hz = 715000
    flux_phi0,phase_rad,amplitude
    -0.02,0.00031415926535897931,0.099999999999999992

Frequencies in the file are cyclic (Hz); the in-memory object keeps them
as given and exposes angular values through properties.  All floats are
written with 17 significant digits so that export/import round-trips are
exact and repeated runs are byte-identical.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import TWO_PI
from .errors import TraceFormatError, ValidationError

__all__ = ["PhaseTrace", "export_trace", "import_trace", "format_float"]

TOOL_VERSION = "0.1.0"

_HEADER = "flux_phi0,phase_rad,amplitude"
_PROVENANCE_KEYS = (
    "tool_version",
    "config_hash",
    "seed",
    "mode_index",
    "omega_hz",
    "kappa_hz",
)


def format_float(x: float) -> str:
    """17-significant-digit decimal, enough to round-trip any float64."""
    return format(float(x), ".17g")


@dataclass(frozen=True, eq=False)
class PhaseTrace:
    """One mode's flux sweep: phase shift and amplitude versus flux."""

    mode_index: int
    flux: np.ndarray
    phase: np.ndarray
    amplitude: np.ndarray
    omega_hz: float
    kappa_hz: float
    config_hash: str = ""
    seed: int | None = None
    tool_version: str = TOOL_VERSION

    def __post_init__(self) -> None:
        for name in ("flux", "phase", "amplitude"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            object.__setattr__(self, name, arr)
        if not (self.flux.shape == self.phase.shape == self.amplitude.shape):
            raise ValidationError("trace columns must share a length")
        if self.flux.ndim != 1 or self.flux.size == 0:
            raise ValidationError("trace must hold at least one sample row")
        for name in ("flux", "phase", "amplitude"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValidationError(f"trace column {name} contains non-finite values")
        d = np.diff(self.flux)
        if self.flux.size > 1 and not (np.all(d > 0) or np.all(d < 0)):
            raise ValidationError("trace flux axis must be strictly monotone")
        if self.mode_index < 0:
            raise ValidationError("mode_index must be >= 0")
        if not (math.isfinite(self.omega_hz) and self.omega_hz > 0):
            raise ValidationError("omega_hz must be positive and finite")
        if not (math.isfinite(self.kappa_hz) and self.kappa_hz > 0):
            raise ValidationError("kappa_hz must be positive and finite")

    @property
    def omega(self) -> float:
        """Probe (mode) frequency, rad/s."""
        return TWO_PI * self.omega_hz

    @property
    def kappa(self) -> float:
        """Mode linewidth, rad/s."""
        return TWO_PI * self.kappa_hz

    @property
    def size(self) -> int:
        return int(self.flux.size)

    def mirrored(self) -> "PhaseTrace":
        """The same sweep with the flux axis negated (order preserved)."""
        return replace(
            self,
            flux=-self.flux[::-1].copy(),
            phase=self.phase[::-1].copy(),
            amplitude=self.amplitude[::-1].copy(),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhaseTrace):
            return NotImplemented
        return (
            self.mode_index == other.mode_index
            and self.omega_hz == other.omega_hz
            and self.kappa_hz == other.kappa_hz
            and self.config_hash == other.config_hash
            and self.seed == other.seed
            and self.tool_version == other.tool_version
            and np.array_equal(self.flux, other.flux)
            and np.array_equal(self.phase, other.phase)
            and np.array_equal(self.amplitude, other.amplitude)
        )


def export_trace(trace: PhaseTrace, path) -> None:
    """Write a trace as provenance-stamped CSV (exact float round-trip)."""
    lines = [
        f"# tool_version = {trace.tool_version}",
        f"# config_hash = {trace.config_hash}",
        f"# seed = {'none' if trace.seed is None else trace.seed}",
        f"# mode_index = {trace.mode_index}",
        f"# omega_hz = {format_float(trace.omega_hz)}",
        f"# kappa_hz = {format_float(trace.kappa_hz)}",
        _HEADER,
    ]
    for x, p, a in zip(trace.flux, trace.phase, trace.amplitude):
        lines.append(f"{format_float(x)},{format_float(p)},{format_float(a)}")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_provenance(meta: dict[str, str], path) -> dict:
    missing = [k for k in _PROVENANCE_KEYS if k not in meta]
    if missing:
        raise TraceFormatError(
            f"{path}: missing provenance keys: {', '.join(missing)}"
        )
    try:
        seed = None if meta["seed"] == "none" else int(meta["seed"])
        return {
            "tool_version": meta["tool_version"],
            "config_hash": meta["config_hash"],
            "seed": seed,
            "mode_index": int(meta["mode_index"]),
            "omega_hz": float(meta["omega_hz"]),
            "kappa_hz": float(meta["kappa_hz"]),
        }
    except ValueError as exc:
        raise TraceFormatError(f"{path}: bad provenance value: {exc}") from exc


def import_trace(path) -> PhaseTrace:
    """Read a trace CSV; malformed files are diagnosed with line numbers."""
    meta: dict[str, str] = {}
    rows: list[tuple[float, float, float]] = []
    header_seen = False
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" not in body:
                    raise TraceFormatError(
                        f"{path}:{lineno}: comment is not 'key = value'"
                    )
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if line.strip() != _HEADER:
                    raise TraceFormatError(
                        f"{path}:{lineno}: expected header '{_HEADER}', "
                        f"got {line.strip()!r}"
                    )
                header_seen = True
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise TraceFormatError(
                    f"{path}:{lineno}: expected 3 comma-separated fields, "
                    f"got {len(parts)}"
                )
            try:
                rows.append(tuple(float(p) for p in parts))
            except ValueError:
                raise TraceFormatError(
                    f"{path}:{lineno}: non-numeric field in {line!r}"
                ) from None
    if not header_seen:
        raise TraceFormatError(f"{path}: missing header line '{_HEADER}'")
    if not rows:
        raise TraceFormatError(f"{path}: no data rows (header-only file)")
    data = np.array(rows, dtype=np.float64)
    prov = _parse_provenance(meta, path)
    try:
        return PhaseTrace(
            flux=data[:, 0], phase=data[:, 1], amplitude=data[:, 2], **prov
        )
    except ValidationError as exc:
        raise TraceFormatError(f"{path}: {exc}") from exc

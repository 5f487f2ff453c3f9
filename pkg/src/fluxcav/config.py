"""Flat key-value configuration files with SI-suffixed numbers.

Grammar, one statement per line:

    # comment
    section.key = value        # trailing comments allowed

Keys are dot-separated identifiers with at least two components; values
are free text until end of line (or an unescaped ``#``).  Numeric values
may carry an SI prefix and a unit, e.g. ``5.6GHz``, ``74nA``, ``0.5pH``,
``20mK``, ``0.5mrad``; the unit is informational, only the prefix scales
the number.  Frequencies are cyclic (Hz) at this boundary and are
converted to angular units by the consumer.

Errors cite the file name and line number.  Duplicate keys are rejected
so a file has one unambiguous meaning.
"""

import hashlib
import re
from dataclasses import dataclass, field

from .errors import ConfigError

__all__ = ["ConfigMap", "parse_quantity", "parse_config_text", "parse_config_file", "config_hash"]

SI_PREFIXES = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}
UNITS = {"Hz", "A", "H", "K", "rad", "s", "V"}

_NUMBER_RE = re.compile(
    r"([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([A-Za-zµ]*)\Z"
)
_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z0-9_]+)+\Z")


def parse_quantity(text: str) -> float:
    """Parse a number with optional SI prefix and unit into a plain float."""
    m = _NUMBER_RE.match(text.strip())
    if not m:
        raise ValueError(f"not a number with optional SI suffix: {text!r}")
    value = float(m.group(1))
    suffix = m.group(2)
    if suffix == "":
        return value
    if suffix in UNITS:
        return value
    head, tail = suffix[0], suffix[1:]
    if head in SI_PREFIXES and (tail == "" or tail in UNITS):
        return value * SI_PREFIXES[head]
    raise ValueError(f"unknown unit suffix {suffix!r} in {text!r}")


@dataclass
class ConfigMap:
    """Parsed configuration: raw values by key, with line provenance."""

    source: str
    entries: dict[str, tuple[str, int]] = field(default_factory=dict)
    text: str = ""
    _consumed: set = field(default_factory=set)

    @property
    def hash(self) -> str:
        return config_hash(self.text)

    def _fail(self, key: str, message: str):
        lineno = self.entries[key][1] if key in self.entries else 0
        raise ConfigError(f"{self.source}:{lineno}: {key}: {message}")

    def has(self, key: str) -> bool:
        return key in self.entries

    def raw(self, key: str, default: str | None = None) -> str | None:
        self._consumed.add(key)
        if key in self.entries:
            return self.entries[key][0]
        return default

    def number(self, key: str, default: float | None = None) -> float | None:
        value = self.raw(key)
        if value is None:
            return default
        try:
            return parse_quantity(value)
        except ValueError as exc:
            self._fail(key, str(exc))

    def integer(self, key: str, default: int | None = None) -> int | None:
        value = self.raw(key)
        if value is None:
            return default
        try:
            return int(value)
        except ValueError:
            self._fail(key, f"expected an integer, got {value!r}")

    def string(self, key: str, default: str | None = None) -> str | None:
        return self.raw(key, default)

    def int_list(self, key: str, default=None):
        value = self.raw(key)
        if value is None:
            return default
        try:
            return tuple(int(part.strip()) for part in value.split(",") if part.strip())
        except ValueError:
            self._fail(key, f"expected comma-separated integers, got {value!r}")

    def require(self, key: str) -> str:
        if key not in self.entries:
            raise ConfigError(f"{self.source}: missing required key {key!r}")
        return self.raw(key)

    def group_names(self, prefix: str) -> tuple[str, ...]:
        """Middle components of keys shaped ``prefix.<name>.<field>``."""
        names = []
        for key in self.entries:
            parts = key.split(".")
            if len(parts) >= 3 and parts[0] == prefix and parts[1] not in names:
                names.append(parts[1])
        return tuple(names)

    def keys_under(self, prefix: str) -> tuple[str, ...]:
        return tuple(k for k in self.entries if k.startswith(prefix + "."))

    def ensure_all_consumed(self) -> None:
        """Reject unrecognized keys so typos fail loudly."""
        unknown = sorted(set(self.entries) - self._consumed)
        if unknown:
            spots = ", ".join(
                f"{k} (line {self.entries[k][1]})" for k in unknown
            )
            raise ConfigError(f"{self.source}: unrecognized keys: {spots}")


def parse_config_text(text: str, source: str = "<config>") -> ConfigMap:
    cfg = ConfigMap(source=source, text=text)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.partition("#")[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key = key.strip()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(
                f"{source}:{lineno}: key {key!r} is not dotted (section.key)"
            )
        if not value:
            raise ConfigError(f"{source}:{lineno}: empty value for {key!r}")
        if key in cfg.entries:
            first = cfg.entries[key][1]
            raise ConfigError(
                f"{source}:{lineno}: duplicate key {key!r} (first set on line {first})"
            )
        cfg.entries[key] = (value, lineno)
    return cfg


def parse_config_file(path) -> ConfigMap:
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    return parse_config_text(text, source=str(path))


def config_hash(text: str) -> str:
    """Short stable digest of the configuration text."""
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]

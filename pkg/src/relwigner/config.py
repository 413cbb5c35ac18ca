"""Scenario configuration: INI files with per-module sections.

A config file is flat key = value text grouped in sections, e.g.

    [run]
    output_dir = runs/demo
    seed = 0

    [constants]
    hbar = 1.0
    c = 1.0
    m = 1.0
    e = 1.0

    [potential]
    kind = sine
    a = 0.2
    b = 0.314159
    component = 0

Parsing is strict: unknown potential kinds, malformed numbers and
constraint violations raise :class:`ConfigError` carrying the file, the
line of the offending key and the dotted field name.  ``serialize``
produces canonical text whose re-parse equals the original parse
(round-trip identity).
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .constants import PhysicalConstants
from .errors import ConfigError
from .potentials import PotentialSpec
from .scalar import ScalarPotential


@dataclass
class ScenarioConfig:
    """Parsed scenario configuration with typed, validated accessors."""

    path: str
    sections: dict[str, dict[str, str]]
    source_text: str = ""

    # -- plumbing ----------------------------------------------------------

    def _line_of(self, section: str, key: str) -> int:
        """Best-effort line number of a key inside its section."""
        in_section = False
        for lineno, line in enumerate(self.source_text.splitlines(), start=1):
            stripped = line.strip()
            if stripped.startswith("["):
                in_section = stripped == f"[{section}]"
            elif in_section and re.match(rf"^{re.escape(key)}\s*[=:]", stripped):
                return lineno
        for lineno, line in enumerate(self.source_text.splitlines(), start=1):
            if line.strip() == f"[{section}]":
                return lineno
        return 0

    def _fail(self, section: str, key: str, message: str) -> ConfigError:
        line = self._line_of(section, key)
        return ConfigError(f"{self.path}:{line}: {section}.{key} {message}")

    def has(self, section: str, key: str) -> bool:
        return section in self.sections and key in self.sections[section]

    def raw(self, section: str, key: str, default: str | None = None) -> str:
        if not self.has(section, key):
            if default is not None:
                return default
            raise self._fail(section, key, "is required")
        return self.sections[section][key]

    def get_float(
        self,
        section: str,
        key: str,
        default: float | None = None,
        positive: bool = False,
        nonnegative: bool = False,
    ) -> float:
        if not self.has(section, key):
            if default is not None:
                return default
            raise self._fail(section, key, "is required")
        text = self.sections[section][key]
        try:
            value = float(text)
        except ValueError:
            raise self._fail(section, key, f"must be a number, got {text!r}") from None
        if positive and not value > 0.0:
            raise self._fail(section, key, f"must be positive, got {value:g}")
        if nonnegative and value < 0.0:
            raise self._fail(section, key, f"must be nonnegative, got {value:g}")
        return value

    def get_int(
        self, section: str, key: str, default: int | None = None, positive: bool = False
    ) -> int:
        if not self.has(section, key):
            if default is not None:
                return default
            raise self._fail(section, key, "is required")
        text = self.sections[section][key]
        try:
            value = int(text)
        except ValueError:
            raise self._fail(section, key, f"must be an integer, got {text!r}") from None
        if positive and value <= 0:
            raise self._fail(section, key, f"must be positive, got {value}")
        return value

    def get_floats(self, section: str, key: str, count: int | None = None) -> list[float]:
        text = self.raw(section, key)
        try:
            values = [float(tok) for tok in re.split(r"[,\s]+", text.strip()) if tok]
        except ValueError:
            raise self._fail(section, key, f"must be a list of numbers, got {text!r}") from None
        if count is not None and len(values) != count:
            raise self._fail(section, key, f"must have {count} entries, got {len(values)}")
        return values

    def get_choice(self, section: str, key: str, choices: list[str], default: str | None = None) -> str:
        value = self.raw(section, key, default)
        if value not in choices:
            raise self._fail(section, key, f"must be one of {choices}, got {value!r}")
        return value

    # -- typed views --------------------------------------------------------

    @property
    def seed(self) -> int:
        return self.get_int("run", "seed", default=0)

    @property
    def output_dir(self) -> str:
        return self.raw("run", "output_dir", default="runs/out")

    def constants(self) -> PhysicalConstants:
        return PhysicalConstants(
            hbar=self.get_float("constants", "hbar", default=1.0, positive=True),
            c=self.get_float("constants", "c", default=1.0, positive=True),
            m=self.get_float("constants", "m", default=1.0, positive=True),
            e=self.get_float("constants", "e", default=1.0),
        )

    def potential(self, section: str = "potential") -> PotentialSpec:
        kind = self.get_choice(
            section,
            "kind",
            ["zero", "none", "constant_e", "constant_b", "sine", "polynomial"],
            default="zero",
        )
        if kind in ("zero", "none"):
            return PotentialSpec.zero()
        if kind == "constant_e":
            return PotentialSpec.constant_e(self.get_float(section, "e0"))
        if kind == "constant_b":
            return PotentialSpec.constant_b(self.get_float(section, "b0"))
        if kind == "sine":
            component = self.get_int(section, "component", default=0)
            if component not in (0, 1, 2, 3):
                raise self._fail(section, "component", f"must be in 0..3, got {component}")
            return PotentialSpec.sine(
                self.get_float(section, "a"), self.get_float(section, "b"), component
            )
        coeffs = {}
        for mu in range(4):
            key = f"coeffs{mu}"
            if self.has(section, key):
                coeffs[mu] = self.get_floats(section, key)
        if not coeffs:
            raise self._fail(section, "coeffs0", "polynomial potential needs coeffs0..coeffs3")
        return PotentialSpec.polynomial(coeffs)

    def scalar_potential(self, section: str) -> ScalarPotential:
        kind = self.get_choice(
            section, "upotential", ["zero", "none", "harmonic", "cosine", "polynomial"], default="zero"
        )
        if kind in ("zero", "none"):
            return ScalarPotential.zero()
        if kind == "harmonic":
            return ScalarPotential.harmonic(
                self.get_float("constants", "m", default=1.0, positive=True),
                self.get_float(section, "omega", positive=True),
            )
        if kind == "cosine":
            return ScalarPotential.cosine(self.get_float(section, "ua"), self.get_float(section, "ub"))
        return ScalarPotential.polynomial(self.get_floats(section, "ucoeffs"))


def parse_config(path: Path | str) -> ScenarioConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"{path}: config file not found")
    text = path.read_text()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    return ScenarioConfig(str(path), sections, text)


def serialize(config: ScenarioConfig) -> str:
    """Canonical text form; parsing it back reproduces ``config.sections``."""
    lines = []
    for section in sorted(config.sections):
        lines.append(f"[{section}]")
        for key in sorted(config.sections[section]):
            lines.append(f"{key} = {config.sections[section][key]}")
        lines.append("")
    return "\n".join(lines)


def parse_string(text: str, path: str = "<string>") -> ScenarioConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    sections = {name: dict(parser.items(name)) for name in parser.sections()}
    return ScenarioConfig(path, sections, text)

"""Physical constants carried through every solver."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants of a run.

    Defaults are natural units.  ``hbar``, ``c`` and ``m`` must be strictly
    positive; the charge ``e`` may take any sign.
    """

    hbar: float = 1.0
    c: float = 1.0
    m: float = 1.0
    e: float = 1.0

    def __post_init__(self) -> None:
        for name in ("hbar", "c", "m"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {value}")

    @property
    def compton_wavelength(self) -> float:
        return self.hbar / (self.m * self.c)

    @property
    def rest_energy(self) -> float:
        return self.m * self.c**2

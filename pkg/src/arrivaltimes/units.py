"""Unit system shared by all modules (atomic units by default)."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Units:
    """Particle mass and reduced Planck constant.

    Everything in the package is expressed with these two numbers so that
    formulas keep their dimensions; the default is ``m = hbar = 1``.
    """

    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")

    def energy(self, k):
        """Kinetic energy hbar^2 k^2 / 2m."""
        return self.hbar**2 * k**2 / (2.0 * self.m)

    def velocity(self, k):
        return self.hbar * k / self.m


ATOMIC = Units()

"""Piecewise-constant complex potentials and their local wavenumbers.

A profile is an ordered, contiguous list of regions.  The outermost regions
are semi-infinite and free (``v = 0``).  An absorbing detector enters the
Hamiltonian as ``-i V_eps`` on ``[-eps, eps]``, i.e. as a region whose
potential value has a negative imaginary part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, DomainError
from .units import ATOMIC, Units


@dataclass(frozen=True)
class Region:
    x_left: float
    x_right: float
    v: complex = 0j

    def __post_init__(self):
        if not self.x_left < self.x_right:
            raise ConfigurationError(
                f"region needs x_left < x_right, got [{self.x_left}, {self.x_right}]")
        object.__setattr__(self, "v", complex(self.v))

    @property
    def width(self) -> float:
        return self.x_right - self.x_left

    @property
    def absorbing(self) -> bool:
        return self.v.imag < 0


@dataclass(frozen=True)
class AbsorberScaling:
    """How the detector strength scales as its half-width ``epsilon`` shrinks.

    ``case="a"`` uses ``c(eps) = eps`` (delta-function limit of strength
    ``V0 L0``); ``case="b"`` uses ``c(eps) = eps**alpha`` with ``0 < alpha < 1``
    (weak, non-perturbing limit).
    """

    case: str
    v0_l0: float
    epsilon: float
    alpha: float = 0.5

    def __post_init__(self):
        if self.case not in ("a", "b"):
            raise ConfigurationError(f"scaling case must be 'a' or 'b', got {self.case!r}")
        if self.epsilon <= 0:
            raise DomainError("absorber half-width epsilon must be positive")
        if self.v0_l0 <= 0:
            raise ConfigurationError("absorber strength V0*L0 must be positive")
        if self.case == "b" and not 0 < self.alpha < 1:
            raise ConfigurationError("case (b) needs 0 < alpha < 1")

    def c(self) -> float:
        return self.epsilon if self.case == "a" else self.epsilon**self.alpha

    @property
    def v_eps(self) -> float:
        """Height ``V_eps = V0 L0 / (2 c(eps))`` of the imaginary potential."""
        return self.v0_l0 / (2.0 * self.c())

    @property
    def potential(self) -> complex:
        return -1j * self.v_eps

    def with_epsilon(self, epsilon: float) -> "AbsorberScaling":
        return AbsorberScaling(self.case, self.v0_l0, epsilon, self.alpha)


@dataclass(frozen=True)
class PotentialProfile:
    regions: tuple[Region, ...]
    units: Units = field(default=ATOMIC)

    def __post_init__(self):
        regions = tuple(self.regions)
        object.__setattr__(self, "regions", regions)
        if len(regions) < 1:
            raise ConfigurationError("a profile needs at least one region")
        if not (math.isinf(regions[0].x_left) and math.isinf(regions[-1].x_right)):
            raise ConfigurationError("outer regions must be semi-infinite")
        if regions[0].v != 0 or regions[-1].v != 0:
            raise ConfigurationError("outer regions must be free (v = 0)")
        for left, right in zip(regions, regions[1:]):
            if left.x_right != right.x_left:
                raise ConfigurationError(
                    f"regions not contiguous at {left.x_right} / {right.x_left}")

    def __len__(self):
        return len(self.regions)

    @property
    def boundaries(self) -> list[float]:
        """Boundary points; ``boundaries[i]`` separates regions i and i+1."""
        return [r.x_right for r in self.regions[:-1]]

    @property
    def values(self) -> list[complex]:
        return [r.v for r in self.regions]

    @property
    def real(self) -> bool:
        return all(r.v.imag == 0 for r in self.regions)

    def absorber_index(self) -> int:
        idx = [i for i, r in enumerate(self.regions) if r.absorbing]
        if len(idx) != 1:
            raise ConfigurationError(f"expected exactly one absorbing region, found {len(idx)}")
        return idx[0]

    def wavenumbers(self, k):
        return [region_wavenumber(k, r, self.units) for r in self.regions]

    def potential_at(self, x):
        """Potential value on an array of positions (left-closed regions)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for r in self.regions:
            out[(x >= r.x_left) & (x < r.x_right)] = r.v
        return out

    def manifest(self) -> dict[str, str]:
        items = {"profile.regions": str(len(self.regions))}
        for i, r in enumerate(self.regions):
            items[f"profile.region{i}"] = f"{r.x_left!r} {r.x_right!r} {r.v.real!r} {r.v.imag!r}"
        items["units.m"] = repr(self.units.m)
        items["units.hbar"] = repr(self.units.hbar)
        return items


def _branch(z):
    """Square root with Im >= 0, and Re >= 0 on the real axis."""
    root = np.sqrt(np.asarray(z, dtype=complex))
    flip = (root.imag < 0) | ((root.imag == 0) & (root.real < 0))
    root = np.where(flip, -root, root)
    return root if root.ndim else complex(root)


def region_wavenumber(k, region, units: Units = ATOMIC):
    """Local wavenumber ``sqrt(k^2 - 2 m v / hbar^2)`` with ``Im >= 0``.

    ``region`` may be a :class:`Region` or a bare potential value.
    """
    if np.any(np.asarray(k) <= 0):
        raise DomainError("wavenumber k must be positive")
    v = region.v if isinstance(region, Region) else complex(region)
    if v == 0:
        return np.asarray(k, dtype=complex) if np.ndim(k) else complex(k)
    return _branch(np.asarray(k, dtype=float) ** 2 - 2.0 * units.m * v / units.hbar**2)


def absorber_q(k, scaling: AbsorberScaling, units: Units = ATOMIC):
    """Wavenumber inside the absorber, ``[k^2 + i m V0 L0 / (hbar^2 c)]^(1/2)``."""
    if np.any(np.asarray(k) <= 0):
        raise DomainError("wavenumber k must be positive")
    arg = np.asarray(k, dtype=float) ** 2 + 1j * units.m * scaling.v0_l0 / (units.hbar**2 * scaling.c())
    return _branch(arg)


def free_absorber(scaling: AbsorberScaling, units: Units = ATOMIC) -> PotentialProfile:
    """Three regions: free, absorber on ``[-eps, eps]``, free."""
    eps = scaling.epsilon
    return PotentialProfile((
        Region(-math.inf, -eps),
        Region(-eps, eps, scaling.potential),
        Region(eps, math.inf),
    ), units)


def barrier_absorber(U: float, a: float, b: float, scaling: AbsorberScaling,
                     units: Units = ATOMIC) -> PotentialProfile:
    """Five regions: free, barrier ``U`` on ``[a, b]``, free gap, absorber, free.

    The barrier must lie strictly to the left of the detector (``b <= -eps``);
    ``b == -eps`` drops the empty gap region.
    """
    eps = scaling.epsilon
    if not a < b:
        raise ConfigurationError(f"barrier needs a < b, got a={a}, b={b}")
    if b > -eps:
        raise ConfigurationError(f"barrier [{a}, {b}] overlaps the absorber [-{eps}, {eps}]")
    regions = [Region(-math.inf, a), Region(a, b, U)]
    if b < -eps:
        regions.append(Region(b, -eps))
    regions += [Region(-eps, eps, scaling.potential), Region(eps, math.inf)]
    return PotentialProfile(tuple(regions), units)


def barrier_only(U: float, a: float, b: float, units: Units = ATOMIC) -> PotentialProfile:
    if not a < b:
        raise ConfigurationError(f"barrier needs a < b, got a={a}, b={b}")
    return PotentialProfile((Region(-math.inf, a), Region(a, b, U), Region(b, math.inf)), units)


def standard_profile(kind: str, scaling: AbsorberScaling, *, U: float = 0.0,
                     a: float | None = None, b: float | None = None,
                     units: Units = ATOMIC) -> PotentialProfile:
    """Build one of the two measurement geometries by name.

    ``kind`` is ``"free"`` (detector only) or ``"barrier"`` (square barrier of
    height ``U`` on ``[a, b]`` in front of the detector).
    """
    if kind == "free":
        return free_absorber(scaling, units)
    if kind == "barrier":
        if a is None or b is None:
            raise ConfigurationError("barrier profile needs both a and b")
        return barrier_absorber(U, a, b, scaling, units)
    raise ConfigurationError(f"unknown profile kind {kind!r}")

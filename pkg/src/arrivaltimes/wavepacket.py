"""Momentum-space wave packets on quadrature grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfc

from .exceptions import ConfigurationError, DomainError
from .units import ATOMIC, Units


@dataclass(frozen=True)
class GaussianSpec:
    """Minimal-uncertainty Gaussian centred at ``x0`` with mean velocity ``v0``."""

    x0: float = -50.0
    dx: float = 10.0
    v0: float = 1.0
    units: Units = field(default=ATOMIC)

    def __post_init__(self):
        if self.dx <= 0:
            raise ConfigurationError("position spread dx must be positive")

    @property
    def k0(self) -> float:
        return self.units.m * self.v0 / self.units.hbar

    @property
    def dk(self) -> float:
        return 1.0 / (2.0 * self.dx)

    def manifest(self) -> dict[str, str]:
        return {"packet.x0": repr(self.x0), "packet.dx": repr(self.dx), "packet.v0": repr(self.v0)}


def gaussian_amplitude(spec: GaussianSpec, k):
    """``psi(k) = (2 pi dk^2)^(-1/4) exp(-(k-k0)^2 / (4 dk^2) - i k x0)``."""
    k = np.asarray(k, dtype=float)
    dk = spec.dk
    env = (2 * math.pi * dk * dk) ** -0.25 * np.exp(-((k - spec.k0) ** 2) / (4 * dk * dk))
    return env * np.exp(-1j * k * spec.x0)


def gauss_legendre(lo: float, hi: float, n: int):
    """Nodes and weights of an n-point Gauss-Legendre rule on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1), half * w


def composite_gauss_legendre(lo: float, hi: float, panels: int, order: int = 8):
    edges = np.linspace(lo, hi, panels + 1)
    x, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)[:, None]
    nodes = edges[:-1, None] + half * (x[None, :] + 1)
    return nodes.ravel(), (half * w[None, :]).ravel()


@dataclass(frozen=True)
class MomentumAmplitude:
    """Amplitude values on a quadrature grid: ``sum(w |psi|^2)`` approximates the norm."""

    k: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    units: Units = field(default=ATOMIC)
    truncated_mass: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        if k.ndim != 1 or k.size < 2 or np.any(np.diff(k) <= 0):
            raise ConfigurationError("k grid must be one-dimensional and strictly increasing")
        values = np.asarray(self.values, dtype=complex)
        weights = np.asarray(self.weights, dtype=float)
        if values.shape != k.shape or weights.shape != k.shape:
            raise ConfigurationError("k, values and weights must have the same length")
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    # constructors ---------------------------------------------------------

    @classmethod
    def from_gaussian(cls, spec: GaussianSpec, n: int = 400, width: float = 8.0) -> "MomentumAmplitude":
        """Positive-momentum Gaussian on ``[max(k0 - width dk, 1e-6), k0 + width dk]``."""
        lo = max(spec.k0 - width * spec.dk, 1e-6)
        hi = spec.k0 + width * spec.dk
        return cls.gaussian_on(spec, *gauss_legendre(lo, hi, n))

    @classmethod
    def composite(cls, spec: GaussianSpec, lo: float, hi: float, panels: int, order: int = 8) -> "MomentumAmplitude":
        """Gaussian on a composite rule, for integrands with narrow resonances."""
        return cls.gaussian_on(spec, *composite_gauss_legendre(max(lo, 1e-6), hi, panels, order))

    @classmethod
    def gaussian_on(cls, spec: GaussianSpec, k, w) -> "MomentumAmplitude":
        lo, hi = k[0], k[-1]
        # probability outside the covered interval, from the |psi|^2 Gaussian of std dk
        z = 1.0 / (math.sqrt(2) * spec.dk)
        lost = 0.5 * (erfc((spec.k0 - lo) * z) + erfc((hi - spec.k0) * z))
        return cls(k, gaussian_amplitude(spec, k), w, spec.units, float(lost))

    @classmethod
    def mirrored(cls, spec: GaussianSpec, sign: float = 1.0, n: int = 400, width: float = 8.0) -> "MomentumAmplitude":
        """Normalized ``psi(k) + sign psi(-k)`` on two mirrored panels.

        With ``sign=-1`` the packet is antisymmetric and its position-space
        wave function vanishes at the origin for all times.
        """
        pos = cls.from_gaussian(spec, n, width)
        k = np.concatenate([-pos.k[::-1], pos.k])
        w = np.concatenate([pos.weights[::-1], pos.weights])
        vals = gaussian_amplitude(spec, k) + sign * gaussian_amplitude(spec, -k)
        return cls(k, vals, w, spec.units).normalized()

    @classmethod
    def full_line(cls, spec: GaussianSpec, n: int = 400, width: float = 8.0) -> "MomentumAmplitude":
        """Single Gaussian sampled on two mirrored panels (negative side included)."""
        pos = cls.from_gaussian(spec, n, width)
        k = np.concatenate([-pos.k[::-1], pos.k])
        w = np.concatenate([pos.weights[::-1], pos.weights])
        return cls(k, gaussian_amplitude(spec, k), w, spec.units)

    @classmethod
    def from_file(cls, path, units: Units = ATOMIC, normalize: bool = True) -> "MomentumAmplitude":
        """Tabulated amplitude with columns ``k, Re`` or ``k, Re, Im`` (trapezoid weights)."""
        data = np.loadtxt(path, comments="#", delimiter=None, ndmin=2)
        if data.shape[1] not in (2, 3):
            raise ConfigurationError(f"expected 2 or 3 columns, got {data.shape[1]}")
        k = data[:, 0]
        vals = data[:, 1] + (1j * data[:, 2] if data.shape[1] == 3 else 0)
        w = np.zeros_like(k)
        dk = np.diff(k)
        w[:-1] += 0.5 * dk
        w[1:] += 0.5 * dk
        amp = cls(k, vals, w, units)
        return amp.normalized() if normalize else amp

    # queries --------------------------------------------------------------

    def norm(self) -> float:
        return float(np.sum(self.weights * np.abs(self.values) ** 2))

    def normalized(self) -> "MomentumAmplitude":
        nrm = self.norm()
        if nrm <= 0:
            raise ConfigurationError("amplitude has zero norm")
        return self.with_values(self.values / math.sqrt(nrm))

    def with_values(self, values) -> "MomentumAmplitude":
        return MomentumAmplitude(self.k, values, self.weights, self.units, self.truncated_mass)

    def positive_part(self) -> "MomentumAmplitude":
        mask = self.k > 0
        return MomentumAmplitude(self.k[mask], self.values[mask], self.weights[mask], self.units)

    def require_positive(self, tol: float = 1e-12) -> None:
        bad = self.k <= 0
        if np.any(bad) and np.sum(self.weights[bad] * np.abs(self.values[bad]) ** 2) > tol:
            raise DomainError("amplitude has non-negligible weight at k <= 0")

    def mean_position(self) -> float:
        """``<x>`` at t = 0 from the phase slope, ``-sum w |psi|^2 d(arg psi)/dk``."""
        phase = np.unwrap(np.angle(self.values))
        slope = np.gradient(phase, self.k, edge_order=2)
        dens = self.weights * np.abs(self.values) ** 2
        return float(-np.sum(dens * slope) / np.sum(dens))


def parity_decompose(amp: MomentumAmplitude) -> tuple[MomentumAmplitude, MomentumAmplitude]:
    """Split into ``(psi(k) + psi(-k))/2`` and ``(psi(k) - psi(-k))/2``."""
    scale = max(1.0, float(np.max(np.abs(amp.k))))
    if not (np.allclose(amp.k, -amp.k[::-1], rtol=0, atol=1e-12 * scale)
            and np.allclose(amp.weights, amp.weights[::-1], rtol=1e-12, atol=0)):
        raise ConfigurationError("parity decomposition needs a grid symmetric about k = 0")
    mirror = amp.values[::-1]
    return amp.with_values(0.5 * (amp.values + mirror)), amp.with_values(0.5 * (amp.values - mirror))


def inv_velocity_mean(amp: MomentumAmplitude) -> float:
    """``<1/v> = sum w |psi|^2 m / (hbar k)`` over a positive-momentum amplitude."""
    amp.require_positive()
    pos = amp.positive_part()
    dens = pos.weights * np.abs(pos.values) ** 2
    return float(np.sum(dens * amp.units.m / (amp.units.hbar * pos.k)))

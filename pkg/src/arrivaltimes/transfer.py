"""Matching and transfer matrices for piecewise-constant potentials.

Amplitudes in region ``i`` multiply ``exp(+i k_i x)`` and ``exp(-i k_i x)``
with a global origin, so the transfer matrix ``T(i, j)`` maps the amplitudes
of region ``j`` to those of region ``i``.  Strongly evanescent regions make
individual entries overflow long before physical ratios do, so products are
carried as a normalized matrix plus a real log-scale (:class:`ScaledMatrix`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import SingularMatrixError
from .potential import AbsorberScaling, PotentialProfile, absorber_q
from .units import ATOMIC, Units

_SERIES_THRESHOLD = 0.1
_SERIES_TERMS = 14


@dataclass(frozen=True)
class ScaledMatrix:
    """A 2x2 complex matrix represented as ``mat * exp(log_scale)``."""

    mat: np.ndarray
    log_scale: float = 0.0

    @classmethod
    def identity(cls) -> "ScaledMatrix":
        return cls(np.eye(2, dtype=complex), 0.0)

    @classmethod
    def from_exponents(cls, coef, expo) -> "ScaledMatrix":
        """Entries ``coef[i, j] * exp(expo[i, j])`` without forming the exponentials."""
        expo = np.asarray(expo, dtype=complex)
        shift = float(np.max(expo.real))
        return cls(np.asarray(coef, dtype=complex) * np.exp(expo - shift), shift)

    def __matmul__(self, other: "ScaledMatrix") -> "ScaledMatrix":
        prod = self.mat @ other.mat
        peak = np.max(np.abs(prod))
        if peak == 0 or not np.isfinite(peak):
            return ScaledMatrix(prod, self.log_scale + other.log_scale)
        return ScaledMatrix(prod / peak, self.log_scale + other.log_scale + math.log(peak))

    def value(self) -> np.ndarray:
        return self.mat * math.exp(self.log_scale)


def matching_matrix(k_i, x: float) -> np.ndarray:
    """Rows ``(e^{ik x}, e^{-ik x})`` and ``(k e^{ik x}, -k e^{-ik x})``."""
    k_i = complex(k_i)
    if k_i == 0:
        raise SingularMatrixError("matching matrix is singular for k_i = 0")
    ep, em = np.exp(1j * k_i * x), np.exp(-1j * k_i * x)
    return np.array([[ep, em], [k_i * ep, -k_i * em]], dtype=complex)


def _step_scaled(k_i: complex, k_j: complex, x: float) -> ScaledMatrix:
    if k_i == 0:
        raise SingularMatrixError("matching matrix is singular for k_i = 0")
    r = k_j / k_i
    coef = 0.5 * np.array([[1 + r, 1 - r], [1 - r, 1 + r]])
    expo = 1j * x * np.array([[k_j - k_i, -(k_j + k_i)], [k_j + k_i, k_i - k_j]])
    return ScaledMatrix.from_exponents(coef, expo)


def step_transfer_scaled(profile: PotentialProfile, k: float, i: int) -> ScaledMatrix:
    if not 0 <= i < len(profile) - 1:
        raise IndexError(f"step index {i} outside 0..{len(profile) - 2}")
    ks = profile.wavenumbers(k)
    return _step_scaled(ks[i], ks[i + 1], profile.boundaries[i])


def step_transfer(profile: PotentialProfile, k: float, i: int) -> np.ndarray:
    """One-step transfer matrix ``T(i, i+1) = M_i(x)^-1 M_{i+1}(x)``."""
    return step_transfer_scaled(profile, k, i).value()


def partial_products(profile: PotentialProfile, k: float) -> list[ScaledMatrix]:
    """``[T(0, N), T(1, N), ..., T(N, N)]`` accumulated from the right."""
    ks = profile.wavenumbers(k)
    xs = profile.boundaries
    out = [ScaledMatrix.identity()]
    for i in range(len(ks) - 2, -1, -1):
        out.append(_step_scaled(ks[i], ks[i + 1], xs[i]) @ out[-1])
    return out[::-1]


def full_transfer_scaled(profile: PotentialProfile, k: float, i: int, j: int) -> ScaledMatrix:
    if not 0 <= i < j < len(profile):
        raise IndexError(f"need 0 <= i < j < {len(profile)}, got i={i}, j={j}")
    ks = profile.wavenumbers(k)
    xs = profile.boundaries
    acc = ScaledMatrix.identity()
    for n in range(i, j):
        acc = acc @ _step_scaled(ks[n], ks[n + 1], xs[n])
    return acc


def full_transfer(profile: PotentialProfile, k: float, i: int, j: int) -> np.ndarray:
    """Ordered product ``T(i, i+1) ... T(j-1, j)``."""
    return full_transfer_scaled(profile, k, i, j).value()


# -- closed forms for the detector ------------------------------------------

def closed_form_T02_absorber(k: float, scaling: AbsorberScaling, units: Units = ATOMIC) -> np.ndarray:
    """Transfer matrix across the free detector of half-width eps."""
    eps = scaling.epsilon
    q = absorber_q(k, scaling, units)
    plus, minus = k / q + q / k, k / q - q / k
    s, c = np.sin(2 * q * eps), np.cos(2 * q * eps)
    return np.array([
        [(c - 0.5j * plus * s) * np.exp(2j * k * eps), 0.5j * minus * s],
        [-0.5j * minus * s, (c + 0.5j * plus * s) * np.exp(-2j * k * eps)],
    ])


def closed_form_T12_absorber(k: float, scaling: AbsorberScaling, units: Units = ATOMIC) -> np.ndarray:
    """Transfer matrix from the free region right of the detector into it."""
    eps = scaling.epsilon
    q = absorber_q(k, scaling, units)
    r = k / q
    return 0.5 * np.array([
        [(1 + r) * np.exp(1j * (k - q) * eps), (1 - r) * np.exp(-1j * (k + q) * eps)],
        [(1 - r) * np.exp(1j * (k + q) * eps), (1 + r) * np.exp(-1j * (k - q) * eps)],
    ])


def limit_T02_absorber(case: str, k: float, v0_l0: float, units: Units = ATOMIC) -> np.ndarray:
    """eps -> 0 limit of :func:`closed_form_T02_absorber`."""
    if case == "b":
        return np.eye(2, dtype=complex)
    g = units.m * v0_l0 / (units.hbar**2 * k)
    return np.array([[1 + g, g], [-g, 1 - g]], dtype=complex)


def limit_T12_absorber(case: str, k: float = 1.0, v0_l0: float = 1.0, units: Units = ATOMIC) -> np.ndarray:
    """eps -> 0 limit of :func:`closed_form_T12_absorber` (the same in both cases)."""
    if case not in ("a", "b"):
        raise ValueError(f"unknown scaling case {case!r}")
    return 0.5 * np.ones((2, 2), dtype=complex)


# -- square barrier ---------------------------------------------------------

def barrier_parts(k, U: float, l: float, units: Units = ATOMIC):
    """Real building blocks of the square-barrier matrices.

    Returns ``(kappa2, C, Sn, dSn, log_scale)`` with ``kappa2 = k^2 - 2mU/hbar^2``,
    ``C = cos(kappa l)``, ``Sn = sin(kappa l)/kappa`` and ``dSn = dSn/d(kappa2)``.
    Below the barrier these become ``cosh`` and ``sinh/kappa~``; there ``C``,
    ``Sn`` and ``dSn`` are divided by ``exp(log_scale)`` with
    ``log_scale = kappa~ l``.  Near ``kappa = 0`` power series are used.
    """
    k = np.asarray(k, dtype=float)
    kappa2 = k**2 - 2.0 * units.m * U / units.hbar**2
    kappa2 = np.atleast_1d(kappa2)
    C = np.empty_like(kappa2)
    Sn = np.empty_like(kappa2)
    dSn = np.empty_like(kappa2)
    scale = np.zeros_like(kappa2)

    small = np.abs(kappa2) * l * l < _SERIES_THRESHOLD
    if np.any(small):
        z = -kappa2[small] * l * l
        c = np.zeros_like(z)
        s = np.zeros_like(z)
        ds = np.zeros_like(z)
        for n in reversed(range(_SERIES_TERMS)):
            c = c * z + 1.0 / math.factorial(2 * n)
            s = s * z + 1.0 / math.factorial(2 * n + 1)
            if n >= 1:
                ds = ds * z + n / math.factorial(2 * n + 1)
        C[small] = c
        Sn[small] = l * s
        dSn[small] = -(l**3) * ds

    above = ~small & (kappa2 > 0)
    if np.any(above):
        kap = np.sqrt(kappa2[above])
        C[above] = np.cos(kap * l)
        Sn[above] = np.sin(kap * l) / kap

    below = ~small & (kappa2 < 0)
    if np.any(below):
        kt = np.sqrt(-kappa2[below])
        y = kt * l
        decay = np.exp(-2.0 * y)
        C[below] = 0.5 * (1.0 + decay)
        Sn[below] = 0.5 * (1.0 - decay) / kt
        scale[below] = y

    big = ~small
    dSn[big] = (l * C[big] - Sn[big]) / (2.0 * kappa2[big])
    if np.ndim(k) == 0:
        return kappa2[0], C[0], Sn[0], dSn[0], scale[0]
    return kappa2, C, Sn, dSn, scale


def barrier_transfer_scaled(k: float, U: float, a: float, b: float, units: Units = ATOMIC) -> ScaledMatrix:
    l, s = b - a, a + b
    kappa2, C, Sn, _, scale = barrier_parts(float(k), U, l, units)
    plus = (kappa2 + k * k) * Sn / k
    minus = (kappa2 - k * k) * Sn / k
    mat = np.array([
        [np.exp(1j * k * l) * (C - 0.5j * plus), -0.5j * np.exp(-1j * k * s) * minus],
        [0.5j * np.exp(1j * k * s) * minus, np.exp(-1j * k * l) * (C + 0.5j * plus)],
    ])
    return ScaledMatrix(mat, float(scale))


def barrier_transfer_closed_form(k: float, U: float, a: float, b: float, units: Units = ATOMIC) -> np.ndarray:
    """Closed-form ``T(0, 2)`` of a real square barrier of height U on [a, b]."""
    return barrier_transfer_scaled(k, U, a, b, units).value()

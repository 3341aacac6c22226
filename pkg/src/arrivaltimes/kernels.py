"""Absorption kernel f_eps, operator normalization and the model term F_eps.

``f_eps(k, k')`` is the overlap of two stationary states over the detector
region weighted by the absorption rate ``2 V_eps / hbar``.  The overlap is
integrated in closed form; the diverging ``V_eps`` prefactor cancels in
``F_eps = f(k,k') / sqrt(f(k,k) f(k',k'))`` and is never applied there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateNormalizationError
from .potential import PotentialProfile
from .scattering import (BoundaryCondition, ScatteringSolution, barrier_phase, region_amplitudes_scaled,
                         barrier_log_transmission, solve)
from .units import ATOMIC, Units


def _sinc(z):
    """``sin(z)/z`` for complex arrays, with a series near zero."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-3
    safe = np.where(small, 1.0, z)
    z2 = z * z
    series = 1 - z2 / 6 + z2 * z2 / 120
    return np.where(small, series, np.sin(safe) / safe)


def _segment_integral(beta, x_left, x_right):
    """``int_{x_left}^{x_right} exp(i beta x) dx`` for complex beta."""
    half = 0.5 * (x_right - x_left)
    centre = 0.5 * (x_right + x_left)
    return np.exp(1j * beta * centre) * 2 * half * _sinc(beta * half)


def absorber_arrays(profile: PotentialProfile, ks, bc: BoundaryCondition = BoundaryCondition.LEFT,
                    scaled: bool = False):
    """Detector-region wavenumbers and amplitudes for a batch of k values.

    With ``scaled=True`` each pair of amplitudes is divided by its largest
    modulus; that per-k factor cancels in the normalized kernel and keeps it
    finite when the transmitted amplitude underflows.
    """
    idx = profile.absorber_index()
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    q = np.empty(ks.shape, dtype=complex)
    amps = np.empty(ks.shape + (2,), dtype=complex)
    for n, k in enumerate(ks):
        q[n] = profile.wavenumbers(k)[idx]
        if scaled:
            a, _ = region_amplitudes_scaled(profile, k, idx, bc)
            amps[n] = a / np.max(np.abs(a))
        else:
            amps[n] = solve(profile, k, bc).amplitudes[idx]
    return q, amps


def overlap_matrix(profile: PotentialProfile, q1, amps1, q2, amps2) -> np.ndarray:
    """``int conj(phi_k) phi_k' dx`` over the detector for all pairs (no rate prefactor)."""
    region = profile.regions[profile.absorber_index()]
    qc = np.conj(q1)[:, None]
    qq = np.asarray(q2)[None, :]
    ap, am = np.conj(amps1[:, 0])[:, None], np.conj(amps1[:, 1])[:, None]
    bp, bm = amps2[:, 0][None, :], amps2[:, 1][None, :]
    seg = lambda beta: _segment_integral(beta, region.x_left, region.x_right)  # noqa: E731
    total = (ap * bp * seg(qq - qc) + ap * bm * seg(-qq - qc)
             + am * bp * seg(qq + qc) + am * bm * seg(-qq + qc))
    return total / (2 * math.pi)


def rate_prefactor(profile: PotentialProfile) -> float:
    region = profile.regions[profile.absorber_index()]
    return 2.0 * (-region.v.imag) / profile.units.hbar


def f_kernel(sol_k: ScatteringSolution, sol_k2: ScatteringSolution) -> complex:
    """Absorption kernel ``f_eps(k, k')`` between two stationary states."""
    if sol_k.profile is not sol_k2.profile and sol_k.profile != sol_k2.profile:
        raise ValueError("both solutions must come from the same profile")
    profile = sol_k.profile
    idx = profile.absorber_index()
    q1 = np.array([sol_k.wavenumbers[idx]])
    q2 = np.array([sol_k2.wavenumbers[idx]])
    ov = overlap_matrix(profile, q1, sol_k.amplitudes[idx][None, :], q2, sol_k2.amplitudes[idx][None, :])
    return complex(rate_prefactor(profile) * ov[0, 0])


def f_matrix(profile: PotentialProfile, ks, ks2=None, bc: BoundaryCondition = BoundaryCondition.LEFT) -> np.ndarray:
    q1, a1 = absorber_arrays(profile, ks, bc)
    if ks2 is None:
        q2, a2 = q1, a1
    else:
        q2, a2 = absorber_arrays(profile, ks2, bc)
    return rate_prefactor(profile) * overlap_matrix(profile, q1, a1, q2, a2)


def b_inverse_sqrt(k, f_diag, units: Units = ATOMIC):
    """Diagonal kernel ``b(k,k)^(-1/2) = sqrt(hbar k / (2 pi m f(k,k)))``."""
    f_diag = np.asarray(f_diag, dtype=float)
    if np.any(f_diag <= 0):
        raise DegenerateNormalizationError("absorption kernel must be positive on the diagonal")
    out = np.sqrt(units.hbar * np.asarray(k, dtype=float) / (2 * math.pi * units.m * f_diag))
    return float(out) if out.ndim == 0 else out


def normalized_kernel(overlap: np.ndarray, diag1, diag2) -> np.ndarray:
    return overlap / np.sqrt(np.outer(diag1, diag2))


def finite_eps_F(profile: PotentialProfile, k, k2, bc: BoundaryCondition = BoundaryCondition.LEFT):
    """``F_eps(k, k')`` at finite detector width, from the stationary states."""
    scalar = np.ndim(k) == 0 and np.ndim(k2) == 0
    q1, a1 = absorber_arrays(profile, k, bc, scaled=True)
    q2, a2 = absorber_arrays(profile, k2, bc, scaled=True)
    cross = overlap_matrix(profile, q1, a1, q2, a2)
    d1 = np.real(np.diag(overlap_matrix(profile, q1, a1, q1, a1)))
    d2 = np.real(np.diag(overlap_matrix(profile, q2, a2, q2, a2)))
    out = normalized_kernel(cross, d1, d2)
    return complex(out[0, 0]) if scalar else out


# -- kernel regimes ---------------------------------------------------------

class FreeLimit:
    """Free detector in either eps -> 0 limit: ``F = 1``."""

    def __call__(self, k, k2):
        return np.ones(np.broadcast(np.asarray(k), np.asarray(k2)).shape, dtype=complex)[()]


@dataclass(frozen=True)
class BarrierPhaseLimit:
    """Weak-detector limit behind a square barrier: ratio of transmission phases."""

    U: float
    l: float
    units: Units = ATOMIC

    def __call__(self, k, k2):
        return np.exp(1j * (barrier_phase(k2, self.U, self.l, self.units)
                            - barrier_phase(k, self.U, self.l, self.units)))


@dataclass(frozen=True)
class InfiniteBarrier:
    """``U -> infinity`` limit, ``F = exp(i (k - k') l)``."""

    l: float

    def __call__(self, k, k2):
        return np.exp(1j * (np.asarray(k) - np.asarray(k2)) * self.l)


@dataclass(frozen=True)
class TransmissionWeighted:
    """Kernel ``conj(T(k)) T(k')`` that normalizes to the transmission probability."""

    U: float
    l: float
    units: Units = ATOMIC

    def __call__(self, k, k2):
        def t(kk):
            return np.exp(barrier_log_transmission(kk, self.U, self.l, self.units)
                          + 1j * barrier_phase(kk, self.U, self.l, self.units))
        return np.conj(t(k)) * t(k2)


@dataclass(frozen=True)
class FiniteEps:
    profile: PotentialProfile
    bc: BoundaryCondition = BoundaryCondition.LEFT

    def __call__(self, k, k2):
        return finite_eps_F(self.profile, k, k2, self.bc)


def F_kernel(evaluator, k, k2):
    """Evaluate ``F_eps(k, k')`` in the regime described by ``evaluator``."""
    return evaluator(k, k2)

"""Stationary scattering states, square-barrier transmission and phase times."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, NumericalConsistencyError, SingularMatrixError
from .potential import PotentialProfile
from .transfer import barrier_parts, matching_matrix, partial_products
from .units import ATOMIC, Units


class BoundaryCondition(enum.Enum):
    """Incoming-wave conditions: ``A_0^+ = 1`` and the value of ``A_N^-``."""

    LEFT = 0.0
    ANTISYMMETRIC = -1.0
    SYMMETRIC = 1.0

    @property
    def a_n_minus(self) -> float:
        return self.value


@dataclass(frozen=True)
class ScatteringSolution:
    k: float
    profile: PotentialProfile
    bc: BoundaryCondition
    wavenumbers: tuple[complex, ...]
    amplitudes: np.ndarray  # shape (N, 2): columns A_i^+, A_i^-

    @property
    def transmitted(self) -> complex:
        return complex(self.amplitudes[-1, 0])

    @property
    def reflected(self) -> complex:
        return complex(self.amplitudes[0, 1])

    def region(self, i: int) -> tuple[complex, complex]:
        return complex(self.amplitudes[i, 0]), complex(self.amplitudes[i, 1])

    def absorber_amplitudes(self) -> tuple[complex, complex]:
        return self.region(self.profile.absorber_index())

    def psi(self, x):
        """Stationary wave function ``phi_k(x)`` including the ``1/sqrt(2 pi)``."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for i, r in enumerate(self.profile.regions):
            mask = (x >= r.x_left) & (x < r.x_right)
            kk = self.wavenumbers[i]
            ap, am = self.amplitudes[i]
            out[mask] = ap * np.exp(1j * kk * x[mask]) + am * np.exp(-1j * kk * x[mask])
        return out / math.sqrt(2 * math.pi)

    def matching_residual(self) -> float:
        """Largest relative mismatch of (psi, psi') across the boundaries."""
        worst = 0.0
        for i, x in enumerate(self.profile.boundaries):
            left = matching_matrix(self.wavenumbers[i], x) @ self.amplitudes[i]
            right = matching_matrix(self.wavenumbers[i + 1], x) @ self.amplitudes[i + 1]
            ref = max(np.max(np.abs(left)), np.max(np.abs(right)), 1e-300)
            worst = max(worst, float(np.max(np.abs(left - right)) / ref))
        return worst


def solve(profile: PotentialProfile, k: float, bc: BoundaryCondition = BoundaryCondition.LEFT) -> ScatteringSolution:
    """Amplitudes in every region for incoming-wave boundary conditions.

    Region amplitudes are obtained right-to-left from the partial products
    ``T(i, N)``; log-scales are recombined only in the final ratios.
    """
    prods = partial_products(profile, k)
    total = prods[0]
    t11, t12 = total.mat[0, 0], total.mat[0, 1]
    if t11 == 0:
        raise SingularMatrixError(f"T11 vanishes at k={k}")

    if bc is BoundaryCondition.LEFT:
        # A_N = exp(-s0) * (1/t11, 0); keep the exponent relative to each T(i, N)
        a_hat = np.array([1.0 / t11, 0.0], dtype=complex)
        rows = [p.mat @ a_hat * math.exp(p.log_scale - total.log_scale) for p in prods]
    else:
        am = bc.a_n_minus
        a_n = np.array([(math.exp(-total.log_scale) - t12 * am) / t11, am], dtype=complex)
        rows = [p.mat @ a_n * math.exp(p.log_scale) for p in prods]
    amps = np.array(rows)
    if not np.all(np.isfinite(amps)):
        raise NumericalConsistencyError(f"non-finite amplitudes at k={k}; profile too opaque for global amplitudes")
    return ScatteringSolution(float(k), profile, bc, tuple(profile.wavenumbers(k)), amps)


def region_amplitudes_scaled(profile: PotentialProfile, k: float, i: int,
                             bc: BoundaryCondition = BoundaryCondition.LEFT) -> tuple[np.ndarray, float]:
    """``(A_i^+, A_i^-) = amps * exp(log_scale)`` without underflow behind opaque barriers."""
    prods = partial_products(profile, k)
    total = prods[0]
    t11, t12 = total.mat[0, 0], total.mat[0, 1]
    if t11 == 0:
        raise SingularMatrixError(f"T11 vanishes at k={k}")
    p = prods[i]
    if bc is BoundaryCondition.LEFT:
        return p.mat @ np.array([1.0 / t11, 0.0], dtype=complex), p.log_scale - total.log_scale
    am = bc.a_n_minus
    a_n = np.array([(math.exp(-total.log_scale) - t12 * am) / t11, am], dtype=complex)
    return p.mat @ a_n, p.log_scale


# -- square barrier ---------------------------------------------------------

@dataclass(frozen=True)
class TransmissionData:
    k: np.ndarray
    t_amp: np.ndarray
    r_amp: np.ndarray
    phase: np.ndarray
    phase_derivative: np.ndarray
    log_abs_t: np.ndarray

    @property
    def probability(self) -> np.ndarray:
        return np.exp(2 * self.log_abs_t)


def _denominator(k, U, l, units):
    """Scaled real and imaginary parts of ``D`` with ``T = exp(-ikl)/D``, and derivatives in k."""
    kappa2, C, Sn, dSn, scale = barrier_parts(k, U, l, units)
    k = np.asarray(k, dtype=float)
    two_mu = 2.0 * units.m * U / units.hbar**2
    re_d = C
    im_d = -Sn * (kappa2 + k**2) / (2 * k)
    re_dp = -k * l * Sn
    im_dp = -0.5 * (2 * dSn * (kappa2 + k**2) + Sn * (2 + two_mu / k**2))
    return kappa2, C, Sn, scale, re_d, im_d, re_dp, im_dp


def _check(k, l, U):
    if np.any(np.asarray(k) <= 0):
        raise ConfigurationError("wavenumber k must be positive")
    if l <= 0:
        raise ConfigurationError("barrier width l must be positive")
    if U < 0:
        raise ConfigurationError("barrier height must be non-negative")


def barrier_phase(k, U: float, l: float, units: Units = ATOMIC):
    """Continuous transmission phase ``Phi_T(k) = -kl - arg D(k)``.

    Above the barrier ``arg D = -kappa l + arg(D e^{i kappa l})`` where the
    second term stays inside ``(-pi/2, pi/2)``; below it ``Re D > 0``.  The
    branch is therefore fixed analytically and joins continuously at the
    threshold without unwrapping along a grid.
    """
    _check(k, l, U)
    scalar = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k, dtype=float))
    kappa2, C, Sn, _, re_d, im_d, _, _ = _denominator(k, U, l, units)
    arg = np.arctan2(im_d, re_d)
    above = kappa2 > 0
    if np.any(above):
        kap = np.sqrt(kappa2[above])
        half = (kappa2[above] + k[above] ** 2) / (2 * k[above])
        c, sn = C[above], Sn[above]
        inner = np.arctan2(kap * sn * c - half * sn * c, c * c + half * kap * sn * sn)
        arg[above] = -kap * l + inner
    phase = -k * l - arg
    return phase[0] if scalar else phase


def barrier_phase_derivative(k, U: float, l: float, units: Units = ATOMIC):
    """Closed-form ``dPhi_T/dk = -l - Im(D'/D)`` in real arithmetic."""
    _check(k, l, U)
    _, _, _, _, re_d, im_d, re_dp, im_dp = _denominator(k, U, l, units)
    return -l - (re_d * im_dp - im_d * re_dp) / (re_d**2 + im_d**2)


def barrier_log_transmission(k, U: float, l: float, units: Units = ATOMIC):
    """``log|T(k)|``, finite even where ``|T|`` underflows."""
    _check(k, l, U)
    _, _, _, scale, re_d, im_d, _, _ = _denominator(k, U, l, units)
    return -(scale + 0.5 * np.log(re_d**2 + im_d**2))


def transmission_amplitude(k, U: float, l: float, s: float = 0.0, units: Units = ATOMIC) -> TransmissionData:
    """Transmission and reflection amplitudes of a square barrier.

    ``T(k) = e^{-ikl} / (cos(kappa l) - (i/2)(kappa/k + k/kappa) sin(kappa l))``;
    the reflection amplitude depends on the barrier centre ``s/2``.
    """
    _check(k, l, U)
    k_arr = np.atleast_1d(np.asarray(k, dtype=float))
    kappa2, C, Sn, scale, re_d, im_d, _, _ = _denominator(k_arr, U, l, units)
    phase = barrier_phase(k_arr, U, l, units)
    log_t = -(scale + 0.5 * np.log(re_d**2 + im_d**2))
    t_amp = np.exp(log_t + 1j * phase)
    # R = T21/T11 of the barrier transfer matrix; the common scale cancels
    minus = (kappa2 - k_arr**2) * Sn / k_arr
    d = (re_d + 1j * im_d) * np.exp(1j * k_arr * l)
    r_amp = 0.5j * np.exp(1j * k_arr * s) * minus / d
    deriv = barrier_phase_derivative(k_arr, U, l, units)
    return TransmissionData(k_arr, t_amp, r_amp, phase, deriv, log_t)


def phase_and_derivative(k, U: float, l: float, units: Units = ATOMIC):
    """``(Phi_T, Phi_T')`` on a k grid."""
    return barrier_phase(k, U, l, units), barrier_phase_derivative(k, U, l, units)


def unwrap_along_grid(phase):
    """Grid unwrapping of a wrapped phase (jumps larger than pi removed)."""
    return np.unwrap(np.asarray(phase, dtype=float))


# -- eps -> 0 limits of the detector-region amplitudes ----------------------

def absorber_amplitudes_limit(setup: str, k: float, case: str, v0_l0: float = 1.0, *,
                              U: float = 0.0, a: float | None = None, b: float | None = None,
                              units: Units = ATOMIC) -> tuple[complex, complex]:
    """Limiting ``(A^+, A^-)`` inside the detector as its width shrinks to zero.

    ``setup`` is one of ``"free-left"``, ``"free-antisym"``, ``"free-sym"`` or
    ``"barrier"`` (left incidence on a barrier ``U`` on ``[a, b]``).
    """
    if case not in ("a", "b"):
        raise ConfigurationError(f"unknown scaling case {case!r}")
    g = units.m * v0_l0 / (units.hbar**2 * k) if case == "a" else 0.0
    if setup == "free-left":
        amp = 0.5 / (1 + g)
        return complex(amp), complex(amp)
    if setup == "free-antisym":
        return 0j, 0j
    if setup == "free-sym":
        amp = 1.0 / (1 + g)
        return complex(amp), complex(amp)
    if setup != "barrier":
        raise ConfigurationError(f"unknown setup {setup!r}")
    if a is None or b is None or not a < b <= 0:
        raise ConfigurationError("barrier setup needs a < b <= 0")
    l, s = b - a, a + b
    kappa2, C, Sn, _, scale = barrier_parts(float(k), U, l, units)
    plus = (kappa2 + k * k) * Sn / k
    minus = (kappa2 - k * k) * Sn / k
    # 2 [T(0,4)]_11 with T(2,4) -> [[1+g, g], [-g, 1-g]] and T(3,4) -> 1/2 [[1,1],[1,1]]
    denom = (np.exp(1j * k * l) * (2 * C - 1j * plus) * (1 + g)
             + 1j * g * np.exp(-1j * k * s) * minus)
    amp = complex(np.exp(-scale) / denom) if np.isfinite(np.exp(-scale)) else 0j
    return amp, amp

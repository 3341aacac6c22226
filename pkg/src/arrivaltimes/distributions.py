"""Arrival-time distributions evaluated by quadrature over momentum."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, NumericalConsistencyError
from .kernels import absorber_arrays, overlap_matrix, rate_prefactor
from .potential import PotentialProfile
from .scattering import BoundaryCondition, barrier_log_transmission, barrier_phase
from .wavepacket import GaussianSpec, MomentumAmplitude

_CHUNK = 256


class Variant(enum.Enum):
    KIJOWSKI = "kijowski"
    ON_FREE = "on_free"
    ON_GENERAL = "on_general"
    ON_BARRIER = "on_barrier"
    KIJOWSKI_TRANSMITTED = "kijowski_transmitted"
    TILDE_ON_BARRIER = "tilde_on_barrier"
    FINITE_EPS = "finite_eps"


@dataclass(frozen=True)
class TimeDistribution:
    t: np.ndarray
    density: np.ndarray
    variant: Variant

    @property
    def total(self) -> float:
        return float(np.trapezoid(self.density, self.t))

    def mean(self) -> float:
        return float(np.trapezoid(self.t * self.density, self.t) / self.total)

    def peak_time(self) -> float:
        return float(self.t[np.argmax(self.density)])


def _energies(k, amp: MomentumAmplitude):
    return amp.units.hbar * np.asarray(k) ** 2 / (2 * amp.units.m)


def _time_transform(k, coeff, t, amp: MomentumAmplitude):
    """``sum_j coeff_j exp(-i E_j t / hbar)`` for every t, in chunks of t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omega = _energies(k, amp) / amp.units.hbar
    out = np.empty(t.shape, dtype=complex)
    for start in range(0, t.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        out[sl] = np.exp(-1j * np.outer(t[sl], omega)) @ coeff
    return out


def _half_line(k, values, weights, t, amp):
    """``(hbar / 2 pi m) |int dk psi sqrt(k) exp(-i hbar k^2 t / 2m)|^2`` over k > 0 nodes."""
    pref = amp.units.hbar / (2 * math.pi * amp.units.m)
    coeff = weights * values * np.sqrt(k)
    # nodes far below the peak contribute nothing at double precision
    keep = np.abs(coeff) > 1e-18 * np.max(np.abs(coeff), initial=0.0)
    return pref * np.abs(_time_transform(k[keep], coeff[keep], t, amp)) ** 2


def kijowski(amp: MomentumAmplitude, t) -> TimeDistribution:
    """Kijowski's distribution of a positive-momentum amplitude."""
    amp.require_positive()
    pos = amp.positive_part()
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return TimeDistribution(t, _half_line(pos.k, pos.values, pos.weights, t, amp), Variant.KIJOWSKI)


def pi_on_free(amp: MomentumAmplitude, t) -> TimeDistribution:
    """Normalized absorption distribution of a free detector; equals Kijowski's."""
    d = kijowski(amp, t)
    return TimeDistribution(d.t, d.density, Variant.ON_FREE)


def pi_on_general(amp: MomentumAmplitude, t) -> TimeDistribution:
    """Sum of the right- and left-moving half-line terms for a full-line amplitude."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dens = np.zeros(t.shape)
    for mask in (amp.k > 0, amp.k < 0):
        if np.any(mask):
            dens += _half_line(np.abs(amp.k[mask]), amp.values[mask], amp.weights[mask], t, amp)
    return TimeDistribution(t, dens, Variant.ON_GENERAL)


def _transmission(amp: MomentumAmplitude, U: float, l: float):
    return barrier_log_transmission(amp.k, U, l, amp.units), barrier_phase(amp.k, U, l, amp.units)


def pi_on_barrier(amp: MomentumAmplitude, U: float, l: float, t) -> TimeDistribution:
    """Weak-detector distribution behind a barrier: only the phase of T enters."""
    amp.require_positive()
    amp = amp.positive_part()
    _, phase = _transmission(amp, U, l)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dens = _half_line(amp.k, amp.values * np.exp(1j * phase), amp.weights, t, amp)
    return TimeDistribution(t, dens, Variant.ON_BARRIER)


def transmitted_values(amp: MomentumAmplitude, U: float, l: float):
    """``T psi / ||T psi||`` and ``log ||T psi||^2``, assembled in the log domain."""
    log_t, phase = _transmission(amp, U, l)
    with np.errstate(divide="ignore"):
        log_abs = np.log(np.abs(amp.values)) + log_t
    log_w = log_abs * 2 + np.log(amp.weights)
    top = np.max(log_w)
    if not np.isfinite(top):
        raise NumericalConsistencyError("transmitted amplitude vanishes on the whole grid")
    log_norm2 = top + math.log(np.sum(np.exp(log_w - top)))
    vals = np.exp(log_abs - 0.5 * log_norm2 + 1j * (np.angle(amp.values) + phase))
    return vals, log_norm2


def pi_kn(amp: MomentumAmplitude, U: float, l: float, t) -> TimeDistribution:
    """Kijowski's distribution of the normalized transmitted packet."""
    amp.require_positive()
    amp = amp.positive_part()
    vals, _ = transmitted_values(amp, U, l)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return TimeDistribution(t, _half_line(amp.k, vals, amp.weights, t, amp), Variant.KIJOWSKI_TRANSMITTED)


def pi_tilde(amp: MomentumAmplitude, U: float, l: float, t) -> TimeDistribution:
    """Joint arrival-and-transmission density; integrates to the transmission probability."""
    amp.require_positive()
    amp = amp.positive_part()
    vals, log_norm2 = transmitted_values(amp, U, l)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dens = _half_line(amp.k, vals, amp.weights, t, amp) * math.exp(log_norm2)
    return TimeDistribution(t, dens, Variant.TILDE_ON_BARRIER)


def transmission_probability(amp: MomentumAmplitude, U: float, l: float) -> float:
    return math.exp(transmitted_values(amp.positive_part(), U, l)[1])


def pi_finite_eps(amp: MomentumAmplitude, profile: PotentialProfile, t, normalized: bool = False,
                  bc: BoundaryCondition = BoundaryCondition.LEFT, tol: float = 1e-10) -> TimeDistribution:
    """Absorption rate of a finite-width detector from the stationary states.

    The unnormalized variant is the rate ``(2V/hbar) int |psi(x,t)|^2 dx`` over
    the detector; the normalized one replaces ``f`` by ``F sqrt(k k') hbar/(2 pi m)``.
    """
    amp.require_positive()
    amp = amp.positive_part()
    if amp.k.size > 1000:
        raise ConfigurationError("double-k quadrature is limited to 1000 nodes")
    q, amps = absorber_arrays(profile, amp.k, bc, scaled=normalized)
    ov = overlap_matrix(profile, q, amps, q, amps)
    coeff = amp.weights * amp.values
    if normalized:
        diag = np.real(np.diag(ov))
        kernel = ov / np.sqrt(np.outer(diag, diag))
        coeff = coeff * np.sqrt(amp.k)
        pref = amp.units.hbar / (2 * math.pi * amp.units.m)
    else:
        kernel = ov
        pref = rate_prefactor(profile)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    omega = _energies(amp.k, amp) / amp.units.hbar
    out = np.empty(t.shape, dtype=complex)
    for start in range(0, t.size, _CHUNK):
        sl = slice(start, start + _CHUNK)
        c = np.exp(-1j * np.outer(t[sl], omega)) * coeff[None, :]
        out[sl] = np.einsum("ti,ij,tj->t", c.conj(), kernel, c)
    out *= pref
    scale = max(float(np.max(np.abs(out.real))), 1e-300)
    if np.max(np.abs(out.imag)) > tol * scale:
        raise NumericalConsistencyError("finite-eps density has a non-negligible imaginary part")
    return TimeDistribution(t, out.real, Variant.FINITE_EPS)


# -- time grids -------------------------------------------------------------

def time_scale(spec: GaussianSpec) -> tuple[float, float]:
    """Peak time ``|x0|/v0`` and a width including dispersive spreading."""
    t_peak = abs(spec.x0) / spec.v0
    spread = spec.units.hbar * t_peak * spec.dk / spec.units.m
    return t_peak, math.hypot(spec.dx, spread) / spec.v0


def time_grid(spec: GaussianSpec, n: int = 1200, span: float = 12.0, shift: float = 0.0) -> np.ndarray:
    t_peak, sigma = time_scale(spec)
    centre = t_peak + shift
    return np.linspace(centre - span * sigma, centre + span * sigma, n)


def on_auto_grid(func, spec: GaussianSpec, n: int = 1200, span: float = 12.0, shift: float = 0.0,
                 tail: float = 1e-9, max_extensions: int = 8) -> TimeDistribution:
    """Evaluate ``func(t)`` widening the grid until the neglected tails are below ``tail``.

    The tail beyond each end is estimated as the edge density times the time
    width; the point spacing is kept fixed while the grid grows.
    """
    _, sigma = time_scale(spec)
    for _ in range(max_extensions + 1):
        dist = func(time_grid(spec, n, span, shift))
        edge = max(abs(dist.density[0]), abs(dist.density[-1])) * sigma
        if edge < tail:
            return dist
        span *= 1.5
        n = int(math.ceil(n * 1.5))
    return dist

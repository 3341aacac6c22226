"""Mean arrival times and tunneling times from closed k-space formulas."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .distributions import transmitted_values
from .exceptions import NumericalConsistencyError
from .scattering import barrier_phase_derivative
from .wavepacket import GaussianSpec, MomentumAmplitude, inv_velocity_mean


def _phase_delay(amp: MomentumAmplitude, U: float, l: float):
    if U == 0 or l == 0:
        return np.zeros_like(amp.k)
    return barrier_phase_derivative(amp.k, U, l, amp.units)


def _check_x0(amp: MomentumAmplitude, x0: float, tol: float = 1e-6) -> None:
    x_est = amp.mean_position()
    if abs(x_est - x0) > tol * max(1.0, abs(x0)):
        raise NumericalConsistencyError(
            f"supplied x0={x0} disagrees with the amplitude's phase slope ({x_est})")


def mean_arrival(amp: MomentumAmplitude, U: float, l: float, x0: float, check: bool = True) -> float:
    """``<t> = (m/hbar) int dk |psi|^2 (|x0| + Phi_T'(k)) / k``."""
    amp.require_positive()
    amp = amp.positive_part()
    if check:
        _check_x0(amp, x0)
    dens = amp.weights * np.abs(amp.values) ** 2
    phase_time = (abs(x0) + _phase_delay(amp, U, l)) / amp.k
    return float(amp.units.m / amp.units.hbar * np.sum(dens * phase_time))


def transmitted_mean_arrival(amp: MomentumAmplitude, U: float, l: float, x0: float) -> float:
    """Mean phase time over the normalized transmitted packet (log-domain weights)."""
    amp.require_positive()
    amp = amp.positive_part()
    vals, _ = transmitted_values(amp, U, l)
    dens = amp.weights * np.abs(vals) ** 2
    phase_time = (abs(x0) + _phase_delay(amp, U, l)) / amp.k
    return float(amp.units.m / amp.units.hbar * np.sum(dens * phase_time) / np.sum(dens))


def classical_time(spec: GaussianSpec, l: float) -> float:
    return spec.units.m * (abs(spec.x0) - l) / (spec.units.hbar * spec.k0)


def tunneling_time_tau(spec: GaussianSpec, U: float, l: float, amp: MomentumAmplitude | None = None) -> float:
    """``tau = <t> - m (|x0| - l) / (hbar k0)``."""
    amp = MomentumAmplitude.from_gaussian(spec) if amp is None else amp
    return mean_arrival(amp, U, l, spec.x0) - classical_time(spec, l)


def resolving_amplitude(spec: GaussianSpec, l: float, width: float = 24.0, order: int = 8) -> MomentumAmplitude:
    """Gaussian on a wide composite grid fine enough for the above-barrier resonances.

    Transmission weighting shifts the packet towards high k, so the grid
    reaches ``width`` spreads above k0; panels are narrower than the
    resonance spacing ``~pi/l`` by a wide margin.
    """
    lo = max(spec.k0 - width * spec.dk, 1e-6)
    hi = spec.k0 + width * spec.dk
    panel = min(spec.dk / 4, 0.02 / max(l, 1.0))
    panels = int(math.ceil((hi - lo) / panel))
    return MomentumAmplitude.composite(spec, lo, hi, panels, order)


def tunneling_time_tau_T(spec: GaussianSpec, U: float, l: float, amp: MomentumAmplitude | None = None) -> float:
    """Tunneling time from the normalized transmitted packet."""
    amp = resolving_amplitude(spec, l) if amp is None else amp
    return transmitted_mean_arrival(amp, U, l, spec.x0) - classical_time(spec, l)


def free_time(amp: MomentumAmplitude, x0: float) -> float:
    return abs(x0) * inv_velocity_mean(amp)


def hartman_time(amp: MomentumAmplitude, x0: float, l: float) -> float:
    return (abs(x0) - l) * inv_velocity_mean(amp)


@dataclass(frozen=True)
class TimingReport:
    U: float
    l: float
    x0: float
    k0: float
    dx: float
    mean_t: float
    tau: float
    tau_T: float
    hartman_t: float
    free_t: float

    @property
    def delay(self) -> float:
        """``tau`` minus the free traversal time of the barrier segment."""
        return self.tau - self.l / self.k0

    FIELDS = ("U", "l", "x0", "k0", "dx", "mean_t", "tau", "tau_T", "hartman_t", "free_t")

    def row(self) -> tuple[float, ...]:
        d = asdict(self)
        return tuple(d[name] for name in self.FIELDS)


def timing_report(spec: GaussianSpec, U: float, l: float, amp: MomentumAmplitude | None = None) -> TimingReport:
    amp = MomentumAmplitude.from_gaussian(spec) if amp is None else amp
    mean_t = mean_arrival(amp, U, l, spec.x0)
    report = TimingReport(
        U=U, l=l, x0=spec.x0, k0=spec.k0, dx=spec.dx,
        mean_t=mean_t,
        tau=mean_t - classical_time(spec, l),
        tau_T=tunneling_time_tau_T(spec, U, l),
        hartman_t=hartman_time(amp, spec.x0, l),
        free_t=free_time(amp, spec.x0),
    )
    if not all(math.isfinite(v) for v in report.row()):
        raise NumericalConsistencyError(f"non-finite timing report at U={U}, l={l}")
    return report


def delay_sign_changes(spec: GaussianSpec, l: float, U_values) -> list[float]:
    """Heights where ``tau - l/v0`` changes sign, linearly interpolated on a U grid."""
    U_values = np.asarray(U_values, dtype=float)
    amp = MomentumAmplitude.from_gaussian(spec)
    delay = np.array([tunneling_time_tau(spec, U, l, amp) - l / spec.v0 for U in U_values])
    out = []
    for i in np.nonzero(np.sign(delay[:-1]) * np.sign(delay[1:]) < 0)[0]:
        u0, u1, d0, d1 = U_values[i], U_values[i + 1], delay[i], delay[i + 1]
        out.append(float(u0 - d0 * (u1 - u0) / (d1 - d0)))
    return out

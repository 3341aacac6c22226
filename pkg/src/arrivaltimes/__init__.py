"""Arrival times of quantum particles measured by a weak complex absorbing detector.

The package computes stationary scattering states of piecewise-constant
potentials with transfer matrices, the absorption kernel of a narrow
imaginary-potential detector, operator-normalized arrival-time
distributions, mean arrival and tunneling times, and a Crank-Nicolson
oracle that checks the stationary-state theory directly.
"""

__version__ = "0.1.0"

from .units import ATOMIC, Units  # noqa: E402
from .exceptions import (ConfigurationError, DegenerateNormalizationError, DomainError,  # noqa: E402
                         NumericalConsistencyError, SingularMatrixError)
from .potential import (AbsorberScaling, PotentialProfile, Region, barrier_absorber,  # noqa: E402
                        barrier_only, free_absorber, standard_profile)
from .scattering import BoundaryCondition, ScatteringSolution, solve, transmission_amplitude  # noqa: E402
from .wavepacket import GaussianSpec, MomentumAmplitude, gaussian_amplitude, inv_velocity_mean  # noqa: E402
from .distributions import (TimeDistribution, kijowski, pi_finite_eps, pi_kn, pi_on_barrier,  # noqa: E402
                            pi_on_free, pi_on_general, pi_tilde)
from .moments import (TimingReport, hartman_time, free_time, mean_arrival, timing_report,  # noqa: E402
                      tunneling_time_tau, tunneling_time_tau_T)

__all__ = [
    "ATOMIC", "Units",
    "ConfigurationError", "DegenerateNormalizationError", "DomainError",
    "NumericalConsistencyError", "SingularMatrixError",
    "AbsorberScaling", "PotentialProfile", "Region", "barrier_absorber", "barrier_only",
    "free_absorber", "standard_profile",
    "BoundaryCondition", "ScatteringSolution", "solve", "transmission_amplitude",
    "GaussianSpec", "MomentumAmplitude", "gaussian_amplitude", "inv_velocity_mean",
    "TimeDistribution", "kijowski", "pi_finite_eps", "pi_kn", "pi_on_barrier", "pi_on_free",
    "pi_on_general", "pi_tilde",
    "TimingReport", "hartman_time", "free_time", "mean_arrival", "timing_report",
    "tunneling_time_tau", "tunneling_time_tau_T",
]

"""Analytical link performance for the closed-form statistical design.

Under the aligned phases, the effective received gain
``psi^T diag(h) H f + mu g^T f`` is a complex Gaussian with mean magnitude
``nu = n kl**2 |e0 f| + mu kl |g_bar^T f|`` and total variance
``sigma**2 = n kn**2 (1 + kl**2 |e0 f|**2) + mu**2 kn**2``, so its magnitude
follows a Rice law with noncentrality ``nu`` and per-dimension scale
``sigma / sqrt(2)``.  Outage probability is the Rice CDF expressed through
the first-order Marcum Q function, and ergodic capacity follows from the
tail-integral identity E[log2(1+S)] = (1/ln 2) * int_0^inf P[S > u]/(1+u) du.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate as _integrate
from scipy import stats as _stats

from .beamforming import BeamformerSolution
from .channel import LosComponents, SystemConfig, rician_coefficients
from .errors import (
    DegenerateStatsError,
    IntegrationError,
    InvalidParameterError,
    InvalidStatsError,
)

_SQRT2 = math.sqrt(2.0)
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class RiceGainStats:
    """Rice parameters of the effective channel gain.

    ``nu`` is the noncentrality (magnitude of the mean gain), ``sigma**2``
    the total variance of the complex gain (per-dimension scale is
    ``sigma/sqrt(2)``), and ``mean_phase`` the argument of the mean gain,
    kept for reporting only.
    """

    nu: float
    sigma: float
    mean_phase: float


@dataclass(frozen=True)
class QuadratureSpec:
    """Adaptive-quadrature policy for the capacity integral."""

    relative_tolerance: float = 1e-8
    truncation_cutoff: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (0.0 < self.relative_tolerance < 1.0):
            raise InvalidParameterError("relative_tolerance must lie in (0, 1)")
        if not (0.0 < self.truncation_cutoff < 1.0):
            raise InvalidParameterError("truncation_cutoff must lie in (0, 1)")
        if self.max_subdivisions < 1:
            raise InvalidParameterError("max_subdivisions must be >= 1")


def rice_gain_stats(
    solution: BeamformerSolution,
    config: SystemConfig,
    los: LosComponents,
) -> RiceGainStats:
    """Rice parameters of the gain under an aligned statistical solution.

    The closed-form expressions presume the aligned phase vector (the one
    :func:`rislink.beamforming.phase_shift_for` returns), for which
    |psi^T E f| = n |e0 f| and the cascade and direct means add coherently.
    """
    f = solution.f
    e0f = abs(los.E[0] @ f)
    gf = los.g_bar @ f
    if e0f <= 1e-12 and abs(gf) <= 1e-12:
        raise DegenerateStatsError("both gain projections vanish for this solution")
    kappa = rician_coefficients(config.k)
    kl, kn = kappa.kappa_l, kappa.kappa_n
    nu = config.n * kl**2 * e0f + config.mu * kl * abs(gf)
    sigma2 = config.n * kn**2 * (1.0 + kl**2 * e0f**2) + config.mu**2 * kn**2
    mean = kl**2 * (solution.psi @ (los.E @ f)) + config.mu * kl * gf
    return RiceGainStats(nu=nu, sigma=math.sqrt(sigma2), mean_phase=float(np.angle(mean)))


def marcum_q1(a, b):
    """First-order Marcum Q function Q1(a, b).

    Tail probability P[X > b] of a Rice variable X with noncentrality ``a``
    and unit per-dimension scale.  X**2 is noncentral chi-square with two
    degrees of freedom and noncentrality a**2, so the survival function of
    that law evaluates Q1; the exact special cases Q1(a, 0) = 1 and
    Q1(0, b) = exp(-b**2/2) short-circuit.  Scalars map to a float, arrays
    broadcast elementwise.
    """
    a_arr = np.asarray(a, dtype=float)
    b_arr = np.asarray(b, dtype=float)
    if not (np.all(np.isfinite(a_arr)) and np.all(np.isfinite(b_arr))):
        raise InvalidParameterError("Marcum Q arguments must be finite")
    if np.any(a_arr < 0) or np.any(b_arr < 0):
        raise InvalidParameterError("Marcum Q arguments must be nonnegative")
    a_b, b_b = np.broadcast_arrays(a_arr, b_arr)
    out = np.empty(a_b.shape, dtype=float)
    zero_b = b_b == 0
    zero_a = (a_b == 0) & ~zero_b
    general = ~zero_b & ~zero_a
    out[zero_b] = 1.0
    out[zero_a] = np.exp(-0.5 * b_b[zero_a] ** 2)
    if np.any(general):
        out[general] = _stats.ncx2.sf(b_b[general] ** 2, 2, a_b[general] ** 2)
    out = np.clip(out, 0.0, 1.0)
    if np.isscalar(a) and np.isscalar(b):
        return float(out)
    return out


def outage_analytical(beta: float, stats: RiceGainStats, gamma: float) -> float:
    """Probability that the instantaneous SNR falls at or below ``beta``.

    The gain magnitude is Rice(nu, sigma/sqrt(2)), so with s = sigma/sqrt(2)
    the outage is 1 - Q1(nu/s, sqrt(beta/gamma)/s).  Nondecreasing in beta,
    0 at beta = 0, and 1 in the large-beta limit.
    """
    if not (math.isfinite(beta) and beta >= 0):
        raise InvalidParameterError(f"beta must be finite and >= 0, got {beta!r}")
    if not (math.isfinite(gamma) and gamma > 0):
        raise InvalidParameterError(f"gamma must be finite and > 0, got {gamma!r}")
    if not (stats.sigma > 0):
        raise InvalidStatsError("sigma must be positive for the Rice outage formula")
    s = stats.sigma / _SQRT2
    return float(1.0 - marcum_q1(stats.nu / s, math.sqrt(beta / gamma) / s))


def ergodic_capacity_analytical(
    stats: RiceGainStats,
    gamma: float,
    quad: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Ergodic capacity E[log2(1 + SNR)] in bits per channel use.

    Evaluates (1/ln 2) * int_0^inf Q1(nu/s, sqrt(u/gamma)/s) / (1+u) du with
    s = sigma/sqrt(2) by adaptive quadrature.  The upper limit is truncated
    where the Marcum factor drops below ``quad.truncation_cutoff``; past that
    point the integrand decays like a Gaussian tail, so the discarded mass is
    below cutoff * 2 * gamma * s**2 / (1 + u_max).
    """
    if not (math.isfinite(gamma) and gamma > 0):
        raise InvalidParameterError(f"gamma must be finite and > 0, got {gamma!r}")
    if not (stats.sigma > 0):
        raise InvalidStatsError("sigma must be positive for the capacity integral")
    s = stats.sigma / _SQRT2
    a = stats.nu / s
    b_max = a + math.sqrt(-2.0 * math.log(quad.truncation_cutoff)) + 2.0
    u_max = gamma * (s * b_max) ** 2

    def integrand(u: float) -> float:
        return marcum_q1(a, math.sqrt(u / gamma) / s) / (1.0 + u)

    # breakpoint at the distribution median region speeds refinement, but
    # quadpack requires the subdivision budget to exceed the breakpoint count
    points = (min(gamma * stats.nu**2, u_max),) if quad.max_subdivisions >= 10 else None
    result = _integrate.quad(
        integrand,
        0.0,
        u_max,
        epsabs=0.0,
        epsrel=quad.relative_tolerance,
        limit=quad.max_subdivisions,
        points=points,
        full_output=1,
    )
    value, abserr = result[0], result[1]
    if len(result) > 3 or abserr > max(quad.relative_tolerance * abs(value), 1e-300):
        raise IntegrationError(
            "capacity quadrature failed to reach the requested tolerance",
            estimate=value / _LN2,
            error_bound=abserr / _LN2,
        )
    return value / _LN2

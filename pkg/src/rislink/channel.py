"""Rician fading model for a RIS-aided MISO downlink.

A transmitter with ``m`` antennas reaches a single-antenna receiver over a
direct link and over an indirect link reflected by a passive surface with
``n`` elements.  Every link is Rician: a deterministic unit-modulus
line-of-sight steering component weighted by ``kappa_l`` plus an i.i.d.
circular complex Gaussian scatter component weighted by ``kappa_n``, with
``kappa_l**2 + kappa_n**2 = 1``.

Link-budget scalars enter as ``gamma`` (indirect-link SNR scale) and ``mu``
(direct/indirect amplitude ratio); both are linear quantities, converted from
dB by :func:`link_budget_from_db`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError

RandomStream = np.random.Generator

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters.

    m, n          transmit antennas / surface elements
    k             Rician factor (linear, >= 0)
    theta_dd      departure angle of the direct link [rad]
    theta_di1     departure angle transmitter -> surface [rad]
    theta_di2     departure angle surface -> receiver [rad]
    theta_ai1     arrival angle at the surface [rad]
    gamma         indirect-link SNR scale (linear, > 0)
    mu            direct/indirect amplitude ratio (linear, >= 0)
    """

    m: int
    n: int
    k: float
    theta_dd: float
    theta_di1: float
    theta_di2: float
    theta_ai1: float
    gamma: float
    mu: float

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise InvalidParameterError(f"m must be a positive integer, got {self.m!r}")
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidParameterError(f"n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.k) and self.k >= 0):
            raise InvalidParameterError(f"k must be finite and >= 0, got {self.k!r}")
        if not (math.isfinite(self.gamma) and self.gamma > 0):
            raise InvalidParameterError(f"gamma must be finite and > 0, got {self.gamma!r}")
        if not (math.isfinite(self.mu) and self.mu >= 0):
            raise InvalidParameterError(f"mu must be finite and >= 0, got {self.mu!r}")
        for name in ("theta_dd", "theta_di1", "theta_di2", "theta_ai1"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")


@dataclass(frozen=True)
class RicianCoefficients:
    """Amplitude weights of the line-of-sight and scatter components."""

    kappa_l: float
    kappa_n: float

    def __post_init__(self):
        if not (0.0 <= self.kappa_l <= 1.0 and 0.0 <= self.kappa_n < 1.0 + 1e-12):
            raise InvalidParameterError("kappa weights must lie in [0, 1]")
        if abs(self.kappa_l**2 + self.kappa_n**2 - 1.0) > 1e-12:
            raise InvalidParameterError("kappa_l**2 + kappa_n**2 must equal 1")


@dataclass(frozen=True)
class LosComponents:
    """Deterministic line-of-sight vectors/matrices and the cascade matrix.

    ``g_bar[m] = exp(j*m*theta_dd)`` (direct link), ``H_bar[n, m] =
    exp(j*(n*theta_ai1 - m*theta_di1))`` (transmitter -> surface), ``h_bar[n]
    = exp(-j*n*theta_di2)`` (surface -> receiver, conjugated per the Hermitian
    convention), and ``E = diag(h_bar) @ H_bar``.

    Every entry has unit modulus and every row of ``E`` is row 0 times a
    unit-modulus scalar, so ``E`` has rank one and all rows share the
    Euclidean norm sqrt(m).
    """

    g_bar: np.ndarray
    H_bar: np.ndarray
    h_bar: np.ndarray
    E: np.ndarray

    def __post_init__(self):
        n, m = self.H_bar.shape
        if self.g_bar.shape != (m,) or self.h_bar.shape != (n,) or self.E.shape != (n, m):
            raise InvalidParameterError("inconsistent line-of-sight component shapes")


@dataclass(frozen=True)
class ChannelRealization:
    """One fading draw: direct link ``g``, cascade links ``H`` and ``h``."""

    g: np.ndarray
    H: np.ndarray
    h: np.ndarray


def rician_coefficients(k: float) -> RicianCoefficients:
    """Split a linear Rician factor into amplitude weights.

    Returns ``(sqrt(k/(1+k)), sqrt(1/(1+k)))``; the squares always sum to 1.
    """
    if not (isinstance(k, (int, float)) and math.isfinite(k) and k >= 0):
        raise InvalidParameterError(f"Rician factor must be finite and >= 0, got {k!r}")
    return RicianCoefficients(
        kappa_l=math.sqrt(k / (1.0 + k)),
        kappa_n=math.sqrt(1.0 / (1.0 + k)),
    )


def link_budget_from_db(gamma_db: float, mu_db: float) -> tuple[float, float]:
    """Convert dB link-budget inputs to linear scale, 10**(x/10) for both.

    The amplitude ratio is treated as the dB-scaled quantity itself; see the
    shipped config file for notes on the alternative 20*log10 reading.
    """
    if not (math.isfinite(gamma_db) and math.isfinite(mu_db)):
        raise InvalidParameterError("link-budget dB values must be finite")
    return 10.0 ** (gamma_db / 10.0), 10.0 ** (mu_db / 10.0)


def build_los(config: SystemConfig) -> LosComponents:
    """Construct the deterministic steering components for a scenario."""
    m_idx = np.arange(config.m)
    n_idx = np.arange(config.n)
    g_bar = np.exp(1j * m_idx * config.theta_dd)
    H_bar = np.exp(1j * (n_idx[:, None] * config.theta_ai1 - m_idx[None, :] * config.theta_di1))
    h_bar = np.exp(-1j * n_idx * config.theta_di2)
    return LosComponents(g_bar=g_bar, H_bar=H_bar, h_bar=h_bar, E=h_bar[:, None] * H_bar)


def scatter_draw_size(m: int, n: int) -> int:
    """Number of standard normals one realization consumes."""
    return 2 * (m + n * m + n)


def sample_channel(
    los: LosComponents,
    kappa: RicianCoefficients,
    stream: RandomStream,
) -> ChannelRealization:
    """Draw one Rician realization from ``stream``.

    The draw order is fixed so identical stream state yields an identical
    realization: ``2*(m + n*m + n)`` standard normals are viewed as complex
    pairs (adjacent real/imag), scaled by 1/sqrt(2) to unit total variance
    per entry, and split into the direct link, the transmitter->surface
    matrix in row order, and the surface->receiver link.
    """
    n, m = los.H_bar.shape
    z = stream.standard_normal(scatter_draw_size(m, n)).view(np.complex128)
    z *= _INV_SQRT2 * kappa.kappa_n
    kl = kappa.kappa_l
    return ChannelRealization(
        g=kl * los.g_bar + z[:m],
        H=kl * los.H_bar + z[m:m + n * m].reshape(n, m),
        h=kl * los.h_bar + z[m + n * m:],
    )

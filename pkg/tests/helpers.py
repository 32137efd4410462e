"""Independent oracles shared by the test modules.

Everything here recomputes quantities by a different route than the package
(explicit loops, 2x2 closed forms, direct quadrature, reduced-form sampling)
so that agreement is evidence rather than tautology.
"""

import math

import numpy as np
from scipy import integrate, special

from rislink import SystemConfig, build_los, rician_coefficients

DEFAULT_KWARGS = dict(
    m=4,
    n=32,
    k=5.0,
    theta_dd=0.0,
    theta_di1=math.pi / 4,
    theta_di2=8 * math.pi / 5,
    theta_ai1=0.0,
    gamma=1.0,
    mu=10**0.5,
)


def make_config(**overrides) -> SystemConfig:
    kwargs = dict(DEFAULT_KWARGS)
    kwargs.update(overrides)
    return SystemConfig(**kwargs)


def z_matrix_by_loops(los, w1: float, w2: float) -> np.ndarray:
    """Entrywise assembly of w1 e0^H e0 + w2 conj(g) g^T with explicit loops."""
    e0 = los.E[0]
    g = los.g_bar
    m = len(g)
    Z = np.zeros((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            Z[i, j] = w1 * np.conj(e0[i]) * e0[j] + w2 * np.conj(g[i]) * g[j]
    return Z


def snr_by_loops(f, psi, realization, gamma: float, mu: float) -> float:
    """Scalar-by-scalar evaluation of gamma |h^T diag(psi) H f + mu g^T f|^2."""
    n, m = realization.H.shape
    acc = 0.0 + 0.0j
    for k in range(n):
        inner = 0.0 + 0.0j
        for j in range(m):
            inner += realization.H[k, j] * f[j]
        acc += realization.h[k] * psi[k] * inner
    for j in range(m):
        acc += mu * realization.g[j] * f[j]
    return gamma * abs(acc) ** 2


def rank2_top_eigenpair(los, w1: float, w2: float):
    """Closed-form dominant eigenpair of w1 u1 u1^H + w2 u2 u2^H.

    Restricting to the span of u1 = conj(e0) and u2 = conj(g_bar) and writing
    v = B alpha, the eigenproblem reduces to the 2x2 system
    diag(w1, w2) (B^H B) alpha = lam alpha, solved by the quadratic formula.
    """
    B = np.stack([los.E[0].conj(), los.g_bar.conj()], axis=1)
    S = B.conj().T @ B
    A = np.diag([w1, w2]).astype(complex) @ S
    tr = float((A[0, 0] + A[1, 1]).real)
    det = float((A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]).real)
    lam = 0.5 * (tr + math.sqrt(max(tr * tr - 4.0 * det, 0.0)))
    cand1 = np.array([A[0, 1], lam - A[0, 0]])
    cand2 = np.array([lam - A[1, 1], A[1, 0]])
    alpha = cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2
    if np.linalg.norm(alpha) == 0.0:
        alpha = np.array([1.0, 0.0])
    v = B @ alpha
    v = v / np.linalg.norm(v)
    idx = np.flatnonzero(np.abs(v) > 1e-9)
    pivot = v[idx[0]]
    return lam, v * (pivot.conj() / abs(pivot))


def marcum_q1_by_quadrature(a: float, b: float) -> float:
    """Tail of the unit-scale Rice density by adaptive quadrature.

    The integrand x I0(a x) exp(-(x^2+a^2)/2) is rewritten with the scaled
    Bessel function to avoid overflow: x i0e(a x) exp(-(x-a)^2 / 2).
    """
    if b == 0.0:
        return 1.0

    def density(x):
        return x * special.i0e(a * x) * math.exp(-0.5 * (x - a) ** 2)

    val, _ = integrate.quad(density, b, np.inf, epsabs=1e-300, epsrel=1e-13, limit=500)
    return val


def rice_cdf_by_quadrature(x: float, nu: float, s: float) -> float:
    """CDF of Rice(nu, s) integrated directly from the density."""
    if x <= 0.0:
        return 0.0

    def density(t):
        return (t / s**2) * special.i0e(nu * t / s**2) * math.exp(-0.5 * ((t - nu) / s) ** 2)

    val, _ = integrate.quad(density, 0.0, x, epsabs=1e-300, epsrel=1e-12, limit=500)
    return val


def expected_log_capacity_by_quadrature(nu: float, sigma: float, gamma: float) -> float:
    """E[log2(1 + gamma X^2)] for X ~ Rice(nu, sigma/sqrt(2)) by quadrature."""
    s = sigma / math.sqrt(2.0)

    def integrand(x):
        dens = (x / s**2) * special.i0e(nu * x / s**2) * math.exp(-0.5 * ((x - nu) / s) ** 2)
        return math.log2(1.0 + gamma * x * x) * dens

    hi = nu + 12.0 * s
    val, _ = integrate.quad(integrand, 0.0, hi, epsabs=1e-300, epsrel=1e-11, limit=500)
    return val


def sample_gains_reduced(config, los, f, psi, n_samples: int, seed: int, batch: int = 200_000):
    """Effective gain draws through the reduced representation.

    For a fixed unit-norm f the cascade matrix enters only through H f, whose
    scatter part is CN(0, I_n); drawing it directly is distributionally
    identical to drawing the full matrix and 30x cheaper.  Used as a moment
    oracle, not as the engine under test.
    """
    kappa = rician_coefficients(config.k)
    kl, kn = kappa.kappa_l, kappa.kappa_n
    rng = np.random.default_rng(seed)
    Hf_los = los.H_bar @ f
    gf_los = los.g_bar @ f
    out = np.empty(n_samples)
    done = 0
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    while done < n_samples:
        b = min(batch, n_samples - done)
        q = (rng.standard_normal((b, config.n)) + 1j * rng.standard_normal((b, config.n))) * inv_sqrt2
        ht = (rng.standard_normal((b, config.n)) + 1j * rng.standard_normal((b, config.n))) * inv_sqrt2
        gt = (rng.standard_normal((b, config.m)) + 1j * rng.standard_normal((b, config.m))) * inv_sqrt2
        Hf = kl * Hf_los + kn * q
        h = kl * los.h_bar + kn * ht
        amp = (h * Hf) @ psi + config.mu * (kl * gf_los + kn * (gt @ f))
        out[done:done + b] = np.abs(amp)
        done += b
    return out


def random_unit_vectors(m: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    F = rng.standard_normal((count, m)) + 1j * rng.standard_normal((count, m))
    return F / np.linalg.norm(F, axis=1, keepdims=True)

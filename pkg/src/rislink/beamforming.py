"""Transmit beamformer and surface phase design.

Three schemes are implemented:

* ``design_proposed`` - closed-form statistical-CSI design.  The mean-SNR
  objective, after aligning the surface phases, splits into a quadratic part
  ``f^H Z f`` (with ``Z = w1 * e0^H e0 + w2 * conj(g_bar) g_bar^T``, a rank-2
  Hermitian PSD matrix) plus a nonnegative cross term.  Dropping the cross
  term leaves a Rayleigh-quotient problem whose maximizer is the principal
  eigenvector of ``Z``; the phases then rotate the cascade response onto the
  direct-link phase.
* ``design_max_mean_snr`` - alternating maximization of the exact mean SNR
  (phase alignment step / principal-eigenvector step), used as the
  statistical baseline.
* ``design_max_snr`` - alternating maximization of the instantaneous SNR for
  one perfect-CSI realization, used as the genie baseline.

All returned solutions satisfy the unit-norm transmit constraint and the
unit-modulus surface constraint.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, LosComponents, SystemConfig, build_los, rician_coefficients
from .errors import (
    ConvergenceError,
    DegenerateBeamError,
    DegenerateMatrixError,
    DimensionMismatchError,
    InvalidParameterError,
)

_DEGENERACY_TOL = 1e-12
_EIGEN_TOL = 1e-12
_EIGEN_MAX_ITERS = 10_000
_ALTERNATING_TOL = 1e-8
_ALTERNATING_MAX_ITERS = 200
_POWER_START_SEED = 0x9E3779B9


class SchemeTag(enum.Enum):
    PROPOSED = "Proposed"
    MAX_MEAN_SNR = "MaxMeanSnr"
    MAX_SNR = "MaxSnr"


@dataclass(frozen=True)
class ObjectiveWeights:
    """Coefficients of the aligned mean-SNR objective.

    w1 = n**2 kl**4 + n kl**2 kn**2 multiplies the cascade gain |e0 f|**2,
    w2 = mu**2 kl**2 multiplies the direct gain |g_bar^T f|**2, and
    w3 = 2 n mu kl**3 multiplies the cross term |e0 f| |g_bar^T f| that the
    quadratic relaxation drops.
    """

    w1: float
    w2: float
    w3: float


@dataclass(frozen=True)
class QuadraticForm:
    """Hermitian PSD matrix of the relaxed objective f^H Z f (rank <= 2)."""

    Z: np.ndarray

    def __post_init__(self):
        Z = self.Z
        if Z.ndim != 2 or Z.shape[0] != Z.shape[1]:
            raise InvalidParameterError("quadratic form must be a square matrix")
        scale = float(np.abs(Z).max())
        if scale > 0 and float(np.abs(Z - Z.conj().T).max()) > 1e-12 * scale:
            raise InvalidParameterError("quadratic form must be Hermitian")


@dataclass(frozen=True)
class BeamformerSolution:
    """Unit-norm transmit vector, unit-modulus phase vector, and provenance.

    ``objective_trace`` records the per-iteration objective of the
    alternating schemes (exact mean SNR or instantaneous SNR), starting from
    the initial point; it stays ``None`` for the closed-form scheme.
    """

    f: np.ndarray
    psi: np.ndarray
    scheme_tag: SchemeTag
    converged: bool = True
    iterations: int = 0
    objective_trace: np.ndarray | None = None


def compute_weights(config: SystemConfig) -> ObjectiveWeights:
    """Objective weights for a scenario; all nonnegative, zero when k = 0."""
    kappa = rician_coefficients(config.k)
    kl, kn = kappa.kappa_l, kappa.kappa_n
    n = config.n
    return ObjectiveWeights(
        w1=n**2 * kl**4 + n * kl**2 * kn**2,
        w2=config.mu**2 * kl**2,
        w3=2.0 * n * config.mu * kl**3,
    )


def build_quadratic_form(los: LosComponents, weights: ObjectiveWeights) -> QuadraticForm:
    """Assemble Z = w1 * e0^H e0 + w2 * conj(g_bar) g_bar^T.

    Any cascade row yields the same outer product because the rows differ
    only by a unit-modulus scalar, so row 0 is used.
    """
    e0 = los.E[0]
    Z = weights.w1 * np.outer(e0.conj(), e0) + weights.w2 * np.outer(los.g_bar.conj(), los.g_bar)
    return QuadraticForm(Z=Z)


def _normalize_phase(v: np.ndarray) -> np.ndarray:
    """Rotate a global phase so the first entry above 1e-9 is real positive."""
    idx = np.flatnonzero(np.abs(v) > 1e-9)
    if idx.size:
        pivot = v[idx[0]]
        v = v * (pivot.conj() / abs(pivot))
    return v

def _power_iteration(Z: np.ndarray, tol: float, max_iters: int) -> tuple[np.ndarray, float]:
    """Dominant eigenpair of a Hermitian PSD matrix by power iteration.

    Stops when ||Z v - lam v|| <= tol * lam with lam the Rayleigh quotient.
    The start vector is drawn from a fixed-seed generator, which makes the
    result deterministic and almost surely not orthogonal to the top
    eigenspace.
    """
    scale = float(np.abs(Z).max())
    if not math.isfinite(scale):
        raise InvalidParameterError("quadratic form contains non-finite entries")
    if scale == 0.0:
        raise DegenerateMatrixError("quadratic form is identically zero")
    rng = np.random.default_rng(_POWER_START_SEED)
    dim = Z.shape[0]
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    residual = math.inf
    for _ in range(max_iters):
        w = Z @ v
        lam = float(np.vdot(v, w).real)
        residual = float(np.linalg.norm(w - lam * v))
        if lam > 0 and residual <= tol * lam:
            return _normalize_phase(v), lam
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            # start vector fell in the null space; perturb and continue
            v = v + (rng.standard_normal(dim) + 1j * rng.standard_normal(dim)) * 1e-3
            v /= np.linalg.norm(v)
            continue
        v = w / norm_w
    raise ConvergenceError(
        f"power iteration did not reach tol={tol:g} within {max_iters} iterations",
        residual=residual,
    )


def principal_eigenvector(
    form: QuadraticForm,
    tol: float = _EIGEN_TOL,
    max_iters: int = _EIGEN_MAX_ITERS,
) -> np.ndarray:
    """Unit-norm principal eigenvector of a Hermitian PSD quadratic form.

    The global phase is fixed so the first significantly nonzero entry is
    real and positive; scaling the form by any positive constant leaves the
    result unchanged.
    """
    if not (tol > 0):
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    if max_iters < 1:
        raise InvalidParameterError("max_iters must be >= 1")
    v, _ = _power_iteration(np.asarray(form.Z, dtype=complex), tol, max_iters)
    return v


def phase_shift_for(f: np.ndarray, los: LosComponents) -> np.ndarray:
    """Surface phases that rotate the cascade response onto the direct link.

    Writing w for the (row) pseudoinverse of E f, the alignment is
    psi^T = c * (g_bar^T f) * w with c = n |e0 f| / |g_bar^T f| chosen to
    restore unit modulus; elementwise this is psi_k =
    exp(j*(arg(g_bar^T f) - arg((E f)_k))), and the aligned product satisfies
    psi^T E f = n |e0 f| exp(j arg(g_bar^T f)).

    When the direct-link projection g_bar^T f vanishes the scale c is
    undefined; the phases then fall back to plain cascade alignment
    psi_k = exp(-j arg((E f)_k)), the continuous limit of the alignment as
    |g_bar^T f| -> 0.
    """
    Ef = los.E @ f
    if np.linalg.norm(Ef) <= _DEGENERACY_TOL:
        raise DegenerateBeamError("beam is orthogonal to the cascade (E f = 0)")
    gf = los.g_bar @ f
    if abs(gf) <= _DEGENERACY_TOL:
        return np.exp(-1j * np.angle(Ef))
    return np.exp(1j * (np.angle(gf) - np.angle(Ef)))


def design_proposed(
    config: SystemConfig,
    tol: float = _EIGEN_TOL,
    max_iters: int = _EIGEN_MAX_ITERS,
) -> BeamformerSolution:
    """Closed-form statistical-CSI design.

    The transmit vector is the principal eigenvector of the rank-2 quadratic
    form; the surface phases align the cascade onto the direct link.
    Requires a line-of-sight component (k > 0), otherwise the quadratic form
    is identically zero and no preferred direction exists.
    """
    if config.k == 0:
        raise InvalidParameterError(
            "the closed-form scheme requires a line-of-sight component (k > 0)"
        )
    los = build_los(config)
    form = build_quadratic_form(los, compute_weights(config))
    f = principal_eigenvector(form, tol=tol, max_iters=max_iters)
    psi = phase_shift_for(f, los)
    return BeamformerSolution(f=f, psi=psi, scheme_tag=SchemeTag.PROPOSED)


def _check_beam_shapes(f: np.ndarray, psi: np.ndarray, config: SystemConfig):
    if f.shape != (config.m,):
        raise DimensionMismatchError(f"f has shape {f.shape}, expected ({config.m},)")
    if psi.shape != (config.n,):
        raise DimensionMismatchError(f"psi has shape {psi.shape}, expected ({config.n},)")


def mean_snr_exact(
    f: np.ndarray,
    psi: np.ndarray,
    config: SystemConfig,
    los: LosComponents,
) -> float:
    """Exact mean SNR of a fixed (f, psi) pair over the fading distribution.

    gamma * |kl**2 psi^T E f + mu kl g_bar^T f|**2
      + gamma kl**2 kn**2 ||H_bar f||**2
      + gamma (kl**2 kn**2 + kn**4) n + gamma mu**2 kn**2
    """
    _check_beam_shapes(f, psi, config)
    kappa = rician_coefficients(config.k)
    kl, kn = kappa.kappa_l, kappa.kappa_n
    aligned = kl**2 * (psi @ (los.h_bar * (los.H_bar @ f))) + config.mu * kl * (los.g_bar @ f)
    scatter = kl**2 * kn**2 * float(np.linalg.norm(los.H_bar @ f) ** 2)
    floor = (kl**2 * kn**2 + kn**4) * config.n + config.mu**2 * kn**2
    return config.gamma * (abs(aligned) ** 2 + scatter + floor)


def lower_bound_mean_snr(f: np.ndarray, config: SystemConfig, los: LosComponents) -> float:
    """Quadratic lower bound on the mean SNR under the aligned phases.

    gamma * (f^H Z f + (kl**2 kn**2 + kn**4) n + mu**2 kn**2); the gap to
    :func:`mean_snr_exact` with aligned phases is the dropped cross term
    gamma * w3 * |e0 f| * |g_bar^T f| >= 0.
    """
    if f.shape != (config.m,):
        raise DimensionMismatchError(f"f has shape {f.shape}, expected ({config.m},)")
    kappa = rician_coefficients(config.k)
    kl, kn = kappa.kappa_l, kappa.kappa_n
    form = build_quadratic_form(los, compute_weights(config))
    quad = float(np.vdot(f, form.Z @ f).real)
    floor = (kl**2 * kn**2 + kn**4) * config.n + config.mu**2 * kn**2
    return config.gamma * (quad + floor)


def design_max_mean_snr(
    config: SystemConfig,
    init: BeamformerSolution | None = None,
    max_iters: int = _ALTERNATING_MAX_ITERS,
    tol: float = _ALTERNATING_TOL,
) -> BeamformerSolution:
    """Alternating maximization of the exact mean SNR (statistical baseline).

    Each iteration (a) aligns every surface phase to the direct-link phase,
    psi_k = exp(j*(arg(g_bar^T f) - arg((E f)_k))), which maximizes the
    coherent term for fixed f, then (b) sets f to the principal eigenvector
    of v v^H + kl**2 kn**2 H_bar^H H_bar with v^H = kl**2 psi^T E +
    mu kl g_bar^T, which maximizes the objective for fixed psi.  The exact
    mean SNR is therefore nondecreasing; iteration stops once the relative
    improvement drops below ``tol``.  On budget exhaustion the best iterate
    is returned with ``converged=False`` rather than raising.
    """
    los = build_los(config)
    kappa = rician_coefficients(config.k)
    kl, kn = kappa.kappa_l, kappa.kappa_n
    if init is None:
        init = design_proposed(config)
    f = np.asarray(init.f, dtype=complex)
    psi = np.asarray(init.psi, dtype=complex)
    _check_beam_shapes(f, psi, config)

    HH = los.H_bar.conj().T @ los.H_bar
    trace = [mean_snr_exact(f, psi, config, los)]
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        gf = los.g_bar @ f
        psi = np.exp(1j * (np.angle(gf) - np.angle(los.E @ f)))
        v = (kl**2 * (psi @ los.E) + config.mu * kl * los.g_bar).conj()
        step = QuadraticForm(Z=np.outer(v, v.conj()) + kl**2 * kn**2 * HH)
        f = principal_eigenvector(step)
        trace.append(mean_snr_exact(f, psi, config, los))
        if trace[-1] - trace[-2] <= tol * abs(trace[-2]):
            converged = True
            break
    return BeamformerSolution(
        f=f,
        psi=psi,
        scheme_tag=SchemeTag.MAX_MEAN_SNR,
        converged=converged,
        iterations=iterations,
        objective_trace=np.asarray(trace),
    )


def _max_snr_iterate(
    g: np.ndarray,
    H: np.ndarray,
    h: np.ndarray,
    mu: float,
    f0: np.ndarray,
    psi0: np.ndarray,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, list[float], bool]:
    """Lean alternating loop on the instantaneous amplitude |row . f|.

    Returns (f, psi, amplitude trace, converged); the trace starts at the
    amplitude of the initial pair.  Kept free of dataclass wrapping because
    the Monte Carlo engine calls it once per realization.
    """
    Hd = h[:, None] * H
    f = f0
    psi = psi0
    amps = [abs(psi @ (Hd @ f) + mu * (g @ f))]
    converged = False
    for _ in range(max_iters):
        psi = np.exp(1j * (np.angle(mu * (g @ f)) - np.angle(Hd @ f)))
        row = psi @ Hd + mu * g
        amp = float(np.linalg.norm(row))
        if amp == 0.0:
            # degenerate realization; the objective is stuck at zero
            amps.append(amp)
            converged = True
            break
        f = row.conj() / amp
        amps.append(amp)
        if amp - amps[-2] <= tol * amps[-2]:
            converged = True
            break
    return f, psi, amps, converged


def design_max_snr(
    realization: ChannelRealization,
    config: SystemConfig,
    init: BeamformerSolution,
    max_iters: int = 50,
    tol: float = _ALTERNATING_TOL,
) -> BeamformerSolution:
    """Alternating per-realization design on perfect CSI (genie baseline).

    Given f, every surface phase rotates its cascade term onto the
    direct-link phase of this realization; given psi, f conjugate-matches the
    effective row channel psi^T diag(h) H + mu g^T.  Both steps maximize
    their subproblem, so the instantaneous SNR is nondecreasing and the
    result is at least as good as ``init`` on this realization.  On budget
    exhaustion the best iterate is returned with ``converged=False``.
    """
    _check_beam_shapes(init.f, init.psi, config)
    if realization.H.shape != (config.n, config.m):
        raise DimensionMismatchError(
            f"realization H has shape {realization.H.shape}, expected ({config.n}, {config.m})"
        )
    f, psi, amps, converged = _max_snr_iterate(
        realization.g, realization.H, realization.h, config.mu,
        np.asarray(init.f, dtype=complex), np.asarray(init.psi, dtype=complex),
        max_iters, tol,
    )
    trace = config.gamma * np.square(amps)
    return BeamformerSolution(
        f=f,
        psi=psi,
        scheme_tag=SchemeTag.MAX_SNR,
        converged=converged,
        iterations=len(amps) - 1,
        objective_trace=trace,
    )


def instantaneous_snr(
    f: np.ndarray,
    psi: np.ndarray,
    realization: ChannelRealization,
    config: SystemConfig,
) -> float:
    """gamma * |h^T diag(psi) H f + mu g^T f|**2 for one realization."""
    _check_beam_shapes(f, psi, config)
    if realization.H.shape != (config.n, config.m):
        raise DimensionMismatchError(
            f"realization H has shape {realization.H.shape}, expected ({config.n}, {config.m})"
        )
    amp = psi @ (realization.h * (realization.H @ f)) + config.mu * (realization.g @ f)
    return config.gamma * float(abs(amp) ** 2)

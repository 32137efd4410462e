"""RIS-aided MISO link toolkit.

Closed-form statistical-CSI beamforming for a Rician-faded link with a
passive reflecting surface, two baseline designs, Rice-law outage and
ergodic-capacity analysis, and a deterministic Monte Carlo engine that
validates the analysis.
"""

from .analysis import (
    QuadratureSpec,
    RiceGainStats,
    ergodic_capacity_analytical,
    marcum_q1,
    outage_analytical,
    rice_gain_stats,
)
from .beamforming import (
    BeamformerSolution,
    ObjectiveWeights,
    QuadraticForm,
    SchemeTag,
    build_quadratic_form,
    compute_weights,
    design_max_mean_snr,
    design_max_snr,
    design_proposed,
    instantaneous_snr,
    lower_bound_mean_snr,
    mean_snr_exact,
    phase_shift_for,
    principal_eigenvector,
)
from .channel import (
    ChannelRealization,
    LosComponents,
    RicianCoefficients,
    SystemConfig,
    build_los,
    link_budget_from_db,
    rician_coefficients,
    sample_channel,
)
from .montecarlo import (
    EmpiricalResult,
    GainFitReport,
    MomentReport,
    SchemeEmpirics,
    SimulationPlan,
    simulate,
    substream,
    validate_gain_decomposition,
    validate_gain_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BeamformerSolution",
    "ChannelRealization",
    "EmpiricalResult",
    "GainFitReport",
    "LosComponents",
    "MomentReport",
    "ObjectiveWeights",
    "QuadraticForm",
    "QuadratureSpec",
    "RiceGainStats",
    "RicianCoefficients",
    "SchemeEmpirics",
    "SchemeTag",
    "SimulationPlan",
    "SystemConfig",
    "build_los",
    "build_quadratic_form",
    "compute_weights",
    "design_max_mean_snr",
    "design_max_snr",
    "design_proposed",
    "ergodic_capacity_analytical",
    "instantaneous_snr",
    "link_budget_from_db",
    "lower_bound_mean_snr",
    "marcum_q1",
    "mean_snr_exact",
    "outage_analytical",
    "phase_shift_for",
    "principal_eigenvector",
    "rice_gain_stats",
    "rician_coefficients",
    "sample_channel",
    "simulate",
    "substream",
    "validate_gain_decomposition",
    "validate_gain_distribution",
    "__version__",
]

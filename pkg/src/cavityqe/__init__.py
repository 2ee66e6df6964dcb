"""Quantum-efficiency toolkit for cavity-based single-photon sources.

Simulates one emitter coupled to one leaky cavity mode in the
single-excitation sector, computes the quantum efficiency of the photon
source in closed form and numerically, and assists design work through
pulse metrics, parameter sweeps, cavity optimization, and emission
spectra.  Rates inside the API are angular (rad/ns); the command line and
file formats speak linear GHz.
"""

from ._backend import BACKEND
from .analysis import (
    DegeneratePulseError,
    EmissionMetrics,
    OptimizationReport,
    SweepResult,
    compare_law_kimble,
    optimize_kappa,
    pulse_metrics,
    sweep,
)
from .analytic import (
    AmplitudePair,
    EfficiencyBreakdown,
    PurcellBreakdown,
    ResonanceRequiredError,
    amplitudes_at,
    amplitudes_on_grid,
    efficiency,
    efficiency_via_purcell,
    emission_probability_at,
    emission_rate_at,
    output_spectrum_analytic,
    spectrum_peak_offsets,
)
from .engine import (
    AmplitudeTrajectory,
    HorizonError,
    IntegrationConfig,
    LedgerError,
    default_dt,
    default_t_max,
    efficiency_numeric,
    integrate,
    integrate_to_convergence,
    output_spectrum_numeric,
)
from .params import (
    CavityQuality,
    Coupling,
    DerivedRates,
    RegimeLabel,
    SpectrumGrid,
    SystemParams,
    ValidationError,
    angular_to_ghz,
    classify_regime,
    derive_rates,
    ghz_to_angular,
)

__version__ = "0.1.0"

__all__ = [
    "AmplitudePair",
    "AmplitudeTrajectory",
    "BACKEND",
    "CavityQuality",
    "Coupling",
    "DegeneratePulseError",
    "DerivedRates",
    "EfficiencyBreakdown",
    "EmissionMetrics",
    "HorizonError",
    "IntegrationConfig",
    "LedgerError",
    "OptimizationReport",
    "PurcellBreakdown",
    "RegimeLabel",
    "ResonanceRequiredError",
    "SpectrumGrid",
    "SweepResult",
    "SystemParams",
    "ValidationError",
    "amplitudes_at",
    "amplitudes_on_grid",
    "angular_to_ghz",
    "classify_regime",
    "compare_law_kimble",
    "default_dt",
    "default_t_max",
    "derive_rates",
    "efficiency",
    "efficiency_numeric",
    "efficiency_via_purcell",
    "emission_probability_at",
    "emission_rate_at",
    "ghz_to_angular",
    "integrate",
    "integrate_to_convergence",
    "optimize_kappa",
    "output_spectrum_analytic",
    "output_spectrum_numeric",
    "pulse_metrics",
    "spectrum_peak_offsets",
    "sweep",
    "__version__",
]

"""First-hitting-time densities for diffusion channels with time-varying drift."""
from .density import (
    ChannelParams,
    DensityCurve,
    FluxDistance,
    PrefactorMode,
    cig_density,
    density_curve,
    expected_positive_flux,
    ig_cdf,
    ig_density,
    mean_flux,
)
from .drift import (
    DriftKind,
    DriftProfile,
    cumulative_displacement,
    intrinsic_energy_integral,
    mu,
    running_average_drift,
)
from .estimators import CIGDensity, IGDensity
from .girsanov import DiscretePath, decomposed_log_rn, direct_log_rn, mpp_coupling
from .metrics import FitReport, compare, find_peaks, ks_statistic, l1_distance
from .scenario import Scenario, load_scenario, parse_scenario, serialize_scenario
from .simulate import ArrivalSet, SimConfig, histogram, simulate
from .validation import ConfigError, DomainError

__version__ = "0.1.0"


__all__ = [
    "ArrivalSet",
    "CIGDensity",
    "ChannelParams",
    "ConfigError",
    "DensityCurve",
    "DiscretePath",
    "DomainError",
    "DriftKind",
    "DriftProfile",
    "FitReport",
    "FluxDistance",
    "IGDensity",
    "PrefactorMode",
    "Scenario",
    "SimConfig",
    "cig_density",
    "compare",
    "cumulative_displacement",
    "decomposed_log_rn",
    "density_curve",
    "direct_log_rn",
    "expected_positive_flux",
    "find_peaks",
    "histogram",
    "ig_cdf",
    "ig_density",
    "intrinsic_energy_integral",
    "ks_statistic",
    "l1_distance",
    "load_scenario",
    "mean_flux",
    "mpp_coupling",
    "mu",
    "parse_scenario",
    "running_average_drift",
    "serialize_scenario",
    "simulate",
]

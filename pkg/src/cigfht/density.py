"""Inverse-Gaussian and corrected-IG first-hitting-time densities.

The corrected density keeps the IG exponential shape but measures the
remaining distance as ``l - x0 - M(t)`` and replaces the constant IG
prefactor by the expected positive part of a Gaussian boundary flux::

    F_mean(t)   = l + (mu(t) - v0) * sqrt(sigma2 * t)
    S(t)        = sqrt(sigma2 * t)
    F_smooth(t) = F_mean * Phi(F_mean / S) + S * phi(F_mean / S)
    f(t)        = F_smooth(t) / sqrt(2 pi sigma2 t^3)
                  * exp(-(l - x0 - M(t))^2 / (2 sigma2 t))

With ``mode="running_average"`` the drift fluctuation in the prefactor is
measured against the running mean ``M(t)/t`` instead of the fixed baseline
``v0``, i.e. ``F_mean = l + (mu(t) - M(t)/t) sqrt(sigma2 t)``. This tames the
overshoot after abrupt switches and barely changes smooth periodic profiles.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .drift import cumulative_displacement, mu, running_average_drift
from .validation import ConfigError, DomainError, check_positive, check_positive_times, check_times

__all__ = [
    "ChannelParams",
    "PrefactorMode",
    "FluxDistance",
    "DensityCurve",
    "std_normal_pdf",
    "std_normal_cdf",
    "ig_exponent",
    "cig_exponent",
    "ig_density",
    "ig_cdf",
    "ig_mode",
    "mean_flux",
    "expected_positive_flux",
    "log_expected_positive_flux",
    "cig_density",
    "density_curve",
    "write_curves_csv",
    "read_curves_csv",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
# below this standardized flux the EPF is evaluated by its asymptotic series
_Z_ASYMPTOTIC = -40.0


@dataclass(frozen=True)
class ChannelParams:
    """Release point ``x0``, absorbing boundary ``ell > x0`` and diffusion ``sigma2``."""

    x0: float = 0.0
    ell: float = 5.0
    sigma2: float = 2.0

    def __post_init__(self):
        for name in ("x0", "ell", "sigma2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if not self.ell > self.x0:
            raise ValueError("absorbing boundary must lie beyond the release point (ell > x0)")
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be > 0")

    @property
    def gap(self):
        """Propagation distance ``ell - x0``."""
        return self.ell - self.x0


class PrefactorMode(str, enum.Enum):
    INSTANTANEOUS = "instantaneous"
    RUNNING_AVERAGE = "running_average"


class FluxDistance(str, enum.Enum):
    BOUNDARY = "boundary"
    GAP = "gap"


@dataclass
class DensityCurve:
    """A density sampled on a uniform grid over ``(0, t_max]`` plus its CDF."""

    grid: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def t_max(self):
        return float(self.grid[-1])

    @property
    def mass(self):
        return float(self.cdf[-1])

    def cdf_at(self, t):
        """Model CDF, linear between grid points and ``0`` at ``t = 0``."""
        xp = np.concatenate(([0.0], self.grid))
        fp = np.concatenate(([0.0], self.cdf))
        return np.interp(t, xp, fp)

    def pdf_at(self, t):
        xp = np.concatenate(([0.0], self.grid))
        fp = np.concatenate(([0.0], self.pdf))
        return np.interp(t, xp, fp)


def std_normal_pdf(z):
    z = np.asarray(z, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-0.5 * z * z)
    return float(out) if out.ndim == 0 else out


def std_normal_cdf(z):
    """``Phi(z)`` through ``erfc`` so the lower tail keeps full relative precision."""
    z = np.asarray(z, dtype=float)
    out = 0.5 * special.erfc(-z / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def _as_mode(mode):
    return PrefactorMode(mode.value if isinstance(mode, enum.Enum) else str(mode).lower())


def ig_exponent(params, v0, t):
    """Exponent of the IG density, ``-(lambda - v0 t)^2 / (2 sigma2 t)``."""
    t, scalar = check_positive_times(t)
    d = params.gap - v0 * t
    out = -(d * d) / (2.0 * params.sigma2 * t)
    return float(out[0]) if scalar else out


def cig_exponent(params, profile, t):
    """Exponent of the corrected density, ``-(ell - x0 - M(t))^2 / (2 sigma2 t)``."""
    t, scalar = check_positive_times(t)
    d = params.gap - cumulative_displacement(profile, t)
    out = -(d * d) / (2.0 * params.sigma2 * t)
    return float(out[0]) if scalar else out


def _kernel(prefactor, exponent, sigma2, t):
    # prefactor / sqrt(2 pi sigma2 t^3) * exp(exponent), safe as t -> 0+
    log_rest = exponent - 1.5 * np.log(t) - 0.5 * np.log(2.0 * math.pi * sigma2)
    return prefactor * np.exp(log_rest)


def ig_density(params, v0, t):
    """Classical constant-drift FHT density with prefactor ``ell - x0``."""
    t, scalar = check_positive_times(t)
    out = _kernel(params.gap, ig_exponent(params, v0, t), params.sigma2, t)
    return float(out[0]) if scalar else out


def ig_cdf(params, v0, t):
    """Closed-form IG CDF (defective when ``v0 < 0``); ``0`` at ``t = 0``."""
    t, scalar = check_times(t)
    out = np.zeros_like(t)
    pos = t > 0
    tp = t[pos]
    lam, s2 = params.gap, params.sigma2
    root = np.sqrt(s2 * tp)
    a = (v0 * tp - lam) / root
    b = -(v0 * tp + lam) / root
    # exp(2 v0 lam / s2) * Phi(b) combined in log space to avoid overflow
    second = np.exp(2.0 * v0 * lam / s2 + special.log_ndtr(b))
    out[pos] = special.ndtr(a) + second
    return float(out[0]) if scalar else out


def ig_mode(params, v0):
    """Mode of the IG density for ``v0 > 0``."""
    check_positive(v0, "v0")
    m = params.gap / v0
    shape = params.gap**2 / params.sigma2
    r = 1.5 * m / shape
    return m * (math.sqrt(1.0 + r * r) - r)


def mean_flux(params, profile, t, mode=PrefactorMode.INSTANTANEOUS, flux_distance="boundary"):
    """Diffusion-scaled mean flux ``F_mean(t)``; negative values mean backflow.

    ``flux_distance="gap"`` uses ``ell - x0`` instead of ``ell`` as the
    leading term, which only matters when ``x0 != 0``.
    """
    t, scalar = check_times(t)
    mode = _as_mode(mode)
    base = params.ell if FluxDistance(flux_distance) is FluxDistance.BOUNDARY else params.gap
    if mode is PrefactorMode.INSTANTANEOUS:
        reference = profile.v0
    else:
        reference = running_average_drift(profile, t)
    out = base + (mu(profile, t) - reference) * np.sqrt(params.sigma2 * t)
    return float(out[0]) if scalar else out


def _positive_part_gap(z):
    """``1 + z Phi(z)/phi(z)`` for ``z < 0`` (so that EPF = S phi(z) times this)."""
    out = np.empty_like(z)
    far = z < _Z_ASYMPTOTIC
    near = ~far
    zn = z[near]
    out[near] = 1.0 + zn * _SQRT_HALF_PI * special.erfcx(-zn / math.sqrt(2.0))
    zf = z[far]
    u = 1.0 / (zf * zf)
    # 1/z^2 - 3/z^4 + 15/z^6 - 105/z^8 + 945/z^10 - 10395/z^12
    out[far] = u * (1.0 + u * (-3.0 + u * (15.0 + u * (-105.0 + u * (945.0 - 10395.0 * u)))))
    return out


def _epf_parts(f_mean, s):
    """Return ``(value, log_value)`` of the expected positive flux."""
    z = f_mean / s
    value = np.empty_like(z)
    log_value = np.empty_like(z)
    fwd = z >= 0
    zf = z[fwd]
    value[fwd] = f_mean[fwd] * std_normal_cdf(zf) + s[fwd] * std_normal_pdf(zf)
    log_value[fwd] = np.log(value[fwd])
    back = ~fwd
    zb = z[back]
    g = _positive_part_gap(zb)
    log_value[back] = np.log(s[back]) - 0.5 * zb * zb - _LOG_SQRT_2PI + np.log(g)
    value[back] = np.exp(log_value[back])
    return value, log_value


def _epf_inputs(f_mean, s):
    f_mean = np.asarray(f_mean, dtype=float)
    s = np.asarray(s, dtype=float)
    scalar = f_mean.ndim == 0 and s.ndim == 0
    f_mean, s = np.broadcast_arrays(np.atleast_1d(f_mean), np.atleast_1d(s))
    if np.any(~(s > 0)):
        raise DomainError("flux scale S must be > 0")
    return f_mean.astype(float), s.astype(float), scalar


def expected_positive_flux(f_mean, s):
    """``E[max(X, 0)]`` for ``X ~ Normal(f_mean, s^2)``.

    Positive for finite input, although it underflows to 0.0 once
    ``f_mean / s`` drops below about -38; see
    :func:`log_expected_positive_flux` for that range.
    """
    f_mean, s, scalar = _epf_inputs(f_mean, s)
    value, _ = _epf_parts(f_mean, s)
    return float(value[0]) if scalar else value


def log_expected_positive_flux(f_mean, s):
    """Natural log of the expected positive flux; finite for all finite input."""
    f_mean, s, scalar = _epf_inputs(f_mean, s)
    _, log_value = _epf_parts(f_mean, s)
    return float(log_value[0]) if scalar else log_value


def cig_density(params, profile, t, mode=PrefactorMode.INSTANTANEOUS, flux_distance="boundary"):
    """Corrected-IG density at ``t > 0``."""
    t, scalar = check_positive_times(t)
    f_mean = mean_flux(params, profile, t, mode, flux_distance)
    s = np.sqrt(params.sigma2 * t)
    f_smooth, log_f_smooth = _epf_parts(f_mean, s)
    exponent = cig_exponent(params, profile, t)
    out = _kernel(f_smooth, exponent, params.sigma2, t)
    # deep backflow: the prefactor alone may underflow, so combine in log space
    tiny = f_smooth < 1e-280
    if np.any(tiny):
        out[tiny] = np.exp(
            log_f_smooth[tiny] + exponent[tiny] - 1.5 * np.log(t[tiny])
            - 0.5 * np.log(2.0 * math.pi * params.sigma2)
        )
    return float(out[0]) if scalar else out


def _cumulative_mass(grid, pdf):
    cdf = np.empty_like(pdf)
    cdf[0] = pdf[0] * grid[0]
    steps = 0.5 * (pdf[1:] + pdf[:-1]) * np.diff(grid)
    cdf[1:] = cdf[0] + np.cumsum(np.maximum(steps, 0.0))
    return np.maximum.accumulate(cdf)


def density_curve(params, profile, mode=PrefactorMode.INSTANTANEOUS, t_max=5.0, n_points=10_000,
                  model="cig", flux_distance="boundary"):
    """Sample a density on the uniform grid ``t_max * (1..n_points) / n_points``.

    ``model="ig"`` gives the constant-drift baseline at ``profile.v0``. The CDF
    uses a rectangle on ``(0, t_1]`` and trapezoids after that.
    """
    t_max = float(t_max)
    if not (math.isfinite(t_max) and t_max > 0):
        raise ConfigError("t_max must be > 0")
    if int(n_points) != n_points or n_points < 2:
        raise ConfigError("n_points must be an integer >= 2")
    n_points = int(n_points)
    grid = t_max * np.arange(1, n_points + 1) / n_points
    mode = _as_mode(mode)
    if model == "cig":
        pdf = cig_density(params, profile, grid, mode, flux_distance)
    elif model == "ig":
        pdf = ig_density(params, profile.v0, grid)
    else:
        raise ConfigError(f"unknown model {model!r}")
    meta = {"model": model, "params": params, "profile": profile.label, "mode": mode.value}
    return DensityCurve(grid=grid, pdf=pdf, cdf=_cumulative_mass(grid, pdf), meta=meta)


def write_curves_csv(path, cig, ig):
    """Write ``t,f_cig,f_ig,cdf_cig,cdf_ig`` with 17 significant digits."""
    if cig.grid.shape != ig.grid.shape or np.any(cig.grid != ig.grid):
        raise ConfigError("curves must share one grid")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "f_cig", "f_ig", "cdf_cig", "cdf_ig"])
        for row in zip(cig.grid, cig.pdf, ig.pdf, cig.cdf, ig.cdf):
            writer.writerow([f"{v:.17g}" for v in row])


def read_curves_csv(path):
    """Inverse of :func:`write_curves_csv`; returns ``(cig, ig)`` curves."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    grid = data[:, 0]
    return (
        DensityCurve(grid, data[:, 1], data[:, 3], {"model": "cig"}),
        DensityCurve(grid.copy(), data[:, 2], data[:, 4], {"model": "ig"}),
    )

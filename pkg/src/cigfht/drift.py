"""Deterministic time-varying drift fields.

A :class:`DriftProfile` is an immutable description of ``mu(t)``. Every
quantity the density model needs from it (the drift itself, the cumulative
displacement ``M(t) = int_0^t mu``, the running average ``M(t)/t`` and the
energy integral ``int_0^t mu^2``) has a closed form per profile kind, so all
evaluations are O(1) per time point and vectorize over numpy arrays.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .validation import check_times

__all__ = [
    "DriftKind",
    "DriftProfile",
    "mu",
    "mu_derivative",
    "cumulative_displacement",
    "running_average_drift",
    "intrinsic_energy_integral",
]


class DriftKind(str, enum.Enum):
    CONSTANT = "constant"
    SINUSOIDAL = "sinusoidal"
    STEP = "step"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class DriftProfile:
    """Drift velocity as a function of time.

    Parameters
    ----------
    kind : DriftKind or str
        One of ``constant``, ``sinusoidal``, ``step``, ``tabulated``.
    v0 : float
        Baseline drift. Required for every kind; for tabulated profiles it is
        only used as the reference in the flux prefactor.
    amplitude : float
        ``A`` for sinusoidal (``v0 + A sin(omega t)``) and step
        (``v0 + A`` before the switch, ``v0 - A`` from the switch on).
    omega : float
        Angular frequency of the sinusoid, rad per time unit.
    t_switch : float
        Switching time of the step profile.
    table : tuple of (t, v) pairs
        Breakpoints of a piecewise-linear profile, clamped outside the range.
    """

    kind: DriftKind
    v0: float
    amplitude: float = 0.0
    omega: float = 0.0
    t_switch: float = 0.0
    table: tuple = field(default=())

    def __post_init__(self):
        kind = DriftKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "v0", float(self.v0))
        object.__setattr__(self, "amplitude", float(self.amplitude))
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "t_switch", float(self.t_switch))
        object.__setattr__(self, "table", tuple((float(t), float(v)) for t, v in self.table))
        for name in ("v0", "amplitude", "omega", "t_switch"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if kind is DriftKind.SINUSOIDAL and not self.omega > 0:
            raise ValueError("sinusoidal profile needs omega > 0")
        if kind is DriftKind.STEP and not self.t_switch > 0:
            raise ValueError("step profile needs t_switch > 0")
        if kind is DriftKind.TABULATED:
            if len(self.table) < 2:
                raise ValueError("tabulated profile needs at least 2 breakpoints")
            times = np.array([t for t, _ in self.table])
            values = np.array([v for _, v in self.table])
            if not (np.all(np.isfinite(times)) and np.all(np.isfinite(values))):
                raise ValueError("table entries must be finite")
            if times[0] < 0 or np.any(np.diff(times) <= 0):
                raise ValueError("table times must be nonnegative and strictly increasing")

    # convenience constructors
    @classmethod
    def constant(cls, v0):
        return cls(DriftKind.CONSTANT, v0)

    @classmethod
    def sinusoidal(cls, v0, amplitude, omega=2.0 * math.pi):
        return cls(DriftKind.SINUSOIDAL, v0, amplitude=amplitude, omega=omega)

    @classmethod
    def step(cls, v0, amplitude, t_switch):
        return cls(DriftKind.STEP, v0, amplitude=amplitude, t_switch=t_switch)

    @classmethod
    def tabulated(cls, v0, table):
        return cls(DriftKind.TABULATED, v0, table=tuple(table))

    @property
    def label(self):
        """Short identifier used in exported metadata."""
        if self.kind is DriftKind.CONSTANT:
            return f"constant(v0={self.v0:g})"
        if self.kind is DriftKind.SINUSOIDAL:
            return f"sinusoidal(v0={self.v0:g},A={self.amplitude:g},omega={self.omega:g})"
        if self.kind is DriftKind.STEP:
            return f"step(v0={self.v0:g},A={self.amplitude:g},t_switch={self.t_switch:g})"
        return f"tabulated(v0={self.v0:g},n={len(self.table)})"

    def _table_arrays(self):
        times = np.array([t for t, _ in self.table])
        values = np.array([v for _, v in self.table])
        return times, values


def _scalar_or_array(result, scalar):
    return float(result[0]) if scalar else result


def mu(profile, t):
    """Instantaneous drift ``mu(t)``."""
    t, scalar = check_times(t)
    k = profile.kind
    if k is DriftKind.CONSTANT:
        out = np.full_like(t, profile.v0)
    elif k is DriftKind.SINUSOIDAL:
        out = profile.v0 + profile.amplitude * np.sin(profile.omega * t)
    elif k is DriftKind.STEP:
        out = np.where(t < profile.t_switch, profile.v0 + profile.amplitude, profile.v0 - profile.amplitude)
    else:
        times, values = profile._table_arrays()
        out = np.interp(t, times, values)
    return _scalar_or_array(out, scalar)


def mu_derivative(profile, t):
    """Classical derivative ``mu'(t)`` away from jumps and kinks.

    The step profile's jump is not represented here (the derivative is zero
    on both sides); callers that need it treat it as a point mass of weight
    ``-2A`` at the switching time. Tabulated profiles return the slope of the
    segment containing ``t`` (right-continuous at breakpoints).
    """
    t, scalar = check_times(t)
    k = profile.kind
    if k is DriftKind.SINUSOIDAL:
        out = profile.amplitude * profile.omega * np.cos(profile.omega * t)
    elif k is DriftKind.TABULATED:
        times, values = profile._table_arrays()
        slopes = np.diff(values) / np.diff(times)
        idx = np.searchsorted(times, t, side="right") - 1
        inside = (idx >= 0) & (idx < len(slopes))
        out = np.where(inside, slopes[np.clip(idx, 0, len(slopes) - 1)], 0.0)
    else:
        out = np.zeros_like(t)
    return _scalar_or_array(out, scalar)


def _tabulated_integrals(profile, t):
    """Exact ``int_0^t mu`` and ``int_0^t mu^2`` for a piecewise-linear table."""
    times, values = profile._table_arrays()
    # segments: clamped head [0, t_0], linear pieces, clamped tail [t_n, inf)
    knots = np.concatenate(([0.0], times)) if times[0] > 0 else times
    vals = np.concatenate(([values[0]], values)) if times[0] > 0 else values
    widths = np.diff(knots)
    va, vb = vals[:-1], vals[1:]
    seg_m = 0.5 * (va + vb) * widths
    seg_e = (va * va + va * vb + vb * vb) / 3.0 * widths
    cum_m = np.concatenate(([0.0], np.cumsum(seg_m)))
    cum_e = np.concatenate(([0.0], np.cumsum(seg_e)))

    idx = np.clip(np.searchsorted(knots, t, side="right") - 1, 0, len(knots) - 1)
    start = knots[idx]
    v_start = vals[idx]
    tail = idx == len(knots) - 1
    slope = np.zeros_like(t)
    slope[~tail] = (vb[idx[~tail]] - va[idx[~tail]]) / widths[idx[~tail]]
    h = t - start
    v_end = v_start + slope * h
    m = cum_m[idx] + 0.5 * (v_start + v_end) * h
    e = cum_e[idx] + (v_start * v_start + v_start * v_end + v_end * v_end) / 3.0 * h
    return m, e


def cumulative_displacement(profile, t):
    """Cumulative mean displacement ``M(t) = int_0^t mu(s) ds``; ``M(0) == 0``."""
    t, scalar = check_times(t)
    k = profile.kind
    v0, a = profile.v0, profile.amplitude
    if k is DriftKind.CONSTANT:
        out = v0 * t
    elif k is DriftKind.SINUSOIDAL:
        w = profile.omega
        # 1 - cos(x) = 2 sin^2(x/2) avoids cancellation near t = 0
        out = v0 * t + (a / w) * 2.0 * np.sin(0.5 * w * t) ** 2
    elif k is DriftKind.STEP:
        ts = profile.t_switch
        out = (v0 + a) * np.minimum(t, ts) + (v0 - a) * np.maximum(t - ts, 0.0)
    else:
        out, _ = _tabulated_integrals(profile, t)
    return _scalar_or_array(out, scalar)


def running_average_drift(profile, t):
    """``M(t)/t`` for ``t > 0`` and its limit ``mu(0)`` at ``t = 0``."""
    t, scalar = check_times(t)
    m = cumulative_displacement(profile, t)
    pos = t > 0
    out = np.empty_like(t)
    out[pos] = m[pos] / t[pos]
    out[~pos] = mu(profile, np.zeros(np.count_nonzero(~pos)))
    return _scalar_or_array(out, scalar)


def intrinsic_energy_integral(profile, t):
    """``int_0^t mu(s)^2 ds`` without the ``1/(2 sigma^2)`` factor."""
    t, scalar = check_times(t)
    k = profile.kind
    v0, a = profile.v0, profile.amplitude
    if k is DriftKind.CONSTANT:
        out = v0 * v0 * t
    elif k is DriftKind.SINUSOIDAL:
        w = profile.omega
        wt = w * t
        out = (
            (v0 * v0 + 0.5 * a * a) * t
            + (2.0 * v0 * a / w) * 2.0 * np.sin(0.5 * wt) ** 2
            - (a * a / (4.0 * w)) * np.sin(2.0 * wt)
        )
    elif k is DriftKind.STEP:
        ts = profile.t_switch
        out = (v0 + a) ** 2 * np.minimum(t, ts) + (v0 - a) ** 2 * np.maximum(t - ts, 0.0)
    else:
        _, out = _tabulated_integrals(profile, t)
    return _scalar_or_array(out, scalar)

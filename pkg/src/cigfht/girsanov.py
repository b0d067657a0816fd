"""Change-of-measure diagnostics on discretized first-passage paths.

For a path pinned at ``X(0) = x0`` and ``X(T) = ell`` the log-likelihood ratio
of drifted versus drift-free diffusion is

    (1/sigma2) int mu dX - (1/(2 sigma2)) int mu^2 dt

and integrating ``int mu dX`` by parts splits it into a boundary potential,
a path-dependent coupling ``-(1/sigma2) int mu'(t) X_t dt`` and the energy
term. These helpers evaluate both forms so their agreement can be checked;
they are verification tools and are not used by the density itself.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .drift import (
    DriftKind,
    cumulative_displacement,
    intrinsic_energy_integral,
    mu,
    mu_derivative,
)
from .validation import DomainError, check_positive_times

__all__ = [
    "DiscretePath",
    "LogLikelihoodBreakdown",
    "ResampleError",
    "boundary_potential",
    "direct_log_rn",
    "decomposed_log_rn",
    "mpp_coupling",
    "pinned_paths",
    "identity_convergence",
    "write_breakdown_csv",
]


class ResampleError(ValueError):
    """The path grid cannot represent the drift's switching time."""


@dataclass(frozen=True)
class DiscretePath:
    times: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        positions = np.asarray(self.positions, dtype=float)
        if times.ndim != 1 or times.shape != positions.shape or times.size < 2:
            raise ValueError("times and positions must be 1-D arrays of equal length >= 2")
        if times[0] != 0.0:
            raise ValueError("paths start at t = 0")
        steps = np.diff(times)
        if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("path grid must be uniform and increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "positions", positions)

    @classmethod
    def uniform(cls, positions, dt):
        positions = np.asarray(positions, dtype=float)
        return cls(np.arange(positions.size) * dt, positions)

    @property
    def dt(self):
        return float(self.times[1] - self.times[0])

    @property
    def horizon(self):
        return float(self.times[-1])


@dataclass(frozen=True)
class LogLikelihoodBreakdown:
    boundary_potential: float
    stochastic_coupling: float
    intrinsic_energy: float
    direct_log_rn: float

    @property
    def total(self):
        return self.boundary_potential + self.stochastic_coupling + self.intrinsic_energy

    @property
    def abs_diff(self):
        return abs(self.total - self.direct_log_rn)


def boundary_potential(profile, x0, ell, horizon, sigma2):
    """``(mu(T) ell - mu(0) x0) / sigma2``."""
    return (mu(profile, horizon) * ell - mu(profile, 0.0) * x0) / sigma2


def direct_log_rn(path, profile, sigma2):
    """Ito sum of the log Radon-Nikodym derivative (drift at left endpoints)."""
    t = path.times
    x = path.positions
    stochastic = float(np.sum(mu(profile, t[:-1]) * np.diff(x)))
    energy = intrinsic_energy_integral(profile, path.horizon)
    return stochastic / sigma2 - energy / (2.0 * sigma2)


def _coupling_integral(path, profile):
    """``int_0^T mu'(t) X_t dt`` with the step jump as a point mass."""
    t = path.times
    x = path.positions
    kind = profile.kind
    if kind is DriftKind.CONSTANT:
        return 0.0
    if kind is DriftKind.SINUSOIDAL:
        return float(np.trapezoid(mu_derivative(profile, t) * x, t))
    if kind is DriftKind.STEP:
        ts = profile.t_switch
        if ts > path.horizon:
            return 0.0
        j = ts / path.dt
        k = int(round(j))
        if abs(j - k) > 1e-9 * max(1.0, j):
            raise ResampleError(f"switching time {ts} is not on the path grid (dt={path.dt})")
        return -2.0 * profile.amplitude * float(x[k])
    # tabulated: X is linear between grid points and mu' is piecewise constant,
    # so integrate exactly on the merged breakpoints
    table_t = np.array([tt for tt, _ in profile.table])
    inner = table_t[(table_t > 0) & (table_t < path.horizon)]
    knots = np.union1d(t, inner)
    xk = np.interp(knots, t, x)
    mid = 0.5 * (knots[1:] + knots[:-1])
    return float(np.sum(mu_derivative(profile, mid) * 0.5 * (xk[1:] + xk[:-1]) * np.diff(knots)))


def decomposed_log_rn(path, profile, sigma2):
    """Boundary potential, coupling and energy terms next to the direct form.

    Each field holds the term with the sign it carries in the sum.
    """
    x0 = float(path.positions[0])
    x_end = float(path.positions[-1])
    horizon = path.horizon
    bp = boundary_potential(profile, x0, x_end, horizon, sigma2)
    coupling = -_coupling_integral(path, profile) / sigma2
    energy = -intrinsic_energy_integral(profile, horizon) / (2.0 * sigma2)
    return LogLikelihoodBreakdown(
        boundary_potential=float(bp),
        stochastic_coupling=float(coupling),
        intrinsic_energy=float(energy),
        direct_log_rn=direct_log_rn(path, profile, sigma2),
    )


def mpp_coupling(params, profile, t):
    """Coupling term along the straight line from ``x0`` to ``ell`` over ``[0, t]``.

    ``(1/sigma2) [lambda M(t)/t - (mu(t) ell - mu(0) x0)]``; adding the
    boundary potential leaves ``lambda M(t) / (sigma2 t)``.
    """
    t, scalar = check_positive_times(t)
    lam = params.gap
    m = cumulative_displacement(profile, t)
    out = (lam * m / t - (mu(profile, t) * params.ell - mu(profile, 0.0) * params.x0)) / params.sigma2
    return float(out[0]) if scalar else out


def pinned_paths(params, profile, n_paths, dt, seed=0, t_cap=20.0, batch=256):
    """Euler-Maruyama paths stopped at their first boundary crossing.

    The crossing point is snapped to ``ell`` so each path is pinned at both
    ends; trajectories that do not cross before ``t_cap`` are discarded.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be >= 1")
    rng = np.random.default_rng(seed)
    n_steps = int(math.ceil(t_cap / dt - 1e-9))
    drift_dt = mu(profile, np.arange(n_steps) * dt) * dt
    sd = math.sqrt(params.sigma2 * dt)
    paths = []
    while len(paths) < n_paths:
        incr = drift_dt + sd * rng.standard_normal((batch, n_steps))
        x = params.x0 + np.cumsum(incr, axis=1)
        crossed = x >= params.ell
        has_hit = crossed.any(axis=1)
        first = crossed.argmax(axis=1)
        for i in np.flatnonzero(has_hit):
            j = first[i] + 1
            pos = np.empty(j + 1)
            pos[0] = params.x0
            pos[1:] = x[i, :j]
            pos[-1] = params.ell
            paths.append(DiscretePath.uniform(pos, dt))
            if len(paths) == n_paths:
                break
    return paths


def identity_convergence(params, profile, dts=(4e-3, 2e-3, 1e-3), n_paths=100, seed=0):
    """Mean ``|decomposed - direct|`` per time step and the fitted order in ``dt``.

    Returns ``(dts, mean_abs_diff, order)``; ``order`` is the least-squares
    slope of ``log(error)`` against ``log(dt)`` (``nan`` if any error is 0).
    """
    errors = []
    for dt in dts:
        paths = pinned_paths(params, profile, n_paths, dt, seed=seed)
        diffs = [decomposed_log_rn(p, profile, params.sigma2).abs_diff for p in paths]
        errors.append(float(np.mean(diffs)))
    errors = np.array(errors)
    if np.all(errors > 0):
        order = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    else:
        order = float("nan")
    return np.asarray(dts, dtype=float), errors, order


def write_breakdown_csv(path, breakdowns):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["path_id", "bp", "coupling", "energy", "sum", "direct", "abs_diff"])
        for i, b in enumerate(breakdowns):
            row = [b.boundary_potential, b.stochastic_coupling, b.intrinsic_energy, b.total,
                   b.direct_log_rn, b.abs_diff]
            writer.writerow([i] + [f"{v:.17g}" for v in row])

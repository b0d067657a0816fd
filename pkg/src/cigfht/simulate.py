"""Euler-Maruyama first-passage Monte Carlo with an absorbing boundary.

Each trajectory ``i`` draws its Gaussian increments from its own
counter-based stream ``(seed, i)``. Trajectories are cut into fixed blocks
that a thread pool processes in any order, so the output is bit-identical for
every worker count. Only hit times are kept, never full paths.
"""
from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._rng import STATE_SIZE, ZIG_RATIO, ZIG_X, normal_slow_path, next_u64, reset_state
from .density import ChannelParams
from .drift import DriftProfile, mu
from .validation import ConfigError

__all__ = [
    "SimConfig",
    "ArrivalSet",
    "HistogramDensity",
    "SimulationError",
    "simulate",
    "histogram",
    "empirical_cdf",
    "write_arrivals",
    "read_arrivals",
    "write_histogram_csv",
]

BLOCK_SIZE = 4096
_MASK7 = np.uint64(127)
_SHIFT11 = np.uint64(11)
_TWO_M53 = 1.0 / 9007199254740992.0


class SimulationError(RuntimeError):
    """A trajectory reached a non-finite state."""


@dataclass(frozen=True)
class SimConfig:
    params: ChannelParams
    profile: DriftProfile
    n_trajectories: int = 100_000
    dt: float = 1e-3
    t_max: float = 20.0
    seed: int = 42

    def __post_init__(self):
        if int(self.n_trajectories) != self.n_trajectories or self.n_trajectories < 1:
            raise ConfigError("n_trajectories must be a positive integer")
        if not (0 < self.dt < self.t_max and math.isfinite(self.t_max)):
            raise ConfigError("need 0 < dt < t_max")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "n_trajectories", int(self.n_trajectories))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n_steps(self):
        # tolerance absorbs t_max/dt landing a hair below an integer
        return int(math.ceil(self.t_max / self.dt - 1e-9))


@dataclass
class ArrivalSet:
    """Hit times of absorbed trajectories, in trajectory-index order."""

    hit_times: np.ndarray
    trajectory_ids: np.ndarray
    n_trajectories: int
    t_max: float
    config: SimConfig | None = None
    _sorted: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def n_arrived(self):
        return int(self.hit_times.size)

    @property
    def n_censored(self):
        return self.n_trajectories - self.n_arrived

    @property
    def arrival_fraction(self):
        return self.n_arrived / self.n_trajectories

    @property
    def sorted_times(self):
        if self._sorted is None:
            self._sorted = np.sort(self.hit_times)
        return self._sorted


@dataclass
class HistogramDensity:
    edges: np.ndarray
    density: np.ndarray
    arrival_fraction: float

    @property
    def widths(self):
        return np.diff(self.edges)

    @property
    def centers(self):
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def t_max(self):
        return float(self.edges[-1])


@njit(cache=True, nogil=True)
def _run_block(start, stop, seed, x0, ell, sd, dt, drift_dt, t_max, out):
    """Simulate trajectories ``start..stop-1``; returns the first bad index or -1."""
    n_steps = drift_dt.shape[0]
    state = np.zeros(STATE_SIZE, dtype=np.uint64)
    for i in range(start, stop):
        reset_state(state)
        stream = np.uint64(i)
        x = x0
        hit = np.nan
        for k in range(n_steps):
            # ziggurat fast path of _rng.next_normal, kept inline for speed
            bits = next_u64(seed, stream, state)
            layer = np.int64(bits & _MASK7)
            u = 2.0 * (np.int64(bits >> _SHIFT11) * _TWO_M53) - 1.0
            if abs(u) < ZIG_RATIO[layer]:
                z = u * ZIG_X[layer]
            else:
                z = normal_slow_path(seed, stream, state, layer, u)
            x_new = x + drift_dt[k] + sd * z
            if x_new >= ell:
                t_hit = k * dt + dt * (ell - x) / (x_new - x)
                if t_hit <= t_max:
                    hit = t_hit
                break
            if not np.isfinite(x_new):
                return i
            x = x_new
        out[i - start] = hit
    return -1


def _simulate_raw(config, threads=1):
    """Per-trajectory hit times with NaN for censored trajectories."""
    n = config.n_trajectories
    p = config.params
    steps = np.arange(config.n_steps) * config.dt
    drift_dt = np.ascontiguousarray(mu(config.profile, steps) * config.dt, dtype=np.float64)
    sd = math.sqrt(p.sigma2 * config.dt)
    seed = np.uint64(config.seed)
    out = np.empty(n)

    def work(start):
        stop = min(start + BLOCK_SIZE, n)
        bad = _run_block(start, stop, seed, p.x0, p.ell, sd, config.dt, drift_dt, config.t_max,
                         out[start:stop])
        if bad >= 0:
            raise SimulationError(f"non-finite state in trajectory {bad}")

    starts = range(0, n, BLOCK_SIZE)
    threads = max(1, int(threads))
    if threads == 1:
        for s in starts:
            work(s)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, starts))
    return out


def default_threads():
    return int(os.environ.get("CIGFHT_THREADS", os.cpu_count() or 1))


def simulate(config, threads=None):
    """Run the Monte Carlo described by ``config``.

    ``threads`` only affects speed; results are identical for any value.
    """
    raw = _simulate_raw(config, default_threads() if threads is None else threads)
    arrived = ~np.isnan(raw)
    ids = np.flatnonzero(arrived)
    return ArrivalSet(
        hit_times=raw[arrived],
        trajectory_ids=ids,
        n_trajectories=config.n_trajectories,
        t_max=float(config.t_max),
        config=config,
    )


def histogram(arrivals, n_bins=200):
    """Uniform-bin FHT density normalised by the total trajectory count."""
    if int(n_bins) != n_bins or n_bins < 1:
        raise ConfigError("n_bins must be a positive integer")
    edges = np.linspace(0.0, arrivals.t_max, int(n_bins) + 1)
    counts, _ = np.histogram(arrivals.hit_times, bins=edges)
    density = counts / (arrivals.n_trajectories * np.diff(edges))
    return HistogramDensity(edges=edges, density=density, arrival_fraction=arrivals.arrival_fraction)


def empirical_cdf(arrivals, t):
    """Fraction of all trajectories absorbed by time ``t`` (a sub-probability)."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > arrivals.t_max):
        raise ConfigError("t must lie in [0, t_max]")
    out = np.searchsorted(arrivals.sorted_times, t_arr, side="right") / arrivals.n_trajectories
    return float(out) if out.ndim == 0 else out


def write_arrivals(path, arrivals):
    """Raw arrivals: ``.npz`` for binary, otherwise CSV ``trajectory_id,hit_time``.

    Censored trajectories appear in the CSV with ``hit_time`` set to ``censored``.
    """
    path = os.fspath(path)
    full = np.full(arrivals.n_trajectories, np.nan)
    full[arrivals.trajectory_ids] = arrivals.hit_times
    if path.endswith(".npz"):
        np.savez(path, hit_time=full, t_max=arrivals.t_max)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["trajectory_id", "hit_time"])
        for i, t in enumerate(full):
            writer.writerow([i, "censored" if math.isnan(t) else f"{t:.17g}"])


def read_arrivals(path, t_max=None):
    path = os.fspath(path)
    if path.endswith(".npz"):
        with np.load(path) as data:
            full = data["hit_time"]
            t_max = float(data["t_max"]) if t_max is None else t_max
    else:
        if t_max is None:
            raise ConfigError("t_max is required when reading CSV arrivals")
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))[1:]
        full = np.array([np.nan if h == "censored" else float(h) for _, h in rows])
    ids = np.flatnonzero(~np.isnan(full))
    return ArrivalSet(full[ids], ids, int(full.size), float(t_max))


def write_histogram_csv(path, hist):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "density"])
        for a, b, d in zip(hist.edges[:-1], hist.edges[1:], hist.density):
            writer.writerow([f"{a:.17g}", f"{b:.17g}", f"{d:.17g}"])

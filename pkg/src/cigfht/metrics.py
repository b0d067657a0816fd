"""Agreement metrics between analytic densities and Monte Carlo arrivals."""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np
from scipy import signal
from scipy.ndimage import uniform_filter1d

from .density import DensityCurve, density_curve
from .simulate import ArrivalSet, HistogramDensity, histogram, simulate
from .validation import ConfigError

__all__ = [
    "FitReport",
    "Comparison",
    "UndefinedStatisticError",
    "bin_average",
    "l1_binned",
    "l1_distance",
    "ks_statistic",
    "find_peaks",
    "dominant_peak",
    "match_peaks",
    "fit_report",
    "compare",
    "write_comparison_csv",
]

PEAK_PROMINENCE = 0.05
PEAK_GATE = 0.25
HIST_SMOOTHING = 5


class UndefinedStatisticError(ValueError):
    pass


@dataclass
class FitReport:
    model: str
    l1: float
    ks: float
    peak_times_model: list
    peak_times_mc: list
    matched_peaks: list  # (model_time, mc_time) pairs
    unmatched_model: list
    unmatched_mc: list
    dominant_peak_model: float
    dominant_peak_mc: float
    mass_model: float
    mass_mc: float
    runtime_ms: float = 0.0

    @property
    def peak_time_errors(self):
        return [abs(a - b) for a, b in self.matched_peaks]

    @property
    def dominant_peak_error(self):
        return abs(self.dominant_peak_model - self.dominant_peak_mc)

    def as_dict(self, include_runtime=True):
        def fmt_list(values):
            return ";".join(f"{v:.6g}" for v in values)

        out = {
            "model": self.model,
            "l1": f"{self.l1:.17g}",
            "ks": f"{self.ks:.17g}",
            "mass_model": f"{self.mass_model:.17g}",
            "mass_mc": f"{self.mass_mc:.17g}",
            "dominant_peak_model": f"{self.dominant_peak_model:.17g}",
            "dominant_peak_mc": f"{self.dominant_peak_mc:.17g}",
            "peak_times_model": fmt_list(self.peak_times_model),
            "peak_times_mc": fmt_list(self.peak_times_mc),
            "peak_time_errors": fmt_list(self.peak_time_errors),
            "unmatched_model": fmt_list(self.unmatched_model),
            "unmatched_mc": fmt_list(self.unmatched_mc),
        }
        if include_runtime:
            out["runtime_ms"] = f"{self.runtime_ms:.3f}"
        return out

    def to_text(self):
        """Flat ``key = value`` lines."""
        return "".join(f"{k} = {v}\n" for k, v in self.as_dict().items())

    @staticmethod
    def csv_header():
        # runtime is left out so CSV outputs stay byte-reproducible
        return [
            "model", "l1", "ks", "mass_model", "mass_mc", "dominant_peak_model", "dominant_peak_mc",
            "peak_times_model", "peak_times_mc", "peak_time_errors", "unmatched_model", "unmatched_mc",
        ]

    def csv_row(self):
        d = self.as_dict(include_runtime=False)
        return [d[k] for k in self.csv_header()]


def bin_average(curve, edges):
    """Mean of the curve over each bin, from differences of its CDF."""
    return np.diff(curve.cdf_at(edges)) / np.diff(edges)


def l1_binned(a, b, widths):
    return float(np.sum(np.abs(np.asarray(a) - np.asarray(b)) * widths))


def _check_horizon(curve, t_max):
    if not np.isclose(curve.t_max, t_max, rtol=1e-9, atol=0.0):
        raise ConfigError(f"curve horizon {curve.t_max} does not match {t_max}")


def l1_distance(curve, hist):
    """``sum |mean_bin(curve) - hist| * width`` over the histogram bins."""
    _check_horizon(curve, hist.t_max)
    return l1_binned(bin_average(curve, hist.edges), hist.density, hist.widths)


def ks_statistic(model, arrivals):
    """Two-sided sup distance between the model CDF and the empirical sub-CDF.

    ``model`` is a :class:`DensityCurve` or a callable CDF (for instance a
    closed form). The empirical CDF counts arrivals over *all* trajectories,
    so censored mass shows up as a gap at the horizon, which is included in
    the sup.
    """
    if arrivals.n_arrived == 0:
        raise UndefinedStatisticError("KS statistic needs at least one arrival")
    if isinstance(model, DensityCurve):
        _check_horizon(model, arrivals.t_max)
        cdf, mass = model.cdf_at, model.mass
    else:
        cdf, mass = model, float(model(arrivals.t_max))
    x = arrivals.sorted_times
    n = arrivals.n_trajectories
    fx = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, x.size + 1)
    d_plus = np.max(i / n - fx)
    d_minus = np.max(fx - (i - 1) / n)
    d_end = mass - x.size / n
    return float(max(d_plus, d_minus, d_end, 0.0))


def _series(obj, smooth_window=None):
    if isinstance(obj, DensityCurve):
        return obj.grid, obj.pdf, smooth_window
    if isinstance(obj, HistogramDensity):
        return obj.centers, obj.density, HIST_SMOOTHING if smooth_window is None else smooth_window
    times, values = obj
    return np.asarray(times, dtype=float), np.asarray(values, dtype=float), smooth_window


def find_peaks(obj, min_prominence=PEAK_PROMINENCE, smooth_window=None):
    """Times of local maxima whose prominence exceeds a fraction of the global max.

    Accepts a :class:`DensityCurve` (no smoothing), a
    :class:`HistogramDensity` (5-bin moving average) or a ``(times, values)``
    pair.
    """
    if not 0 < min_prominence < 1:
        raise ValueError("min_prominence must lie in (0, 1)")
    times, values, window = _series(obj, smooth_window)
    if window and window > 1:
        values = uniform_filter1d(values, int(window), mode="nearest")
    top = values.max() if values.size else 0.0
    if not top > 0:
        return []
    idx, _ = signal.find_peaks(values, prominence=min_prominence * top)
    return [float(times[i]) for i in idx]


def dominant_peak(obj, smooth_window=None):
    times, values, window = _series(obj, smooth_window)
    if window and window > 1:
        values = uniform_filter1d(values, int(window), mode="nearest")
    return float(times[int(np.argmax(values))])


def match_peaks(model_peaks, mc_peaks, gate=PEAK_GATE):
    """Greedy nearest-neighbour pairing within ``gate``.

    Returns ``(pairs, unmatched_model, unmatched_mc)`` with pairs sorted by
    model time.
    """
    candidates = sorted(
        (abs(a - b), i, j)
        for i, a in enumerate(model_peaks)
        for j, b in enumerate(mc_peaks)
        if abs(a - b) <= gate
    )
    used_i, used_j, pairs = set(), set(), []
    for _, i, j in candidates:
        if i in used_i or j in used_j:
            continue
        used_i.add(i)
        used_j.add(j)
        pairs.append((model_peaks[i], mc_peaks[j]))
    pairs.sort()
    unmatched_model = [p for i, p in enumerate(model_peaks) if i not in used_i]
    unmatched_mc = [p for j, p in enumerate(mc_peaks) if j not in used_j]
    return pairs, unmatched_model, unmatched_mc


def fit_report(model, curve, arrivals, hist, min_prominence=PEAK_PROMINENCE, gate=PEAK_GATE,
               runtime_ms=0.0):
    peaks_model = find_peaks(curve, min_prominence)
    peaks_mc = find_peaks(hist, min_prominence)
    pairs, um_model, um_mc = match_peaks(peaks_model, peaks_mc, gate)
    return FitReport(
        model=model,
        l1=l1_distance(curve, hist),
        ks=ks_statistic(curve, arrivals),
        peak_times_model=peaks_model,
        peak_times_mc=peaks_mc,
        matched_peaks=pairs,
        unmatched_model=um_model,
        unmatched_mc=um_mc,
        dominant_peak_model=dominant_peak(curve),
        dominant_peak_mc=dominant_peak(hist),
        mass_model=curve.mass,
        mass_mc=arrivals.arrival_fraction,
        runtime_ms=runtime_ms,
    )


@dataclass
class Comparison:
    """Both model reports plus the data they were computed from."""

    cig: FitReport
    ig: FitReport
    cig_curve: DensityCurve
    ig_curve: DensityCurve
    hist: HistogramDensity
    arrivals: ArrivalSet
    meta: dict = field(default_factory=dict)

    def combined_rows(self):
        """Rows ``(t, f_cig, f_ig, f_mc)`` at the histogram bin centres."""
        t = self.hist.centers
        return np.column_stack([t, self.cig_curve.pdf_at(t), self.ig_curve.pdf_at(t), self.hist.density])


def write_comparison_csv(path, comparison):
    """Combined ``t,f_cig,f_ig,f_mc`` table at the histogram bin centres."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "f_cig", "f_ig", "f_mc"])
        for row in comparison.combined_rows():
            writer.writerow([f"{v:.17g}" for v in row])


def compare(scenario, arrivals=None, threads=None, min_prominence=PEAK_PROMINENCE, gate=PEAK_GATE):
    """Simulate (unless ``arrivals`` is given) and score the C-IG and IG models."""
    sim = scenario.sim
    if arrivals is None:
        arrivals = simulate(sim, threads=threads)
    hist = histogram(arrivals, scenario.bins)
    curves = {}
    timings = {}
    for model in ("cig", "ig"):
        start = time.perf_counter()
        curves[model] = density_curve(
            scenario.params, scenario.profile, scenario.mode, sim.t_max, scenario.grid,
            model=model, flux_distance=scenario.flux_distance,
        )
        timings[model] = 1e3 * (time.perf_counter() - start)
    reports = {
        m: fit_report(m, curves[m], arrivals, hist, min_prominence, gate, timings[m]) for m in curves
    }
    return Comparison(reports["cig"], reports["ig"], curves["cig"], curves["ig"], hist, arrivals,
                      {"scenario": scenario.name})

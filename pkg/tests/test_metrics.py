import numpy as np
import pytest

from cigfht.density import DensityCurve, density_curve, ig_cdf, ig_mode
from cigfht.drift import DriftProfile
from cigfht.metrics import (
    FitReport,
    UndefinedStatisticError,
    bin_average,
    compare,
    dominant_peak,
    find_peaks,
    ks_statistic,
    l1_binned,
    l1_distance,
    match_peaks,
)
from cigfht.scenario import load_scenario, with_override
from cigfht.simulate import ArrivalSet, HistogramDensity
from cigfht.validation import ConfigError


@pytest.fixture
def ig_curve(channel):
    return density_curve(channel, DriftProfile.constant(1.0), t_max=200.0, n_points=200_000, model="ig")


@pytest.fixture
def fig3_curve(channel, sinusoid):
    return density_curve(channel, sinusoid, "instantaneous", 5.0, 10_000)


def test_l1_zero_against_own_bin_averages(fig3_curve):
    edges = np.linspace(0, 5.0, 201)
    hist = HistogramDensity(edges, bin_average(fig3_curve, edges), fig3_curve.mass)
    assert l1_distance(fig3_curve, hist) == pytest.approx(0.0, abs=1e-15)


def test_l1_against_empty_histogram_is_mass(fig3_curve):
    edges = np.linspace(0, 5.0, 51)
    hist = HistogramDensity(edges, np.zeros(50), 0.0)
    assert l1_distance(fig3_curve, hist) == pytest.approx(fig3_curve.mass, rel=1e-12)


def test_l1_horizon_mismatch(fig3_curve):
    edges = np.linspace(0, 4.0, 11)
    with pytest.raises(ConfigError):
        l1_distance(fig3_curve, HistogramDensity(edges, np.zeros(10), 0.0))


def test_l1_metric_axioms(rng):
    w = rng.uniform(0.01, 0.1, 40)
    a, b, c = rng.uniform(0, 2, (3, 40))
    assert l1_binned(a, b, w) == l1_binned(b, a, w)
    assert l1_binned(a, a, w) == 0.0
    assert l1_binned(a, c, w) <= l1_binned(a, b, w) + l1_binned(b, c, w) + 1e-15


def test_ks_requires_arrivals(fig3_curve):
    empty = ArrivalSet(np.array([]), np.array([], dtype=int), 10, 5.0)
    with pytest.raises(UndefinedStatisticError):
        ks_statistic(fig3_curve, empty)


def test_ks_single_arrival_at_median(ig_curve):
    median = ig_curve.grid[np.searchsorted(ig_curve.cdf, 0.5)]
    one = ArrivalSet(np.array([median]), np.array([0]), 1, 200.0)
    assert ks_statistic(ig_curve, one) == pytest.approx(0.5, abs=1e-4)


def test_ks_on_inverse_transform_sample(ig_curve):
    u = np.random.default_rng(99).uniform(size=100_000)
    # invert the model CDF on its own grid (linear interpolation)
    t = np.interp(u, np.concatenate([[0.0], ig_curve.cdf]), np.concatenate([[0.0], ig_curve.grid]))
    keep = u <= ig_curve.mass
    arr = ArrivalSet(t[keep], np.flatnonzero(keep), u.size, 200.0)
    assert ks_statistic(ig_curve, arr) < 0.006


def test_ks_invariant_under_monotone_time_map(fig3_curve, rng):
    idx = np.sort(rng.choice(fig3_curve.grid.size, 3000, replace=True))
    times = fig3_curve.grid[idx]
    arr = ArrivalSet(times, np.arange(times.size), 4000, 5.0)
    squared_curve = DensityCurve(fig3_curve.grid**2, fig3_curve.pdf, fig3_curve.cdf, {})
    squared_arr = ArrivalSet(times**2, arr.trajectory_ids, 4000, 25.0)
    assert ks_statistic(squared_curve, squared_arr) == pytest.approx(ks_statistic(fig3_curve, arr), abs=1e-12)


def test_ks_includes_censoring_gap(ig_curve):
    # arrivals far too few: the gap to the model mass at the horizon dominates
    arr = ArrivalSet(np.array([1.0]), np.array([0]), 1000, 200.0)
    assert ks_statistic(ig_curve, arr) == pytest.approx(ig_curve.mass - 0.001, abs=1e-9)


def test_peaks_monotone_and_ig(channel):
    t = np.linspace(0.1, 5, 500)
    assert find_peaks((t, np.exp(-t))) == []
    assert find_peaks((t, t**2)) == []
    c = density_curve(channel, DriftProfile.constant(1.0), t_max=10.0, n_points=100_000, model="ig")
    peaks = find_peaks(c)
    assert len(peaks) == 1
    assert peaks[0] == pytest.approx(ig_mode(channel, 1.0), abs=2e-4)
    assert dominant_peak(c) == peaks[0]


def test_peaks_fig3_curve_multi_pulse(fig3_curve):
    assert len([p for p in find_peaks(fig3_curve) if 0 < p <= 5]) >= 2


def test_peaks_prominence_validation(fig3_curve):
    with pytest.raises(ValueError):
        find_peaks(fig3_curve, 0.0)
    assert find_peaks((np.arange(3.0), np.zeros(3))) == []


def test_histogram_peaks_are_smoothed():
    edges = np.linspace(0, 5, 201)
    centers = 0.5 * (edges[1:] + edges[:-1])
    noisy = np.exp(-((centers - 2.0) ** 2)) + 0.03 * (-1) ** np.arange(200)
    h = HistogramDensity(edges, noisy, 1.0)
    assert len(find_peaks((centers, noisy))) > 1
    assert find_peaks(h) == [pytest.approx(2.0, abs=0.03)]


def test_match_peaks_greedy():
    pairs, um_a, um_b = match_peaks([1.0, 2.0, 3.9], [1.05, 2.2, 2.3, 5.0])
    assert pairs == [(1.0, 1.05), (2.0, 2.2)]
    assert um_a == [3.9] and um_b == [2.3, 5.0]


def test_report_serialisation(fig3_curve):
    r = FitReport("cig", 0.1, 0.05, [1.0], [1.1], [(1.0, 1.1)], [], [], 1.0, 1.1, 0.7, 0.66, 3.2)
    assert r.peak_time_errors == [pytest.approx(0.1)]
    assert r.dominant_peak_error == pytest.approx(0.1)
    text = r.to_text()
    assert "runtime_ms = 3.200" in text and text.startswith("model = cig\n")
    assert len(r.csv_row()) == len(FitReport.csv_header())
    assert "runtime_ms" not in FitReport.csv_header()


def test_compare_constant_scenario_models_agree():
    sc = load_scenario("baseline.scn")
    sc = with_override(with_override(sc, "sim.t_max", 5.0), "sim.n_trajectories", 20_000)
    sc = with_override(sc, "output.grid", 10_000)
    cmp_ = compare(sc, threads=1)
    assert abs(cmp_.cig.l1 - cmp_.ig.l1) < 0.02
    assert cmp_.cig.dominant_peak_model == pytest.approx(cmp_.ig.dominant_peak_model, abs=0.05)
    rows = cmp_.combined_rows()
    assert rows.shape == (sc.bins, 4)
    np.testing.assert_array_equal(rows[:, 3], cmp_.hist.density)


def test_compare_reuses_given_arrivals(channel):
    sc = with_override(load_scenario("fig4.scn"), "sim.n_trajectories", 5000)
    first = compare(sc, threads=1)
    again = compare(sc, arrivals=first.arrivals)
    assert again.cig.l1 == first.cig.l1 and again.arrivals is first.arrivals


def test_ks_with_closed_form_cdf(channel, ig_curve):
    times = np.array([2.0, 4.0, 6.5, 11.0])
    arr = ArrivalSet(times, np.arange(4), 5, 200.0)
    exact = ks_statistic(lambda t: ig_cdf(channel, 1.0, t), arr)
    assert exact == pytest.approx(ks_statistic(ig_curve, arr), abs=1e-5)

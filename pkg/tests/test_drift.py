import math

import numpy as np
import pytest
from scipy import integrate

from cigfht.drift import (
    DriftKind,
    DriftProfile,
    cumulative_displacement,
    intrinsic_energy_integral,
    mu,
    mu_derivative,
    running_average_drift,
)
from cigfht.validation import DomainError


def test_mu_examples(sinusoid, step):
    assert mu(sinusoid, 0.0) == 1.0
    assert mu(DriftProfile.constant(1.0), 3.7) == 1.0
    assert mu(step, 1.5) == -1.0
    assert mu(step, 1.4999) == 3.0


def test_mu_scalar_and_array(sinusoid):
    assert isinstance(mu(sinusoid, 0.25), float)
    out = mu(sinusoid, np.array([0.0, 0.25, 0.75]))
    np.testing.assert_allclose(out, [1.0, 3.0, -1.0], atol=1e-14)


def test_negative_time_rejected(sinusoid):
    for fn in (mu, cumulative_displacement, running_average_drift, intrinsic_energy_integral):
        with pytest.raises(DomainError):
            fn(sinusoid, -0.1)


def test_nonfinite_time_rejected(sinusoid):
    with pytest.raises(DomainError):
        mu(sinusoid, float("nan"))


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(kind="sinusoidal", v0=1.0, amplitude=1.0, omega=0.0),
        dict(kind="step", v0=1.0, amplitude=1.0, t_switch=0.0),
        dict(kind="tabulated", v0=1.0, table=((0.0, 1.0),)),
        dict(kind="tabulated", v0=1.0, table=((1.0, 1.0), (1.0, 2.0))),
        dict(kind="tabulated", v0=1.0, table=((-1.0, 1.0), (1.0, 2.0))),
        dict(kind="constant", v0=float("inf")),
        dict(kind="wobbly", v0=1.0),
    ],
)
def test_invalid_profiles(kwargs):
    with pytest.raises(ValueError):
        DriftProfile(**kwargs)


def test_kind_coerced_from_string():
    p = DriftProfile("step", 1, amplitude=2, t_switch=1.5)
    assert p.kind is DriftKind.STEP and isinstance(p.v0, float)


def test_displacement_examples(sinusoid, step):
    assert cumulative_displacement(sinusoid, 1.0) == pytest.approx(1.0, abs=1e-14)
    assert cumulative_displacement(step, 2.0) == pytest.approx(4.0, abs=1e-14)
    assert cumulative_displacement(sinusoid, 0.25) == pytest.approx(0.25 + 1.0 / math.pi, abs=1e-14)


def test_running_average_examples(sinusoid, step):
    assert running_average_drift(DriftProfile.constant(1.0), 7.3) == 1.0
    assert running_average_drift(step, 2.0) == pytest.approx(2.0)
    assert running_average_drift(sinusoid, 0.0) == 1.0


def test_running_average_small_time_limit(sinusoid, step, ramp):
    for p in (sinusoid, step, ramp):
        a = running_average_drift(p, 1e-8)
        b = running_average_drift(p, 1e-10)
        assert abs(a - mu(p, 0.0)) < 1e-6
        assert abs(b - mu(p, 0.0)) < 1e-8


def test_energy_examples(sinusoid, step):
    assert intrinsic_energy_integral(DriftProfile.constant(1.0), 2.0) == pytest.approx(2.0)
    assert intrinsic_energy_integral(step, 2.0) == pytest.approx(14.0)
    assert intrinsic_energy_integral(sinusoid, 1.0) == pytest.approx(3.0, abs=1e-12)


def _quad(f, t, breaks=()):
    pts = [b for b in breaks if 0 < b < t] or None
    val, _ = integrate.quad(f, 0.0, t, points=pts, epsabs=1e-12, epsrel=1e-12, limit=400)
    return val


@pytest.mark.parametrize("t", [0.1, 0.25, 0.9, 1.5, 2.0, 3.3, 7.0])
def test_integrals_against_quadrature(sinusoid, step, ramp, t):
    for p, breaks in ((sinusoid, ()), (step, (1.5,)), (ramp, (1.0, 2.5, 4.0))):
        m = _quad(lambda s: mu(p, s), t, breaks)
        e = _quad(lambda s: mu(p, s) ** 2, t, breaks)
        assert cumulative_displacement(p, t) == pytest.approx(m, abs=1e-10)
        assert intrinsic_energy_integral(p, t) == pytest.approx(e, abs=1e-10)


def test_tabulated_head_segment_is_clamped():
    p = DriftProfile.tabulated(0.0, [(1.0, 2.0), (2.0, 4.0)])
    assert mu(p, 0.5) == 2.0
    assert mu(p, 9.0) == 4.0
    assert cumulative_displacement(p, 2.0) == pytest.approx(2.0 + 3.0)
    assert intrinsic_energy_integral(p, 0.5) == pytest.approx(2.0)


@pytest.mark.parametrize("t", [0.3, 1.2, 2.7])
def test_derivative_matches_finite_difference(sinusoid, ramp, t):
    h = 1e-6
    for p in (sinusoid, ramp):
        fd = (mu(p, t + h) - mu(p, t - h)) / (2 * h)
        assert mu_derivative(p, t) == pytest.approx(fd, rel=1e-6, abs=1e-6)


def test_step_derivative_is_zero_away_from_switch(step):
    np.testing.assert_array_equal(mu_derivative(step, np.array([0.5, 2.0])), 0.0)


def test_energy_gap_cauchy_schwarz(sinusoid, step, ramp):
    t = np.linspace(0.01, 10.0, 400)
    for p in (sinusoid, step, ramp):
        gap = intrinsic_energy_integral(p, t) - cumulative_displacement(p, t) ** 2 / t
        assert np.all(gap >= -1e-12)


def test_labels_distinguish_kinds(sinusoid, step, ramp):
    labels = {p.label for p in (sinusoid, step, ramp, DriftProfile.constant(1.0))}
    assert len(labels) == 4

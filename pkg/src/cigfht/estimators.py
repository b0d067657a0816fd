"""scikit-learn style wrappers around the closed-form densities.

Nothing is learned from data: ``fit`` validates the hyper-parameters and
freezes them, so the objects plug into ``get_params``/``set_params`` tooling
(grid sweeps, cloning) while staying deterministic.

>>> est = IGDensity(ell=5.0, sigma2=2.0, v0=1.0).fit()
>>> round(est.predict([5.0])[0], 5)
0.12616
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .density import (
    ChannelParams,
    FluxDistance,
    PrefactorMode,
    cig_density,
    density_curve,
    ig_cdf,
    ig_density,
)
from .drift import DriftProfile

__all__ = ["CIGDensity", "IGDensity"]


def _times(X):
    t = np.asarray(X, dtype=float)
    if t.ndim == 2 and t.shape[1] == 1:
        t = t[:, 0]
    if t.ndim != 1:
        raise ValueError("expected a 1-D array of times or an (n, 1) column")
    return t


class _DensityBase(BaseEstimator):
    def score_samples(self, X):
        """Log density at each time."""
        with np.errstate(divide="ignore"):
            return np.log(self.predict(X))

    def score(self, X, y=None):
        """Total log-likelihood of the arrival times ``X``."""
        return float(np.sum(self.score_samples(X)))


class CIGDensity(_DensityBase):
    """Corrected-IG first-hitting-time density for a drift profile.

    Parameters
    ----------
    x0, ell, sigma2 : float
        Release point, absorbing boundary, diffusion coefficient.
    profile : DriftProfile or None
        Drift field; ``None`` means constant drift ``v0 = 1``.
    mode : {"instantaneous", "running_average"}
    flux_distance : {"boundary", "gap"}
    """

    def __init__(self, x0=0.0, ell=5.0, sigma2=2.0, profile=None, mode="instantaneous",
                 flux_distance="boundary"):
        self.x0 = x0
        self.ell = ell
        self.sigma2 = sigma2
        self.profile = profile
        self.mode = mode
        self.flux_distance = flux_distance

    def fit(self, X=None, y=None):
        self.params_ = ChannelParams(float(self.x0), float(self.ell), float(self.sigma2))
        profile = DriftProfile.constant(1.0) if self.profile is None else self.profile
        if not isinstance(profile, DriftProfile):
            raise TypeError("profile must be a DriftProfile")
        self.profile_ = profile
        self.mode_ = PrefactorMode(self.mode)
        self.flux_distance_ = FluxDistance(self.flux_distance)
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        return cig_density(self.params_, self.profile_, _times(X), self.mode_, self.flux_distance_)

    def curve(self, t_max=5.0, n_points=10_000):
        check_is_fitted(self, "params_")
        return density_curve(self.params_, self.profile_, self.mode_, t_max, n_points,
                             flux_distance=self.flux_distance_)


class IGDensity(_DensityBase):
    """Inverse-Gaussian baseline with constant drift ``v0``."""

    def __init__(self, x0=0.0, ell=5.0, sigma2=2.0, v0=1.0):
        self.x0 = x0
        self.ell = ell
        self.sigma2 = sigma2
        self.v0 = v0

    def fit(self, X=None, y=None):
        self.params_ = ChannelParams(float(self.x0), float(self.ell), float(self.sigma2))
        self.profile_ = DriftProfile.constant(float(self.v0))
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        return ig_density(self.params_, self.profile_.v0, _times(X))

    def cdf(self, X):
        check_is_fitted(self, "params_")
        return ig_cdf(self.params_, self.profile_.v0, _times(X))

    def curve(self, t_max=5.0, n_points=10_000):
        check_is_fitted(self, "params_")
        return density_curve(self.params_, self.profile_, t_max=t_max, n_points=n_points, model="ig")

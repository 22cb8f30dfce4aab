"""scikit-learn style front-ends.

:class:`HarmonicMeasureDistribution` wraps the whole pipeline: ``fit`` builds
the circular preimage, harmonic measures and the sampled curve, and
``predict`` returns ``h(r)`` at arbitrary radii. :class:`PowerLawRegressor`
fits ``h = C (r - r*)**beta`` to samples.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, column_or_1d

from . import bie
from .asymfit import fit_power_law, sample_near_threshold
from .geometry import Basepoint, cantor_level
from .hfun import SAMPLES_PER_SLIT, arc_radius, build_curve, build_pipeline, h_intercept

__all__ = ["HarmonicMeasureDistribution", "PowerLawRegressor", "check_radii"]


def check_radii(r) -> np.ndarray:
    """Validate radii as a finite, nonnegative 1-d float array."""
    arr = check_array(np.atleast_1d(np.asarray(r, dtype=float)), ensure_2d=False,
                      dtype=np.float64, input_name="r")
    arr = column_or_1d(arr)
    if np.any(arr < 0):
        raise ValueError("radii must be nonnegative")
    return arr


class HarmonicMeasureDistribution(BaseEstimator):
    """h-function of a Cantor-level slit domain.

    Parameters
    ----------
    level : int
        Cantor level; the domain has ``2**level`` slits.
    basepoint : {"left", "center"}
        ``-3/2`` or ``0``.
    n : int
        Nodes per circle.
    eps : float
        Preimage stopping criterion.
    max_iter : int
        Maximum preimage iterations.
    tol : float
        GMRES relative tolerance.
    samples_per_slit : int
        Arc samples in the stored curve.

    Attributes
    ----------
    pipeline_ : Pipeline
    curve_ : HCurve
    step_heights_ : ndarray
    """

    def __init__(self, level=1, basepoint="left", n=bie.DEFAULT_N, eps=1e-14, max_iter=100,
                 tol=bie.DEFAULT_TOL, samples_per_slit=SAMPLES_PER_SLIT):
        self.level = level
        self.basepoint = basepoint
        self.n = n
        self.eps = eps
        self.max_iter = max_iter
        self.tol = tol
        self.samples_per_slit = samples_per_slit

    def _validate_params(self):
        for name in ("eps", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if int(self.max_iter) < 1 or int(self.samples_per_slit) < 1:
            raise ValueError("max_iter and samples_per_slit must be at least 1")

    def fit(self, X=None, y=None, preimage=None):
        """Build the pipeline. ``X`` and ``y`` are ignored."""
        self._validate_params()
        slits = cantor_level(self.level)
        self.pipeline_ = build_pipeline(slits, self.basepoint, n=self.n, eps=self.eps,
                                        max_iter=self.max_iter, tol=self.tol, preimage=preimage)
        self.curve_ = build_curve(self.pipeline_, samples_per_slit=self.samples_per_slit)
        self.step_heights_ = np.array([s[2] for s in self.curve_.steps])
        self.basepoint_ = Basepoint.parse(self.basepoint)
        return self

    def _arc_bounds(self):
        c = self.curve_
        lows = [c.zero_threshold] + [s[1] for s in c.steps]
        highs = [s[0] for s in c.steps] + [c.one_threshold]
        return list(zip(range(1, len(lows) + 1), lows, highs))

    def predict(self, X):
        """h at the radii ``X``."""
        check_is_fitted(self, "pipeline_")
        r = check_radii(X)
        out = np.empty_like(r)
        c = self.curve_
        levels = np.concatenate([[0.0], self.step_heights_, [1.0]])
        arcs = self._arc_bounds()
        for i, ri in enumerate(r):
            if ri <= c.zero_threshold:
                out[i] = 0.0
                continue
            if ri >= c.one_threshold:
                out[i] = 1.0
                continue
            for k, lo, hi in arcs:
                if ri <= lo:
                    out[i] = levels[k - 1]
                    break
                if ri < hi:
                    out[i] = self._h_on_arc(k, ri)
                    break
            else:
                out[i] = 1.0
        return out

    def _h_on_arc(self, k, r):
        g = lambda th: float(arc_radius(self.pipeline_, k, th)) - r
        theta = brentq(g, 0.0, np.pi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        return h_intercept(self.pipeline_, k, theta)[1]

    def asymptotic_fit(self, eps=1e-6, count=20):
        """Near-threshold power-law fit of this h-function."""
        check_is_fitted(self, "pipeline_")
        samples = sample_near_threshold(self.pipeline_, eps=eps, count=count)
        return fit_power_law(samples, self.basepoint_.threshold_lo)


class PowerLawRegressor(RegressorMixin, BaseEstimator):
    """Least-squares ``h = C (r - r_star)**beta`` in log-log coordinates.

    Attributes
    ----------
    C_ : float
    beta_ : float
    E_ : float
        Squared error in the original variables.
    """

    def __init__(self, r_star=1.0):
        self.r_star = r_star

    def fit(self, X, y):
        r = check_radii(X)
        h = column_or_1d(check_array(np.asarray(y, dtype=float).reshape(-1, 1), input_name="y"))
        if r.shape != h.shape:
            raise ValueError("X and y have different lengths")
        res = fit_power_law(np.column_stack([r, h]), self.r_star)
        self.C_, self.beta_, self.E_ = res.C, res.beta, res.E
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        check_is_fitted(self, "C_")
        r = check_radii(X)
        return self.C_ * np.clip(r - self.r_star, 0.0, None) ** self.beta_

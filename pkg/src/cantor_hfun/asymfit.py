"""Power-law behaviour of h just beyond the threshold radius.

Near the first threshold ``r*`` the h-function behaves like
``C (r - r*)**beta``. The constants are estimated by a straight-line fit in
log-log coordinates; the growth of ``C`` with the Cantor level is in turn
fitted by ``A exp(b l)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from . import reference
from .exceptions import HFunctionError, SamplingError
from .hfun import Pipeline, arc_radius, h_intercept

__all__ = [
    "FitResult",
    "GrowthFit",
    "REFERENCE_C_LEFT",
    "REFERENCE_C_CENTER",
    "sample_offsets",
    "sample_near_threshold",
    "fit_power_law",
    "fit_exp_growth",
    "exact_C0",
]

DEFAULT_EPS = 1e-6
DEFAULT_COUNT = 20
# samples span this many decades below eps
DECADES = 3.0

REFERENCE_C_LEFT = reference.C_LEFT
REFERENCE_C_CENTER = tuple(reference.C_CENTER[k] for k in sorted(reference.C_CENTER))


class DomainError(HFunctionError, ValueError):
    """Inputs outside the domain of the logarithmic fit."""


@dataclass
class FitResult:
    C: float
    beta: float
    E: float
    r_star: float
    samples: np.ndarray = field(repr=False)  # (count, 2): r_j, h_j

    def predict(self, r):
        return self.C * (np.asarray(r, dtype=float) - self.r_star) ** self.beta

    def to_dict(self) -> dict:
        return {"C": self.C, "beta": self.beta, "E": self.E, "r_star": self.r_star,
                "samples": self.samples.tolist()}


@dataclass
class GrowthFit:
    A: float
    b: float
    error: float

    def predict(self, level):
        return self.A * np.exp(self.b * np.asarray(level, dtype=float))

    def to_dict(self) -> dict:
        return {"A": self.A, "b": self.b, "error": self.error}


def sample_offsets(eps: float = DEFAULT_EPS, count: int = DEFAULT_COUNT,
                   decades: float = DECADES) -> np.ndarray:
    """Geometric offsets ``r - r*`` strictly inside ``(eps 10**-decades, eps)``."""
    if eps <= 0 or count < 1:
        raise ValueError("eps must be positive and count at least 1")
    expo = -decades * (np.arange(count)[::-1] + 0.5) / count
    return eps * 10.0 ** expo


def sample_near_threshold(pipe: Pipeline, eps: float = DEFAULT_EPS, count: int = DEFAULT_COUNT,
                          decades: float = DECADES) -> np.ndarray:
    """``(r_j, h_j)`` for ``count`` radii just past the threshold, sorted by ``r``.

    Each sample solves ``|F(xi) - z0| = r* + delta`` for the angle of ``xi`` on
    the first intersected circle by bracketed root finding.
    """
    r_star = pipe.basepoint.threshold_lo
    k = 1  # C_1 on the left, the inner right circle at the center
    out = []
    lo = np.pi / 2
    # largest offset first; each root bounds the next bracket from below
    for delta in sample_offsets(eps, count, decades)[::-1]:
        target = r_star + delta
        g = lambda th: float(arc_radius(pipe, k, th)) - target
        if g(lo) <= 0 or g(np.pi) >= 0:
            raise SamplingError(f"cannot bracket r - r* = {delta:.1e}; the map is not accurate "
                                "enough near the threshold (try a larger n)")
        theta = brentq(g, lo, np.pi, xtol=1e-15, rtol=4 * np.finfo(float).eps)
        lo = theta
        r, h = h_intercept(pipe, k, theta)
        if not 0 < r - r_star < eps:
            raise SamplingError(f"sample radius {r!r} left the interval ({r_star}, {r_star + eps})")
        out.append((r, h))
    samples = np.array(out[::-1])
    if np.any(samples[:, 1] <= 0) or np.any(np.diff(samples[:, 1]) <= 0):
        raise SamplingError("near-threshold h samples are not positive and increasing")
    return samples


def fit_power_law(samples, r_star: float) -> FitResult:
    """Least-squares line through ``(log(r - r*), log h)``.

    ``E`` is the sum of squared residuals of ``C (r - r*)**beta`` in the
    original variables.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] < 3:
        raise DomainError("need at least 3 (r, h) samples")
    r, h = s[:, 0], s[:, 1]
    if np.any(h <= 0):
        raise DomainError("h samples must be positive")
    if np.any(r <= r_star):
        raise DomainError("sample radii must exceed the threshold")
    beta, logc = np.polyfit(np.log(r - r_star), np.log(h), 1)
    C = float(np.exp(logc))
    E = float(np.sum((h - C * (r - r_star) ** beta) ** 2))
    return FitResult(C=C, beta=float(beta), E=E, r_star=float(r_star), samples=s.copy())


def fit_exp_growth(levels: Sequence[float], C_values: Sequence[float]) -> GrowthFit:
    """Fit ``C_l ~ A exp(b l)`` by a line through ``(l, log C_l)``."""
    lv = np.asarray(levels, dtype=float)
    cv = np.asarray(C_values, dtype=float)
    if lv.shape != cv.shape or lv.size < 3:
        raise DomainError("need at least 3 (level, C) pairs")
    if np.any(cv <= 0):
        raise DomainError("C values must be positive")
    b, loga = np.polyfit(lv, np.log(cv), 1)
    A = float(np.exp(loga))
    err = float(np.sum((cv - A * np.exp(b * lv)) ** 2))
    return GrowthFit(A=A, b=float(b), error=err)


def exact_C0() -> Tuple[float, float]:
    """Constants of the single-slit h-function: ``(2 sqrt 2 / pi, 1/2)``."""
    return 2 * math.sqrt(2) / math.pi, 0.5

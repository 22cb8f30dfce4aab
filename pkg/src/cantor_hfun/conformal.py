"""Conformal map from a circular domain onto a horizontal slit domain, and the
iteration that finds the circular preimage of a prescribed slit domain.

The map is ``F(zeta) = zeta - i f(zeta)`` where ``f`` is analytic outside the
disks, vanishes at infinity and has boundary values ``gamma + nu + i mu`` with
``gamma = Im eta``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import bie
from .exceptions import AccuracyWarning, ConvergenceError, GeometryError
from .geometry import CircularDomain, SlitDomain, initial_circles

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-14
DEFAULT_MAX_ITER = 100
# points closer than this (relative to the radius) count as on the circle
ON_CIRCLE_RTOL = 1e-10

__all__ = [
    "ConformalMap",
    "SlitImage",
    "PreimageResult",
    "map_from_circular",
    "slit_image",
    "find_preimage",
    "eval_F",
    "invert_on_axis",
]


@dataclass(frozen=True, eq=False)
class ConformalMap:
    domain: CircularDomain
    grid: bie.BoundaryGrid = field(repr=False)
    mu: np.ndarray = field(repr=False)
    nu: bie.PiecewiseConstant = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    solve: bie.NeumannSolution = field(repr=False)

    @property
    def boundary_f(self) -> np.ndarray:
        """Boundary values of ``f`` at every node."""
        return self.gamma + self.nu.on_nodes(self.grid.n) + 1j * self.mu

    @property
    def boundary_F(self) -> np.ndarray:
        return self.grid.eta - 1j * self.boundary_f

    def f_on_circle(self, k: int, s) -> np.ndarray:
        """``f(eta_k(s))`` for arbitrary parameter values ``s``."""
        s = np.asarray(s, dtype=float)
        c, r = self.domain.centers[k], self.domain.radii[k]
        gamma = (c + r * np.exp(-1j * s)).imag
        mu = bie.trig_interp(self.grid.blocks(self.mu)[k], s)
        return gamma + self.nu.values[k] + 1j * mu

    def F_on_circle(self, k: int, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        eta = self.domain.centers[k] + self.domain.radii[k] * np.exp(-1j * s)
        return eta - 1j * self.f_on_circle(k, s)

    def re_F_on_circle(self, k: int, s) -> np.ndarray:
        # Re F = Re eta + mu; cheaper than the complex path and used by the optimizers
        s = np.asarray(s, dtype=float)
        return (self.domain.centers[k].real + self.domain.radii[k] * np.cos(s)
                + bie.trig_interp(self.grid.blocks(self.mu)[k], s))

    def max_imag_residual(self) -> float:
        return float(np.abs(self.boundary_F.imag).max())


def map_from_circular(domain: CircularDomain, n: int = bie.DEFAULT_N,
                      tol: float = bie.DEFAULT_TOL, maxit: int = bie.DEFAULT_MAXIT,
                      grid: Optional[bie.BoundaryGrid] = None) -> ConformalMap:
    """Horizontal-slit map of the exterior of the disks in ``domain``."""
    grid = grid if grid is not None else bie.discretize(domain, n)
    gamma = grid.eta.imag.copy()
    sol = bie.solve_neumann(grid, -bie.apply_M(grid, gamma), tol=tol, maxit=maxit)
    nu = bie.nu_from(grid, sol.mu, gamma)
    return ConformalMap(domain=domain, grid=grid, mu=sol.mu, nu=nu, gamma=gamma, solve=sol)


@dataclass(frozen=True)
class SlitImage:
    centers: np.ndarray
    lengths: np.ndarray
    left: np.ndarray
    right: np.ndarray


def _polished_extreme(fun, s_grid, values, idx, sign):
    """Golden-section polish of an extremum of ``fun`` found on a fine grid."""
    n = s_grid.size
    h = s_grid[1] - s_grid[0]
    a, b, c = s_grid[idx] - h, s_grid[idx], s_grid[idx] + h
    target = lambda s: -sign * fun(s)
    best = values[idx]
    try:
        res = minimize_scalar(target, bracket=(a, b, c), method="golden",
                              options={"xtol": 1e-12})
    except ValueError:
        return best
    val = -sign * res.fun
    return val if sign * (val - best) >= 0 else best


def slit_image(cmap: ConformalMap, refine: int = 8) -> SlitImage:
    """Centers and lengths of the image slits, from the extremes of ``Re F``."""
    n = cmap.grid.n
    fine = 2 * np.pi * np.arange(refine * n) / (refine * n)
    lo = np.empty(cmap.domain.m)
    hi = np.empty(cmap.domain.m)
    mu_blocks = cmap.grid.blocks(cmap.mu)
    vals_all = (cmap.domain.centers.real[:, None] + cmap.domain.radii[:, None] * np.cos(fine)
                + bie.trig_interp(mu_blocks, fine))
    for k in range(cmap.domain.m):
        fun = lambda s, k=k: float(cmap.re_F_on_circle(k, s))
        vals = vals_all[k]
        hi[k] = _polished_extreme(fun, fine, vals, int(np.argmax(vals)), +1)
        lo[k] = _polished_extreme(fun, fine, vals, int(np.argmin(vals)), -1)
    return SlitImage(centers=(hi + lo) / 2, lengths=hi - lo, left=lo, right=hi)


@dataclass(frozen=True, eq=False)
class PreimageResult:
    domain: CircularDomain
    map: ConformalMap = field(repr=False)
    criterion: float
    iterations: int
    history: List[float] = field(default_factory=list, repr=False)
    slit_error: np.ndarray = field(default=None, repr=False)

    def to_dict(self, slits: SlitDomain, n: int, eps: float) -> dict:
        return {"level": slits.level, "n": n, "eps": eps, "m": self.domain.m,
                **self.domain.to_dict(), "criterion": self.criterion,
                "iterations": self.iterations, "history": list(self.history)}


def _criterion(img: SlitImage, slits: SlitDomain) -> Tuple[float, np.ndarray]:
    w = np.asarray(slits.centers)
    err = np.abs(img.centers - w) + np.abs(img.lengths - slits.length)
    return float(err.sum() / (2 * slits.m)), err


def find_preimage(slits: SlitDomain, eps: float = DEFAULT_EPS, max_iter: int = DEFAULT_MAX_ITER,
                  n: int = bie.DEFAULT_N, tol: float = bie.DEFAULT_TOL,
                  maxit: int = bie.DEFAULT_MAXIT,
                  start: Optional[CircularDomain] = None) -> PreimageResult:
    """Iteratively adjust circles until their slit image matches ``slits``.

    Centers move by the center mismatch, radii by a quarter of the length
    mismatch. Returns the last circular domain and its map once the mean
    mismatch drops below ``eps``; raises :class:`ConvergenceError` after
    ``max_iter`` iterations.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    w = np.asarray(slits.centers)
    dom = start if start is not None else initial_circles(slits)
    history: List[float] = []
    for it in range(1, max_iter + 1):
        with warnings.catch_warnings():
            # intermediate circles are crowded; only the final map's spread matters
            warnings.simplefilter("ignore", AccuracyWarning)
            cmap = map_from_circular(dom, n=n, tol=tol, maxit=maxit)
        img = slit_image(cmap)
        crit, err = _criterion(img, slits)
        history.append(crit)
        log.debug("preimage iteration %d: criterion %.3e", it, crit)
        if crit < eps:
            _report_spread(cmap)
            return PreimageResult(domain=dom, map=cmap, criterion=crit, iterations=it,
                                  history=history, slit_error=err)
        dom = CircularDomain(centers=dom.centers - (img.centers - w),
                             radii=dom.radii - (img.lengths - slits.length) / 4)
    raise ConvergenceError(
        f"preimage iteration did not reach eps={eps:g} in {max_iter} iterations "
        f"(last criterion {history[-1]:.3e})", history=history)


def _report_spread(cmap: ConformalMap) -> None:
    worst = float(cmap.nu.spread.max())
    if worst > bie.NU_SPREAD_TOL:
        warnings.warn(f"converged map has piecewise-constant spread {worst:.2e}",
                      AccuracyWarning, stacklevel=3)


def _circle_param(cmap: ConformalMap, zeta: complex):
    """Return ``(k, s)`` if ``zeta`` lies on circle ``k``, else ``None``."""
    dom = cmap.domain
    dist = np.abs(np.abs(zeta - dom.centers) - dom.radii)
    k = int(np.argmin(dist))
    if dist[k] <= ON_CIRCLE_RTOL * dom.radii[k]:
        s = float(np.mod(-np.angle(zeta - dom.centers[k]), 2 * np.pi))
        return k, s
    return None


def eval_F(cmap: ConformalMap, zeta, guard: float = bie.NEAR_BOUNDARY_FACTOR):
    """Evaluate ``F`` on the boundary (interpolated densities) or in the domain (Cauchy)."""
    scalar = np.ndim(zeta) == 0
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    interior = np.ones(z.shape, dtype=bool)
    for i, zi in enumerate(z):
        hit = _circle_param(cmap, zi)
        if hit is not None:
            k, s = hit
            node = s * cmap.grid.n / (2 * np.pi)
            if abs(node - round(node)) < 1e-12:
                j = int(round(node)) % cmap.grid.n
                out[i] = cmap.grid.blocks(cmap.boundary_F)[k, j]
            else:
                out[i] = cmap.F_on_circle(k, s)
            interior[i] = False
    if interior.any():
        f = bie.cauchy_eval(cmap.grid, cmap.boundary_f, z[interior], guard=guard)
        out[interior] = z[interior] - 1j * f
    return out[0] if scalar else out


def invert_on_axis(cmap: ConformalMap, z0: float, xtol: float = 1e-15) -> float:
    """Real preimage of a real point ``z0`` lying left of, or centred between, the slits.

    ``z0 = 0`` with a mirror-symmetric domain returns 0 directly (``F`` is odd).
    Otherwise the root is bracketed on the real axis left of the leftmost
    circle, where ``F`` is increasing, and polished by Brent's method.
    """
    dom = cmap.domain
    c = dom.centers.real
    if z0 == 0 and np.allclose(np.sort(c), -np.sort(c)[::-1], atol=1e-12):
        return 0.0
    order = np.argsort(c)
    first = order[0]
    if z0 > c[first]:
        raise GeometryError("only basepoints left of every circle (or 0 by symmetry) are supported")
    hi = c[first] - dom.radii[first] * (2 + bie.NEAR_BOUNDARY_FACTOR)
    g = lambda x: float(eval_F(cmap, complex(x)).real) - z0
    if g(hi) <= 0:
        raise GeometryError(f"could not bracket the preimage of {z0}: F({hi:g}) <= z0")
    lo = min(hi, z0) - 1.0
    for _ in range(60):
        if g(lo) < 0:
            break
        lo = hi - 2 * (hi - lo)
    else:
        raise GeometryError(f"could not bracket the preimage of {z0}")
    root = brentq(g, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    resid = abs(eval_F(cmap, complex(root)) - z0)
    if resid > 1e-12:
        raise GeometryError(f"preimage residual {resid:.2e} exceeds 1e-12")
    return float(root)

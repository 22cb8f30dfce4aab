"""Nystrom discretization of the Neumann-kernel integral equation on circles.

Every circle is parametrized clockwise, ``eta_j(t) = c_j + r_j exp(-i t)``,
which keeps the unbounded domain on the left of the boundary. With this
orientation the Neumann kernel is the constant ``-1/(2 pi)`` on each circle's
own block, and the same-circle part of the singular kernel ``M`` is exactly
``-(1/2pi) cot((s-t)/2)``, i.e. the (negated) periodic conjugation operator.

Densities are flat float arrays of length ``m*n`` ordered circle by circle.
"""

from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .exceptions import AccuracyWarning, ConvergenceError, GeometryError, NearBoundaryError
from .geometry import CircularDomain

DEFAULT_N = 16
DEFAULT_TOL = 1e-13
DEFAULT_MAXIT = 100
NU_SPREAD_TOL = 1e-8
# Cauchy quadrature is refused closer than this many radii to a circle.
NEAR_BOUNDARY_FACTOR = 1.0
THREADS_ENV = "CANTOR_HFUN_THREADS"

__all__ = [
    "CircularDomain",
    "BoundaryGrid",
    "NeumannSolution",
    "PiecewiseConstant",
    "discretize",
    "apply_N",
    "apply_M",
    "conjugate_periodic",
    "solve_neumann",
    "solve_neumann_many",
    "nu_from",
    "cauchy_eval",
    "trig_interp",
]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Equispaced Nystrom nodes on every circle of a :class:`CircularDomain`."""

    domain: CircularDomain
    n: int
    s: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    deta: np.ndarray = field(repr=False)
    ddeta: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.domain.m

    @property
    def size(self) -> int:
        return self.m * self.n

    @property
    def weight(self) -> float:
        return 2 * np.pi / self.n

    @property
    def circle_index(self) -> np.ndarray:
        return np.repeat(np.arange(self.m), self.n)

    def blocks(self, x: np.ndarray) -> np.ndarray:
        """View a flat density as ``(m, n)``."""
        return np.asarray(x).reshape(self.m, self.n)

    @cached_property
    def _kernel_blocks(self):
        """Dense ``N`` and the ``M`` part that the trapezoidal rule handles.

        ``M_smooth`` holds the off-circle blocks plus the (continuous) remainder
        of the same-circle blocks after the cotangent part is removed.
        """
        size, n = self.size, self.n
        w = self.weight
        eta, deta, ddeta = self.eta, self.deta, self.ddeta
        same = self.circle_index[:, None] == self.circle_index[None, :]
        N = np.empty((size, size))
        Ms = np.empty((size, size))
        ts = np.tile(self.s, self.m)
        chunk = max(1, 2 ** 22 // max(size, 1))
        with np.errstate(divide="ignore", invalid="ignore"):
            for lo in range(0, size, chunk):
                hi = min(size, lo + chunk)
                # rows are targets s, columns sources t
                ratio = deta[None, :] / (eta[None, :] - eta[lo:hi, None])
                N[lo:hi] = ratio.imag / np.pi
                Ms[lo:hi] = ratio.real / np.pi
                cot = 1.0 / np.tan((ts[lo:hi, None] - ts[None, :]) / 2)
                blk = same[lo:hi]
                Ms[lo:hi][blk] = (Ms[lo:hi] + cot / (2 * np.pi))[blk]
        idx = np.arange(size)
        limit = ddeta / deta
        N[idx, idx] = limit.imag / (2 * np.pi)
        Ms[idx, idx] = limit.real / (2 * np.pi)
        return N * w, Ms * w

    @property
    def N_matrix(self) -> np.ndarray:
        return self._kernel_blocks[0]

    @property
    def M_smooth_matrix(self) -> np.ndarray:
        return self._kernel_blocks[1]

    def dense_M(self) -> np.ndarray:
        """Full discrete ``M`` as a matrix (for tests and small grids)."""
        eye = np.eye(self.size)
        return np.column_stack([apply_M(self, col) for col in eye])

    def nearest_circle(self, zeta) -> np.ndarray:
        z = np.asarray(zeta, dtype=complex)
        return np.argmin(np.abs(np.abs(z[..., None] - self.domain.centers) - self.domain.radii), axis=-1)


def discretize(domain: CircularDomain, n: int = DEFAULT_N) -> BoundaryGrid:
    """Place ``n`` equispaced nodes ``s_i = 2 pi (i-1)/n`` on every circle."""
    n = int(n)
    if n < 4 or not _is_power_of_two(n):
        raise ValueError(f"n must be a power of two >= 4, got {n}")
    s = 2 * np.pi * np.arange(n) / n
    e = np.exp(-1j * s)
    c = domain.centers[:, None]
    r = domain.radii[:, None]
    eta = (c + r * e).ravel()
    deta = (-1j * r * e).ravel()
    ddeta = (-r * e).ravel().astype(complex)
    return BoundaryGrid(domain=domain, n=n, s=s, eta=eta, deta=deta, ddeta=ddeta)


def _check_density(grid: BoundaryGrid, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (grid.size,):
        raise ValueError(f"density has shape {x.shape}, grid expects ({grid.size},)")
    return x


def apply_N(grid: BoundaryGrid, x) -> np.ndarray:
    """Trapezoidal application of the Neumann kernel."""
    return grid.N_matrix @ _check_density(grid, x)


def conjugate_periodic(values: np.ndarray) -> np.ndarray:
    """Periodic conjugate function of trigonometric interpolants along the last axis.

    ``cos(k t) -> sin(k t)``, ``sin(k t) -> -cos(k t)``; the mean and the
    Nyquist mode are annihilated.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    X = np.fft.rfft(values, axis=-1)
    X[..., 0] = 0
    if n % 2 == 0:
        X[..., n // 2] = 0
    X *= -1j
    return np.fft.irfft(X, n=n, axis=-1)


def apply_M(grid: BoundaryGrid, x) -> np.ndarray:
    """Apply the singular operator ``M``.

    Same-circle blocks: ``-(1/2pi) cot((s-t)/2)`` is minus the periodic
    conjugation, applied spectrally; everything else by the trapezoidal rule.
    """
    x = _check_density(grid, x)
    singular = -conjugate_periodic(grid.blocks(x)).ravel()
    return singular + grid.M_smooth_matrix @ x


@dataclass(frozen=True)
class NeumannSolution:
    mu: np.ndarray
    iterations: int
    residual: float
    history: List[float] = field(default_factory=list, repr=False)


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def solve_neumann(grid: BoundaryGrid, rhs, tol: float = DEFAULT_TOL,
                  maxit: int = DEFAULT_MAXIT) -> NeumannSolution:
    """Solve ``(I - N) mu = rhs`` by unrestarted GMRES with a dense product.

    ``rhs`` is usually ``-M gamma``. Raises :class:`ConvergenceError` with
    the residual history if ``maxit`` iterations do not suffice.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    rhs = _check_density(grid, rhs).astype(float)
    bnorm = np.linalg.norm(rhs)
    if bnorm == 0:
        return NeumannSolution(mu=np.zeros_like(rhs), iterations=0, residual=0.0)
    Nmat = grid.N_matrix
    op = LinearOperator((grid.size, grid.size), matvec=lambda v: v - Nmat @ v, dtype=float)
    history: List[float] = []
    mu, info = gmres(op, rhs, rtol=tol, atol=0.0, restart=maxit, maxiter=1,
                     callback=history.append, callback_type="pr_norm")
    residual = float(np.linalg.norm(mu - Nmat @ mu - rhs) / bnorm)
    if info != 0:
        raise ConvergenceError(
            f"GMRES did not reach rtol={tol:g} in {maxit} iterations (residual {residual:.3e})",
            history=history)
    return NeumannSolution(mu=mu, iterations=len(history), residual=residual, history=history)


def solve_neumann_many(grid: BoundaryGrid, rhs_rows: np.ndarray, tol: float = DEFAULT_TOL,
                       maxit: int = DEFAULT_MAXIT) -> List[NeumannSolution]:
    """Independent solves for each row of ``rhs_rows``, threaded if requested."""
    grid.N_matrix  # build once before fanning out
    rows = list(np.asarray(rhs_rows))
    workers = _thread_count()
    if workers == 1 or len(rows) < 2:
        return [solve_neumann(grid, b, tol, maxit) for b in rows]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: solve_neumann(grid, b, tol, maxit), rows))


@dataclass(frozen=True)
class PiecewiseConstant:
    """One real per circle, plus the node spread that was collapsed away."""

    values: np.ndarray
    spread: np.ndarray

    def on_nodes(self, n: int) -> np.ndarray:
        return np.repeat(self.values, n)


def nu_from(grid: BoundaryGrid, mu, gamma, spread_tol: float = NU_SPREAD_TOL) -> PiecewiseConstant:
    """Form ``(M mu - (I - N) gamma)/2`` and collapse it to its per-circle mean."""
    mu = _check_density(grid, mu)
    gamma = _check_density(grid, gamma)
    raw = (apply_M(grid, mu) - (gamma - apply_N(grid, gamma))) / 2
    blocks = grid.blocks(raw)
    values = blocks.mean(axis=1)
    spread = blocks.max(axis=1) - blocks.min(axis=1)
    worst = float(spread.max())
    if worst > spread_tol:
        warnings.warn(f"piecewise-constant spread {worst:.2e} exceeds {spread_tol:.0e}; "
                      "consider a larger n", AccuracyWarning, stacklevel=2)
    return PiecewiseConstant(values=values, spread=spread)


def cauchy_matrix(grid: BoundaryGrid, zeta, guard: float = NEAR_BOUNDARY_FACTOR) -> np.ndarray:
    """Rows map boundary values to the Cauchy integral at each point of ``zeta``."""
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    dom = grid.domain
    gap = np.abs(z[:, None] - dom.centers[None, :]) - dom.radii[None, :] * (1 + guard)
    if np.any(gap < 0):
        bad = z[np.any(gap < 0, axis=1)][0]
        raise NearBoundaryError(
            f"point {bad} is within {guard:g} radii of a circle; "
            "use boundary interpolation or a larger n")
    return grid.weight * grid.deta[None, :] / (grid.eta[None, :] - z[:, None]) / (2j * np.pi)


def cauchy_eval(grid: BoundaryGrid, boundary_values, zeta, guard: float = NEAR_BOUNDARY_FACTOR):
    """Evaluate a function analytic in the exterior domain (zero at infinity).

    ``f(zeta) = (1/2 pi i) sum_j int f(eta) eta'(t) / (eta(t) - zeta) dt`` by
    the trapezoidal rule. Scalar input gives a scalar result.
    """
    vals = np.asarray(boundary_values, dtype=complex)
    if vals.shape[-1] != grid.size:
        raise ValueError("boundary_values must have one entry per node")
    scalar = np.ndim(zeta) == 0
    out = cauchy_matrix(grid, zeta, guard) @ vals.T
    return out[0] if scalar else out


def trig_interp(values, s) -> np.ndarray:
    """Evaluate the balanced trigonometric interpolant of equispaced samples.

    ``values`` has the samples along its last axis (nodes ``2 pi i / n``);
    ``s`` may be scalar or array. The Nyquist mode contributes ``cos(n s / 2)``.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[-1]
    if not _is_power_of_two(n):
        raise ValueError("number of samples must be a power of two")
    s_arr = np.asarray(s, dtype=float)
    coef = np.fft.rfft(values, axis=-1) / n
    k = np.arange(coef.shape[-1])
    weights = np.full(k.shape, 2.0)
    weights[0] = 1.0
    if n % 2 == 0:
        weights[-1] = 1.0
    coefw = weights * coef
    phase = np.exp(1j * s_arr[..., None] * k)
    if values.ndim == 1:
        out = (phase @ coefw).real
        return out[()] if out.ndim == 0 else out
    return np.tensordot(coefw, phase, axes=([-1], [-1])).real


def check_grid_consistent(grid: BoundaryGrid, tol: float = 1e-12) -> None:
    """Raise if node points are not on their circles (guards hand-built grids)."""
    dev = np.abs(np.abs(grid.blocks(grid.eta) - grid.domain.centers[:, None])
                 - grid.domain.radii[:, None])
    if np.any(dev > tol * np.maximum(1.0, grid.domain.radii.max())):
        raise GeometryError("grid nodes do not lie on their circles")

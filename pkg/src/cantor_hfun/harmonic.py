"""Harmonic measures of the circles of a circular domain.

For each circle ``j`` the density ``mu_j`` solves ``(I - N) mu_j = -M gamma_j``
with ``gamma_j = log|eta - c_j|``. The piecewise constants ``nu_{i,j}`` then
fix the log coefficients ``a_{k,j}`` and the value at infinity ``b_k`` through
one bordered ``(m+1) x (m+1)`` system, and

    sigma_k(zeta) = b_k + Re f_k(zeta) - sum_j a_{k,j} log|zeta - c_j|.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import List

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import bie
from .exceptions import AccuracyWarning, HFunctionError

__all__ = ["HarmonicData", "build_harmonic_data", "sigma_at", "log_rhs"]

# log right-hand sides resolve slightly worse than the map's Im(eta): with n=16
# the adjacent-circle spread sits near 1.2e-8 at every Cantor level
HARMONIC_SPREAD_TOL = 1e-7


class SingularSystemError(HFunctionError, np.linalg.LinAlgError):
    pass


@dataclass(frozen=True, eq=False)
class HarmonicData:
    grid: bie.BoundaryGrid = field(repr=False)
    mu: np.ndarray = field(repr=False)       # (m, m*n): row j is mu_j
    gamma: np.ndarray = field(repr=False)    # (m, m*n): row j is gamma_j
    nu: np.ndarray = field(repr=False)       # (m, m): nu[i, j] is nu_j on circle i
    a: np.ndarray = field(repr=False)        # (m, m): a[k, j]
    b: np.ndarray = field(repr=False)        # (m,)
    iterations: List[int] = field(default_factory=list, repr=False)
    nu_spread: np.ndarray = field(default=None, repr=False)

    @property
    def domain(self):
        return self.grid.domain

    @property
    def m(self) -> int:
        return self.grid.m

    def boundary_f(self) -> np.ndarray:
        """Boundary values of every ``f_k``, shape ``(m, m*n)``."""
        n = self.grid.n
        nu_nodes = np.repeat(self.nu.T, n, axis=1)  # row j: nu_j at every node
        return self.a @ (self.gamma + nu_nodes + 1j * self.mu)

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "b": self.b.tolist(), "nu": self.nu.tolist(),
                "centers": self.domain.centers.real.tolist(), "radii": self.domain.radii.tolist()}

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def log_rhs(grid: bie.BoundaryGrid) -> np.ndarray:
    """``gamma_j(t) = log|eta(t) - c_j|`` for every circle ``j`` (rows)."""
    return np.log(np.abs(grid.eta[None, :] - grid.domain.centers[:, None]))


def build_harmonic_data(grid: bie.BoundaryGrid, tol: float = bie.DEFAULT_TOL,
                        maxit: int = bie.DEFAULT_MAXIT) -> HarmonicData:
    """Solve the ``m`` Neumann equations and the bordered coefficient system."""
    m = grid.m
    gamma = log_rhs(grid)
    rhs = np.stack([-bie.apply_M(grid, g) for g in gamma])
    sols = bie.solve_neumann_many(grid, rhs, tol=tol, maxit=maxit)
    mu = np.stack([s.mu for s in sols])
    nu = np.empty((m, m))
    spread = np.empty((m, m))
    for j in range(m):
        pc = bie.nu_from(grid, mu[j], gamma[j], spread_tol=np.inf)
        nu[:, j] = pc.values
        spread[:, j] = pc.spread
    if spread.max() > HARMONIC_SPREAD_TOL:
        warnings.warn(f"harmonic-measure spread {spread.max():.2e} exceeds "
                      f"{HARMONIC_SPREAD_TOL:.0e}; consider a larger n", AccuracyWarning, stacklevel=2)
    system = np.zeros((m + 1, m + 1))
    system[:m, :m] = nu
    system[:m, m] = 1.0
    system[m, :m] = 1.0
    rhs_sys = np.zeros((m + 1, m))
    rhs_sys[:m] = np.eye(m)
    with np.errstate(all="raise"):
        try:
            lu = lu_factor(system, check_finite=True)
        except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
            raise SingularSystemError(f"coefficient system is singular: {exc}") from exc
    if np.any(np.diag(lu[0]) == 0):
        raise SingularSystemError("coefficient system is singular")
    sol = lu_solve(lu, rhs_sys)
    a = sol[:m].T.copy()
    b = sol[m].copy()
    return HarmonicData(grid=grid, mu=mu, gamma=gamma, nu=nu, a=a, b=b,
                        iterations=[s.iterations for s in sols], nu_spread=spread)


def sigma_at(data: HarmonicData, zeta, guard: float = bie.NEAR_BOUNDARY_FACTOR) -> np.ndarray:
    """All harmonic measures at ``zeta``: shape ``(m,)`` for a scalar, ``(p, m)`` otherwise."""
    scalar = np.ndim(zeta) == 0
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    f = bie.cauchy_eval(data.grid, data.boundary_f(), z, guard=guard)  # (p, m)
    logs = np.log(np.abs(z[:, None] - data.domain.centers[None, :]))   # (p, m) over j
    sig = data.b[None, :] + f.real - logs @ data.a.T
    return sig[0] if scalar else sig

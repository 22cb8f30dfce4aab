"""Independent reference solvers used to validate the pipeline.

The collocation oracle expands the solution in the harmonic basis

    a_0 + sum_j a_j log|zeta - c_j| + sum_j sum_p Re/Im (r_j / (zeta - c_j))**p

with the log coefficients constrained to sum to zero, and fits the boundary
data in the least-squares sense at equispaced points on every circle. It shares
no code with the integral-equation solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .exceptions import GeometryError, OracleAccuracyError
from .geometry import Basepoint, CircularDomain

__all__ = [
    "h_exact_single_slit",
    "CollocationSolution",
    "collocation_solve",
    "mixed_arc_solve",
    "indicator_data",
]

DEFAULT_P = 24
DEFAULT_OVERSAMPLE = 4
RESIDUAL_TOL = 1e-8
MAX_CIRCLES = 4

BoundaryData = Union[float, Callable[[np.ndarray], np.ndarray]]


def h_exact_single_slit(r):
    """h-function of the slit ``[-1/2, 1/2]`` seen from ``-3/2``; 0 below ``r = 1``, 1 above ``r = 2``."""
    r = np.asarray(r, dtype=float)
    inner = np.clip(r, 1.0, 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(inner < 2.0, (inner - 1.0) / (2.0 - inner), np.inf)
    out = (2 / np.pi) * np.arctan(np.sqrt(2.0) * np.sqrt(ratio))
    out = np.where(r >= 2.0, 1.0, np.where(r <= 1.0, 0.0, out))
    return float(out) if out.ndim == 0 else out


def _basis(domain: CircularDomain, zeta: np.ndarray, P: int) -> np.ndarray:
    m = domain.m
    z = np.asarray(zeta, dtype=complex).ravel()
    cols = [np.ones(z.size)]
    logs = np.log(np.abs(z[:, None] - domain.centers[None, :]))
    # zero-sum constraint on the log coefficients, eliminated against the last circle
    for j in range(m - 1):
        cols.append(logs[:, j] - logs[:, m - 1])
    for j in range(m):
        w = domain.radii[j] / (z - domain.centers[j])
        wp = np.ones_like(w)
        for _ in range(P):
            wp = wp * w
            cols.append(wp.real)
            cols.append(wp.imag)
    return np.column_stack(cols)


@dataclass
class CollocationSolution:
    domain: CircularDomain
    coef: np.ndarray = field(repr=False)
    P: int
    residual: float

    def __call__(self, zeta):
        z = np.asarray(zeta, dtype=complex)
        if np.any(self.domain.distance_to_boundary(z) < 0):
            raise GeometryError("evaluation point lies inside a disk")
        vals = _basis(self.domain, z, self.P) @ self.coef
        return float(vals[0]) if z.ndim == 0 else vals.reshape(z.shape)


def indicator_data(m: int, k: int) -> list:
    """Boundary data equal to 1 on circle ``k`` (0-based) and 0 elsewhere."""
    return [1.0 if j == k else 0.0 for j in range(m)]


def collocation_solve(domain: CircularDomain, data: Sequence[BoundaryData], P: int = DEFAULT_P,
                      oversample: int = DEFAULT_OVERSAMPLE,
                      tol: float = RESIDUAL_TOL) -> CollocationSolution:
    """Least-squares harmonic fit of Dirichlet data on each circle.

    ``data[j]`` is a constant or a callable of the boundary points of circle ``j``.
    Raises :class:`OracleAccuracyError` if the boundary residual exceeds ``tol``.
    """
    m = domain.m
    if m > MAX_CIRCLES:
        raise GeometryError(f"the collocation oracle handles at most {MAX_CIRCLES} circles")
    if len(data) != m:
        raise ValueError("one boundary datum per circle is required")
    npts = oversample * P
    t = 2 * np.pi * (np.arange(npts) + 0.5) / npts
    pts, rhs = [], []
    for j in range(m):
        z = domain.centers[j] + domain.radii[j] * np.exp(1j * t)
        d = data[j]
        vals = d(z) if callable(d) else np.full(npts, float(d))
        pts.append(z)
        rhs.append(np.asarray(vals, dtype=float))
    z = np.concatenate(pts)
    b = np.concatenate(rhs)
    A = _basis(domain, z, P)
    # column scaling keeps lstsq well conditioned when the log columns dominate
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    coef, *_ = np.linalg.lstsq(A / scale, b, rcond=None)
    coef = coef / scale
    resid = float(np.abs(A @ coef - b).max())
    if resid > tol:
        raise OracleAccuracyError(f"collocation residual {resid:.2e} exceeds {tol:.0e}; raise P",
                                  residual=resid)
    return CollocationSolution(domain=domain, coef=coef, P=P, residual=resid)


@dataclass
class MixedArcSolution:
    """``U_k = V + Psi (+ Phi)`` with ``V`` from collocation."""

    remainder: CollocationSolution
    fields: list = field(repr=False)

    @property
    def residual(self) -> float:
        return self.remainder.residual

    def __call__(self, zeta):
        return self.remainder(zeta) + sum(f(zeta) for f in self.fields)


def mixed_arc_solve(domain: CircularDomain, frame, k: int, basepoint="left", P: int = DEFAULT_P,
                    oversample: int = DEFAULT_OVERSAMPLE, tol: float = RESIDUAL_TOL,
                    approximate: bool = False) -> MixedArcSolution:
    """Solve the discontinuous problem ``U_k`` exactly.

    ``frame`` is the regularizing frame on the intersected circle; ``k`` is the
    1-based slit (left) or slit pair (center) index. The singular part is
    removed analytically and the continuous remainder goes to the collocation
    solver. With ``approximate=True`` the regularizing fields are frozen at
    each circle's center, which reproduces the pipeline's approximation and
    isolates its implementation from its modelling error.
    """
    # imported here: the oracle must not depend on the pipeline beyond these closed forms
    from .hfun import phi_field, psi_field

    bp = Basepoint.parse(basepoint)
    m = domain.m
    if m > 2:
        raise GeometryError("the mixed-arc oracle is limited to m <= 2")
    fields = [lambda z, f=frame: psi_field(z, f)]
    if bp is Basepoint.LEFT_EXTERIOR:
        q = k - 1
        ones = set(range(q))
        own = {q}
    else:
        mid = m // 2
        b_idx, a_idx = mid + k - 1, mid - k
        fields.append(lambda z, f=frame: phi_field(z, f))
        ones = {i for j in range(1, k) for i in (mid - j, mid + j - 1)}
        own = {a_idx, b_idx}
    data = []
    for j in range(m):
        base = 1.0 if j in ones else 0.0
        if bp is Basepoint.LEFT_EXTERIOR and j in own:
            data.append(0.0)
            continue
        # on an own circle only the other member's field contributes to V
        skip = []
        if bp is Basepoint.CENTER and j in own:
            skip = [0] if j == frame_circle(domain, frame) else [1]
        active = [f for i, f in enumerate(fields) if i not in skip]
        if approximate:
            c = domain.centers[j]
            data.append(base - sum(float(f(c)) for f in active))
        else:
            data.append(lambda z, base=base, active=active: base - sum(f(z) for f in active))
    rem = collocation_solve(domain, data, P=P, oversample=oversample, tol=tol)
    return MixedArcSolution(remainder=rem, fields=fields)


def frame_circle(domain: CircularDomain, frame) -> int:
    """Index of the circle carrying ``frame.xi``."""
    d = np.abs(np.abs(frame.xi - domain.centers) - domain.radii)
    return int(np.argmin(d))

"""Assembly of the h-function: step heights over gaps and sampled arcs where
the capture circle crosses a slit.

On a partially captured circle the Dirichlet data jumps at the two preimages
``xi`` and ``conj(xi)`` of the crossing point. The jump is absorbed by an
explicit harmonic function built from two Mobius maps,

    Psi(zeta) = (1/pi) arg phi(psi(zeta, xi, xi1)),

which is 1 on the arc through ``xi1`` and 0 on the complementary arc. On the
remaining circles ``Psi`` is replaced by its value at the circle's center, so
the remainder is a combination of the harmonic measures ``sigma_j``.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import bie
from .conformal import PreimageResult, find_preimage, invert_on_axis, map_from_circular
from .exceptions import ConsistencyError, GeometryError
from .geometry import (Basepoint, CircularDomain, GapSchedule, SlitDomain, cantor_level,
                       gap_schedule)
from .harmonic import HarmonicData, build_harmonic_data, sigma_at

log = logging.getLogger(__name__)

SAMPLES_PER_SLIT = 31
MONOTONE_TOL = 1e-6
CONTINUITY_TOL = 1e-4
# angular offset used to probe the arc ends for the continuity diagnostic
END_PROBE = 1e-8

__all__ = [
    "Pipeline",
    "build_pipeline",
    "MobiusFrame",
    "make_frame",
    "mobius_psi",
    "mobius_phi",
    "psi_field",
    "phi_field",
    "step_heights",
    "h_intercept_left",
    "h_intercept_center",
    "h_intercept",
    "arc_radius",
    "constant_approximation_error",
    "sample_angles",
    "HCurve",
    "build_curve",
]


@dataclass(frozen=True, eq=False)
class Pipeline:
    """Everything downstream computations need for one (domain, basepoint) pair."""

    slits: SlitDomain
    basepoint: Basepoint
    preimage: PreimageResult = field(repr=False)
    harmonic: HarmonicData = field(repr=False)
    zeta0: float
    sigma0: np.ndarray = field(repr=False)
    timings: Dict[str, float] = field(default_factory=dict, repr=False)

    @property
    def map(self):
        return self.preimage.map

    @property
    def domain(self) -> CircularDomain:
        return self.preimage.domain

    @property
    def m(self) -> int:
        return self.slits.m

    @property
    def z0(self) -> float:
        return self.basepoint.z0


def build_pipeline(slits: Union[SlitDomain, int], basepoint="left", n: int = bie.DEFAULT_N,
                   eps: float = 1e-14, max_iter: int = 100, tol: float = bie.DEFAULT_TOL,
                   maxit: int = bie.DEFAULT_MAXIT,
                   preimage: Optional[Union[PreimageResult, CircularDomain]] = None) -> Pipeline:
    """Preimage, harmonic measures and basepoint preimage for a slit domain.

    ``preimage`` may be a converged :class:`PreimageResult` or a cached
    :class:`CircularDomain` (the map is then rebuilt with one solve).
    """
    if not isinstance(slits, SlitDomain):
        slits = cantor_level(slits)
    bp = Basepoint.parse(basepoint)
    if bp is Basepoint.CENTER and slits.m < 2:
        raise GeometryError("the center basepoint lies on the slit when m = 1")
    timings = {}
    t0 = time.perf_counter()
    if isinstance(preimage, CircularDomain):
        cmap = map_from_circular(preimage, n=n, tol=tol, maxit=maxit)
        preimage = PreimageResult(domain=preimage, map=cmap, criterion=float("nan"), iterations=0)
    elif preimage is None:
        preimage = find_preimage(slits, eps=eps, max_iter=max_iter, n=n, tol=tol, maxit=maxit)
    timings["preimage"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    hdata = build_harmonic_data(preimage.map.grid, tol=tol, maxit=maxit)
    timings["harmonic"] = time.perf_counter() - t0
    zeta0 = invert_on_axis(preimage.map, bp.z0)
    sigma0 = sigma_at(hdata, zeta0)
    return Pipeline(slits=slits, basepoint=bp, preimage=preimage, harmonic=hdata,
                    zeta0=zeta0, sigma0=sigma0, timings=timings)


# -- Mobius regularization ----------------------------------------------------

@dataclass(frozen=True)
class MobiusFrame:
    """Crossing point ``xi`` on circle ``circle`` (0-based) and the real anchor ``xi1``.

    ``conj(xi) -> xi1 -> xi`` must run clockwise around the circle so that the
    exterior of the disk is sent into the unit disk.
    """

    circle: int
    center: complex
    radius: float
    xi: complex
    xi1: float

    def __post_init__(self):
        if abs(abs(self.xi - self.center) - self.radius) > 1e-12 * max(1.0, self.radius):
            raise GeometryError("xi is not on the frame circle")
        ends = (self.center.real - self.radius, self.center.real + self.radius)
        if min(abs(self.xi1 - e) for e in ends) > 1e-12 * max(1.0, self.radius):
            raise GeometryError("xi1 must be a real point of the frame circle")
        upper = (self.xi - self.center).imag
        if (self.xi1 < self.center.real and upper <= 0) or (self.xi1 > self.center.real and upper >= 0):
            raise GeometryError("frame orientation must be clockwise (xi above a left anchor)")

    @property
    def mirrored(self) -> "MobiusFrame":
        return MobiusFrame(circle=-1, center=-self.center, radius=self.radius,
                           xi=-self.xi, xi1=-self.xi1)


def make_frame(domain: CircularDomain, circle: int, theta: float, toward: float) -> MobiusFrame:
    """Frame on ``circle`` with ``xi = c + r exp(i theta)`` and ``xi1`` the real
    point of the circle nearest ``toward``. The sign of ``theta`` is adjusted so
    the orientation is valid (upper ``xi`` for a left anchor)."""
    c = complex(domain.centers[circle])
    r = float(domain.radii[circle])
    left, right = c.real - r, c.real + r
    xi1 = left if abs(left - toward) <= abs(right - toward) else right
    theta = abs(theta) if xi1 == left else -abs(theta)
    return MobiusFrame(circle=circle, center=c, radius=r, xi=c + r * np.exp(1j * theta), xi1=xi1)


def mobius_psi(zeta, xi: complex, xi1: complex):
    """Mobius map sending ``conj(xi), xi1, xi`` to ``-i, 1, i``; the pole gives ``inf``."""
    z = np.asarray(zeta, dtype=complex)
    xb = np.conj(xi)
    num = (z - xi) * (xi1 - xb) + 1j * (z - xb) * (xi1 - xi)
    den = (z - xb) * (xi1 - xi) + 1j * (z - xi) * (xi1 - xb)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, complex(np.inf, np.inf), num / np.where(den == 0, 1, den))
    return out[()] if out.ndim == 0 else out


def mobius_phi(w):
    """Unit disk to upper half-plane: ``-i, 1, i -> inf, -1, 0``."""
    w = np.asarray(w, dtype=complex)
    big = ~np.isfinite(w)
    w_f = np.where(big, 0, w)
    den = 1j * w_f - 1
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den == 0, complex(np.inf, np.inf), (w_f - 1j) / np.where(den == 0, 1, den))
    # the limit at infinity
    out = np.where(big, -1j, out)
    return out[()] if out.ndim == 0 else out


def _arc_measure(zeta, xi, xi1):
    z = np.asarray(zeta, dtype=complex)
    if np.any(np.isclose(z, xi, rtol=0, atol=1e-15)) or np.any(np.isclose(z, np.conj(xi), rtol=0, atol=1e-15)):
        raise GeometryError("arc field is undefined at the arc endpoints")
    ang = np.angle(mobius_phi(mobius_psi(z, xi, xi1)))
    # rounding can push boundary values just below the real axis
    ang = np.where(ang < -np.pi / 2, ang + 2 * np.pi, ang)
    out = np.clip(ang, 0.0, np.pi) / np.pi
    return out[()] if out.ndim == 0 else out


def psi_field(zeta, frame: MobiusFrame):
    """Harmonic in the exterior of the frame disk; 1 on the arc through ``xi1``, 0 on the rest."""
    return _arc_measure(zeta, frame.xi, frame.xi1)


def phi_field(zeta, frame: MobiusFrame):
    """:func:`psi_field` for the mirror image ``(-xi, -xi1)`` of the frame."""
    return _arc_measure(zeta, -frame.xi, -frame.xi1)


# -- step heights and intercepts ----------------------------------------------

def step_heights(sigma0: np.ndarray, basepoint) -> np.ndarray:
    """Constant values of h over the gaps, from the harmonic measures at ``zeta0``."""
    bp = Basepoint.parse(basepoint)
    sigma0 = np.asarray(sigma0, dtype=float)
    m = sigma0.size
    if bp is Basepoint.LEFT_EXTERIOR:
        return np.cumsum(sigma0)[:-1]
    mid = m // 2
    pairs = np.array([sigma0[mid - j] + sigma0[mid + j - 1] for j in range(1, mid + 1)])
    return np.cumsum(pairs)[:-1]


def _primary_circle(pipe: Pipeline, k: int) -> int:
    if pipe.basepoint is Basepoint.LEFT_EXTERIOR:
        if not 1 <= k <= pipe.m:
            raise ValueError(f"k must be in 1..{pipe.m}")
        return k - 1
    if not 1 <= k <= pipe.m // 2:
        raise ValueError(f"k must be in 1..{pipe.m // 2}")
    return pipe.m // 2 + k - 1


def arc_radius(pipe: Pipeline, k: int, theta) -> np.ndarray:
    """Capture radius ``|F(xi) - z0|`` for ``xi = c + r exp(i theta)`` on the k-th intersected circle."""
    q = _primary_circle(pipe, k)
    s = np.mod(-np.asarray(theta, dtype=float), 2 * np.pi)
    return pipe.map.F_on_circle(q, s).real - pipe.z0


def h_intercept_left(pipe: Pipeline, k: int, theta: float) -> Tuple[float, float]:
    """``(r, h)`` when the capture circle about ``z0 = -3/2`` crosses slit ``k`` (1-based)."""
    if pipe.basepoint is not Basepoint.LEFT_EXTERIOR:
        raise ValueError("pipeline basepoint is not the left exterior point")
    q = _primary_circle(pipe, k)
    frame = make_frame(pipe.domain, q, theta, toward=pipe.zeta0)
    sig = pipe.sigma0
    P = psi_field(pipe.domain.centers, frame)
    P[q] = 0.0
    h = psi_field(pipe.zeta0, frame) + sig[:q].sum() - P @ sig
    return float(arc_radius(pipe, k, theta)), float(h)


def _center_u(pipe: Pipeline, k: int, primary: MobiusFrame, a_idx: int, b_idx: int) -> float:
    """Center-mode ``U_k(zeta0)`` with ``primary`` on circle ``b_idx`` and its mirror on ``a_idx``."""
    m = pipe.m
    mid = m // 2
    sig = pipe.sigma0
    c = pipe.domain.centers
    P = psi_field(c[np.arange(m) != b_idx], primary)
    Q = phi_field(c[np.arange(m) != a_idx], primary)
    P_full = np.zeros(m)
    Q_full = np.zeros(m)
    P_full[np.arange(m) != b_idx] = P
    Q_full[np.arange(m) != a_idx] = Q
    u = psi_field(pipe.zeta0, primary) + phi_field(pipe.zeta0, primary)
    for j in range(1, mid + 1):
        lo, hi = mid - j, mid + j - 1
        if j < k:
            u += sig[lo] + sig[hi]
        if j != k:
            u -= (P_full[lo] + Q_full[lo]) * sig[lo] + (P_full[hi] + Q_full[hi]) * sig[hi]
    u -= P_full[a_idx] * sig[a_idx] + Q_full[b_idx] * sig[b_idx]
    return float(u)


def h_intercept_center(pipe: Pipeline, k: int, theta: float,
                       mirrored: bool = False) -> Tuple[float, float]:
    """``(r, h)`` when the capture circle about 0 crosses the k-th slit pair.

    With ``mirrored=True`` the primary frame sits on the left circle of the
    pair instead; by symmetry the result must agree to rounding.
    """
    if pipe.basepoint is not Basepoint.CENTER:
        raise ValueError("pipeline basepoint is not the center point")
    b_idx = _primary_circle(pipe, k)
    a_idx = pipe.m - 1 - b_idx
    frame = make_frame(pipe.domain, b_idx, theta, toward=pipe.zeta0)
    if mirrored:
        h = _center_u(pipe, k, frame.mirrored, b_idx, a_idx)
    else:
        h = _center_u(pipe, k, frame, a_idx, b_idx)
    return float(arc_radius(pipe, k, theta)), h


def h_intercept(pipe: Pipeline, k: int, theta: float) -> Tuple[float, float]:
    if pipe.basepoint is Basepoint.LEFT_EXTERIOR:
        return h_intercept_left(pipe, k, theta)
    return h_intercept_center(pipe, k, theta)


def constant_approximation_error(pipe: Pipeline, k: int, theta: float) -> np.ndarray:
    """``max_nodes |Psi(eta_j) - Psi(c_j)|`` for every other circle ``j`` (also Phi in center mode)."""
    q = _primary_circle(pipe, k)
    frame = make_frame(pipe.domain, q, theta, toward=pipe.zeta0)
    grid = pipe.map.grid
    eta = grid.blocks(grid.eta)
    c = pipe.domain.centers
    fields = [psi_field]
    skip = [q]
    if pipe.basepoint is Basepoint.CENTER:
        fields.append(phi_field)
        skip.append(pipe.m - 1 - q)
    err = np.zeros(pipe.m)
    for fn, own in zip(fields, skip):
        for j in range(pipe.m):
            if j == own:
                continue
            err[j] = max(err[j], float(np.abs(fn(eta[j], frame) - fn(c[j], frame)).max()))
    return err


# -- full curve ----------------------------------------------------------------

@dataclass
class HCurve:
    basepoint: Basepoint
    m: int
    zero_threshold: float
    one_threshold: float
    steps: List[Tuple[float, float, float]]          # (r_lo, r_hi, omega)
    arcs: Dict[int, np.ndarray]                      # k -> array of (theta, r, h), sorted by r
    end_values: Dict[int, Tuple[float, float]] = field(default_factory=dict)
    continuity_error: float = 0.0
    approximation_error: Dict[int, float] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)

    def merged(self) -> np.ndarray:
        """All ``(r, h)`` samples, sorted by ``r``."""
        pts = [(0.0, 0.0), (self.zero_threshold, 0.0), (self.one_threshold, 1.0)]
        for lo, hi, om in self.steps:
            pts += [(lo, om), (hi, om)]
        for arr in self.arcs.values():
            pts += [tuple(p) for p in arr[:, 1:]]
        out = np.array(pts)
        return out[np.lexsort((out[:, 1], out[:, 0]))]

    def rows(self) -> List[Tuple[float, float, str, int]]:
        """CSV rows ``(r, h, segment_type, slit_index)`` in increasing ``r``."""
        rows = [(0.0, 0.0, "step", 0), (self.zero_threshold, 0.0, "step", 0)]
        arcs = sorted(self.arcs.items())
        for k, arr in arcs:
            for _, r, h in arr:
                rows.append((float(r), float(h), "arc", k))
            if k - 1 < len(self.steps):
                lo, hi, om = self.steps[k - 1]
                rows += [(lo, om, "step", k), (hi, om, "step", k)]
        last = self.m if self.basepoint is Basepoint.LEFT_EXTERIOR else self.m // 2
        rows.append((self.one_threshold, 1.0, "step", last))
        return rows

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["r", "h", "segment_type", "slit_index"])
        for r, h, kind, idx in self.rows():
            writer.writerow([f"{r:.12g}", f"{h:.12g}", kind, idx])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def metadata(self) -> dict:
        return {
            "basepoint": self.basepoint.value,
            "m": self.m,
            "zero_threshold": self.zero_threshold,
            "one_threshold": self.one_threshold,
            "steps": len(self.steps),
            "arcs": len(self.arcs),
            "continuity_error": self.continuity_error,
            "max_constant_approximation_error": max(self.approximation_error.values(), default=0.0),
            "timings": self.timings,
        }


def sample_angles(count: int = SAMPLES_PER_SLIT) -> np.ndarray:
    """Equispaced angles over the open upper semicircle, half a spacing from each end."""
    return (np.arange(count) + 0.5) * np.pi / count


def build_curve(pipe: Pipeline, samples_per_slit: int = SAMPLES_PER_SLIT,
                monotone_tol: float = MONOTONE_TOL,
                approximation_diagnostic: bool = True) -> HCurve:
    """Steps from the gap schedule plus sampled arcs on every intersected slit."""
    t0 = time.perf_counter()
    bp = pipe.basepoint
    sched: GapSchedule = gap_schedule(pipe.slits, bp)
    omega = step_heights(pipe.sigma0, bp)
    steps = [(lo, hi, float(om)) for (lo, hi, _), om in zip(sched.steps, omega)]
    n_arcs = pipe.m if bp is Basepoint.LEFT_EXTERIOR else pipe.m // 2
    levels = np.concatenate([[0.0], omega, [1.0]])
    thetas = sample_angles(samples_per_slit)
    arcs: Dict[int, np.ndarray] = {}
    ends: Dict[int, Tuple[float, float]] = {}
    approx: Dict[int, float] = {}
    cont = 0.0
    for k in range(1, n_arcs + 1):
        pts = np.array([(th, *h_intercept(pipe, k, th)) for th in thetas])
        arcs[k] = pts[np.argsort(pts[:, 1])]
        h_left = h_intercept(pipe, k, np.pi - END_PROBE)[1]
        h_right = h_intercept(pipe, k, END_PROBE)[1]
        ends[k] = (h_left, h_right)
        cont = max(cont, abs(h_left - levels[k - 1]), abs(h_right - levels[k]))
        if approximation_diagnostic:
            approx[k] = float(max(constant_approximation_error(pipe, k, th).max()
                                  for th in thetas[[0, len(thetas) // 2, -1]]))
    curve = HCurve(basepoint=bp, m=pipe.m, zero_threshold=sched.zero_interval[1],
                   one_threshold=sched.one_threshold, steps=steps, arcs=arcs,
                   end_values=ends, continuity_error=cont, approximation_error=approx)
    merged = curve.merged()
    h = merged[:, 1]
    if np.any(h < -monotone_tol) or np.any(h > 1 + monotone_tol):
        raise ConsistencyError("h values leave [0, 1]")
    drop = float(np.max(-np.diff(h), initial=0.0))
    if drop > monotone_tol:
        raise ConsistencyError(f"h decreases by {drop:.2e} somewhere; upstream accuracy is insufficient")
    curve.timings = dict(pipe.timings, curve=time.perf_counter() - t0)
    return curve

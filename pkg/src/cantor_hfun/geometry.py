"""Cantor-level slit domains, basepoints and the gap structure seen from them.

Slit coordinates are built with exact rational arithmetic and converted to
floats only at the end, so deep levels do not accumulate rounding error.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import CapacityError, GeometryError

MAX_SLITS = 4096

__all__ = [
    "MAX_SLITS",
    "Basepoint",
    "SlitDomain",
    "GapSchedule",
    "CircularDomain",
    "cantor_level",
    "gap_schedule",
    "initial_circles",
]


class Basepoint(enum.Enum):
    """The two basepoint locations handled by the pipeline."""

    LEFT_EXTERIOR = "left"
    CENTER = "center"

    @property
    def z0(self) -> float:
        return -1.5 if self is Basepoint.LEFT_EXTERIOR else 0.0

    @property
    def threshold_lo(self) -> float:
        """Largest radius at which h is still identically zero."""
        return 1.0 if self is Basepoint.LEFT_EXTERIOR else 1.0 / 6.0

    @property
    def threshold_hi(self) -> float:
        """Smallest radius from which h is identically one."""
        return 2.0 if self is Basepoint.LEFT_EXTERIOR else 0.5

    @classmethod
    def parse(cls, value) -> "Basepoint":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"left": cls.LEFT_EXTERIOR, "left_exterior": cls.LEFT_EXTERIOR,
                   "leftexterior": cls.LEFT_EXTERIOR, "-1.5": cls.LEFT_EXTERIOR,
                   "center": cls.CENTER, "centre": cls.CENTER, "0": cls.CENTER}
        try:
            return aliases[key]
        except KeyError:
            raise GeometryError(f"unknown basepoint {value!r}; use 'left' or 'center'") from None


@dataclass(frozen=True)
class SlitDomain:
    """``m`` collinear slits of common length on the real axis.

    ``exact_centers`` / ``exact_length`` keep the rational values when the
    domain was produced by :func:`cantor_level`; for hand-built domains they
    mirror the float data.
    """

    level: Optional[int]
    length: float
    centers: Tuple[float, ...]
    exact_length: Fraction = field(default=None, repr=False, compare=False)
    exact_centers: Tuple[Fraction, ...] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        centers = tuple(float(c) for c in self.centers)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "length", float(self.length))
        if self.exact_length is None:
            object.__setattr__(self, "exact_length", Fraction(self.length))
        if self.exact_centers is None:
            object.__setattr__(self, "exact_centers", tuple(Fraction(c) for c in centers))
        if not centers:
            raise GeometryError("a slit domain needs at least one slit")
        if self.length <= 0:
            raise GeometryError("slit length must be positive")
        gaps = np.diff(centers)
        if np.any(gaps <= self.length):
            raise GeometryError("slits must be disjoint and sorted by center")

    @property
    def m(self) -> int:
        return len(self.centers)

    @property
    def left_ends(self) -> np.ndarray:
        return np.array([float(c - self.exact_length / 2) for c in self.exact_centers])

    @property
    def right_ends(self) -> np.ndarray:
        return np.array([float(c + self.exact_length / 2) for c in self.exact_centers])

    def total_measure(self) -> float:
        return self.m * self.length

    def contains(self, x: float) -> bool:
        """True if the real point ``x`` lies on a slit."""
        return bool(np.any((self.left_ends <= x) & (x <= self.right_ends)))

    def to_dict(self) -> dict:
        return {"level": self.level, "m": self.m, "length": self.length,
                "centers": list(self.centers)}

    @classmethod
    def from_dict(cls, data: dict) -> "SlitDomain":
        return cls(level=data.get("level"), length=data["length"], centers=data["centers"])


def cantor_level(level: int, max_slits: int = MAX_SLITS) -> SlitDomain:
    """Return the level-``level`` middle-thirds approximation of the Cantor set.

    Each level scales the previous one by 1/3 about the origin and places the
    two copies at -1/3 and +1/3, so ``E_0 = [-1/2, 1/2]`` and
    ``E_1 = [-1/2, -1/6] U [1/6, 1/2]``.

    >>> cantor_level(1).centers
    (-0.3333333333333333, 0.3333333333333333)
    """
    if isinstance(level, bool) or int(level) != level or level < 0:
        raise GeometryError(f"level must be a nonnegative integer, got {level!r}")
    level = int(level)
    if 2 ** level > max_slits:
        raise CapacityError(f"level {level} needs {2 ** level} slits; maximum is {max_slits}")
    third = Fraction(1, 3)
    centers = [Fraction(0)]
    for _ in range(level):
        centers = [c * third - third for c in centers] + [c * third + third for c in centers]
    length = third ** level
    return SlitDomain(
        level=level,
        length=float(length),
        centers=tuple(float(c) for c in centers),
        exact_length=length,
        exact_centers=tuple(centers),
    )


@dataclass(frozen=True)
class GapSchedule:
    """Radius intervals on which h is constant.

    ``steps`` holds ``(r_lo, r_hi, k)`` with ``k`` the 1-based step index.
    """

    basepoint: Basepoint
    zero_interval: Tuple[float, float]
    one_threshold: float
    steps: Tuple[Tuple[float, float, int], ...]

    def __len__(self):
        return len(self.steps)

    def to_dict(self) -> dict:
        return {
            "basepoint": self.basepoint.value,
            "zero_interval": list(self.zero_interval),
            "one_threshold": self.one_threshold,
            "steps": [{"r_lo": lo, "r_hi": hi, "k": k} for lo, hi, k in self.steps],
        }


def gap_schedule(domain: SlitDomain, basepoint) -> GapSchedule:
    """Radii at which the capture circle passes through gaps between slits."""
    bp = Basepoint.parse(basepoint)
    z0 = Fraction(bp.z0).limit_denominator()
    half = domain.exact_length / 2
    w = domain.exact_centers
    m = domain.m
    steps: List[Tuple[float, float, int]] = []
    if bp is Basepoint.LEFT_EXTERIOR:
        if z0 >= w[0] - half:
            raise GeometryError("left basepoint must lie left of every slit")
        lead = (0.0, float(w[0] - half - z0))
        trail = float(w[-1] + half - z0)
        for k in range(1, m):
            steps.append((float(w[k - 1] + half - z0), float(w[k] - half - z0), k))
    else:
        if m % 2:
            raise GeometryError("center basepoint needs an even slit count")
        if domain.contains(0.0):
            raise GeometryError("basepoint 0 lies on a slit")
        mid = m // 2
        # pairs (mid-j+1, mid+j) are symmetric, so the right member fixes the radius
        lead = (0.0, float(w[mid] - half))
        trail = float(w[-1] + half)
        for k in range(1, mid):
            steps.append((float(w[mid + k - 1] + half), float(w[mid + k] - half), k))
    return GapSchedule(basepoint=bp, zero_interval=lead, one_threshold=trail, steps=tuple(steps))


@dataclass(frozen=True)
class CircularDomain:
    """Exterior of ``m`` disjoint closed disks."""

    centers: np.ndarray
    radii: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.centers, dtype=complex)).copy()
        r = np.atleast_1d(np.asarray(self.radii, dtype=float)).copy()
        if c.shape != r.shape or c.ndim != 1:
            raise GeometryError("centers and radii must be 1-d arrays of equal length")
        if np.any(~np.isfinite(r)) or np.any(r <= 0):
            raise GeometryError("radii must be positive and finite")
        c.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)
        if self.m > 1 and self.min_separation() <= 0:
            raise GeometryError("circles overlap")

    @property
    def m(self) -> int:
        return self.radii.size

    def min_separation(self) -> float:
        if self.m < 2:
            return np.inf
        d = np.abs(self.centers[:, None] - self.centers[None, :])
        gap = d - self.radii[:, None] - self.radii[None, :]
        np.fill_diagonal(gap, np.inf)
        return float(gap.min())

    def distance_to_boundary(self, zeta) -> np.ndarray:
        """Signed distance from each point to the nearest circle (negative inside a disk)."""
        z = np.asarray(zeta, dtype=complex)
        d = np.abs(z[..., None] - self.centers) - self.radii
        return d.min(axis=-1)

    def to_dict(self) -> dict:
        return {"centers": [float(c.real) for c in self.centers],
                "centers_imag": [float(c.imag) for c in self.centers],
                "radii": [float(r) for r in self.radii]}

    @classmethod
    def from_dict(cls, data: dict) -> "CircularDomain":
        c = np.asarray(data["centers"], dtype=float)
        if "centers_imag" in data:
            c = c + 1j * np.asarray(data["centers_imag"], dtype=float)
        return cls(centers=c, radii=np.asarray(data["radii"], dtype=float))


def initial_circles(domain: SlitDomain) -> CircularDomain:
    """Starting guess for the preimage: one circle of radius L/2 per slit center."""
    return CircularDomain(centers=np.array(domain.centers, dtype=complex),
                          radii=np.full(domain.m, domain.length / 2))


def mirror_pairs(m: int) -> Sequence[Tuple[int, int]]:
    """0-based index pairs (m/2-j, m/2+j-1), j = 1..m/2, ordered outward from the middle."""
    mid = m // 2
    return [(mid - j, mid + j - 1) for j in range(1, mid + 1)]

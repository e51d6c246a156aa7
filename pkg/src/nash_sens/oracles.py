"""Closed-form equilibrium sets of the motivating game.

Region predicates follow the published interval inequalities term by term
(open/closed ends included) so that a transcription slip shows up as a
localized mismatch against the grid computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .grids import Grid, ProfileSet

LABELS = ("A", "B1", "B2", "C", "DIAGONAL", "POINTS")


@dataclass(frozen=True, eq=False)
class RegionDescriptor:
    label: str
    x: float
    eps: Optional[float]
    predicate: Callable
    points: tuple = ()

    def __post_init__(self):
        if self.label not in LABELS:
            raise DomainError(f"unknown region label {self.label!r}")

    def contains(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        inbox = (y1 >= 0) & (y1 <= 1) & (y2 >= 0) & (y2 <= 1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return inbox & np.asarray(self.predicate(y1, y2), dtype=bool)


@dataclass(frozen=True, eq=False)
class OracleSet:
    regions: tuple = field(default_factory=tuple)

    @property
    def labels(self) -> tuple:
        return tuple(r.label for r in self.regions)

    def contains(self, y1, y2):
        y1 = np.asarray(y1, dtype=float)
        y2 = np.asarray(y2, dtype=float)
        out = np.zeros(np.broadcast(y1, y2).shape, dtype=bool)
        for r in self.regions:
            out |= r.contains(y1, y2)
        return out

    def sample(self, grid: Grid) -> ProfileSet:
        """Grid profiles belonging to the set.

        Point and diagonal regions are matched to within the grid's
        snapping tolerance; two-dimensional regions use their predicates.
        """
        c = grid.coords(np.arange(grid.size))
        y1, y2 = c[:, 0], c[:, 1]
        mask = np.zeros(grid.size, dtype=bool)
        for r in self.regions:
            if r.label == "POINTS":
                for p1, p2 in r.points:
                    mask |= (np.abs(y1 - p1) <= grid.tol) & (np.abs(y2 - p2) <= grid.tol)
            elif r.label == "DIAGONAL":
                mask |= np.abs(y1 - y2) <= grid.tol
            else:
                mask |= r.contains(y1, y2)
        return ProfileSet(grid, np.flatnonzero(mask))


def _check_x(x):
    if not 0.0 <= x <= 2.0:
        raise DomainError(f"x must lie in [0, 2], got {x}")


def _points(x, pts):
    def pred(y1, y2):
        out = np.zeros(np.broadcast(y1, y2).shape, dtype=bool)
        for a, b in pts:
            out |= (y1 == a) & (y2 == b)
        return out
    return RegionDescriptor("POINTS", x, None, pred, tuple(pts))


def oracle_h(x: float) -> OracleSet:
    """Exact equilibrium set of the motivating game."""
    _check_x(x)
    if x < 1:
        return OracleSet((_points(x, [(0.0, 0.0)]),))
    if x == 1:
        return OracleSet((RegionDescriptor("DIAGONAL", x, None, lambda y1, y2: y1 == y2),))
    return OracleSet((_points(x, [(0.0, 0.0), (1.0, 1.0)]),))


def regime_boundary(eps: float) -> float:
    """Parameter value (1 + eps) / (1 - sqrt(eps))^2 separating the B1 and B2/C regimes."""
    return (1.0 + eps) / (1.0 - np.sqrt(eps)) ** 2


def region_A(x: float, eps: float) -> RegionDescriptor:
    s = np.sqrt(eps)
    gap = abs(1.0 - x)
    # 1/0 = inf at x = 1
    top = np.inf if gap == 0 else 2.0 / gap * s

    def pred(y1, y2):
        return ((y1 > max(1.0, x) * y2 - s) & (y1 < min(1.0, x) * y2 + s)
                & (y2 >= 0) & (y2 < top))
    return RegionDescriptor("A", x, eps, pred)


def _y1_band(x, eps, y1, y2):
    s = np.sqrt(eps)
    return (y1 > x * y2 - np.sqrt((x * y2 - 1.0) ** 2 + eps)) & (y1 < y2 + s)


def _quad_roots(x, eps):
    s = np.sqrt(eps)
    p = (1.0 - s) * x + s
    q = 2.0 * x - 1.0
    with np.errstate(invalid="ignore"):
        r = np.sqrt(p * p - q)
    return (p - r) / q, (p + r) / q


def region_B1(x: float, eps: float) -> RegionDescriptor:
    def pred(y1, y2):
        return _y1_band(x, eps, y1, y2) & (y2 > 1.0 / x) & (y2 <= 1.0)
    return RegionDescriptor("B1", x, eps, pred)


def region_B2(x: float, eps: float) -> RegionDescriptor:
    lo_root, _ = _quad_roots(x, eps)

    def pred(y1, y2):
        return _y1_band(x, eps, y1, y2) & (y2 > 1.0 / x) & (y2 < lo_root)
    return RegionDescriptor("B2", x, eps, pred)


def region_C(x: float, eps: float) -> RegionDescriptor:
    _, hi_root = _quad_roots(x, eps)

    def pred(y1, y2):
        return _y1_band(x, eps, y1, y2) & (y2 > hi_root) & (y2 <= 1.0)
    return RegionDescriptor("C", x, eps, pred)


def oracle_h_eps(x: float, eps: float) -> OracleSet:
    """Closed-form epsilon-approximate equilibrium set (eps1 = eps, no truncation)."""
    _check_x(x)
    if not 0.0 < eps < 0.25:
        raise DomainError(f"eps must lie in (0, 1/4), got {eps}")
    if x <= 1:
        return OracleSet((region_A(x, eps),))
    if x < regime_boundary(eps):
        return OracleSet((region_A(x, eps), region_B1(x, eps)))
    return OracleSet((region_A(x, eps), region_B2(x, eps), region_C(x, eps)))


def near_boundary(oracle: OracleSet, y1, y2, radius: float, rings: int = 6,
                  angles: int = 48) -> np.ndarray:
    """True where membership changes somewhere in the closed disk of ``radius``.

    The disk is probed on concentric rings, with probes clipped to [0, 1]^2
    so the box edge itself does not count as a region boundary.
    """
    y1 = np.asarray(y1, dtype=float).reshape(-1)
    y2 = np.asarray(y2, dtype=float).reshape(-1)
    centre = oracle.contains(y1, y2)
    out = np.zeros(y1.shape, dtype=bool)
    th = np.linspace(0.0, 2.0 * np.pi, angles, endpoint=False)
    for k in range(1, rings + 1):
        rr = radius * k / rings
        p1 = np.clip(y1[:, None] + rr * np.cos(th)[None, :], 0.0, 1.0)
        p2 = np.clip(y2[:, None] + rr * np.sin(th)[None, :], 0.0, 1.0)
        out |= (oracle.contains(p1, p2) != centre[:, None]).any(axis=1)
    return out

"""Uniform product grids over strategy boxes and finite point-set geometry.

Profiles are addressed by a row-major index over the product of every
player's axes (player 0's axes vary slowest).  That index is part of the
public contract: CSV dumps list profiles in ascending index order.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConfigurationError, DomainError

# distance comparisons are snapped to this fraction of the finest grid spacing
GEOM_RTOL = 1e-9

METRICS = ("euclidean", "sum")


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise ConfigurationError(f"axis bounds must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ConfigurationError(f"axis requires lo < hi, got [{self.lo}, {self.hi}]")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigurationError(f"axis needs an integer number of points >= 2, got {self.points}")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.points - 1)


@dataclass(frozen=True)
class GridSpec:
    """Per-player tuples of axes."""

    players: tuple

    def __post_init__(self):
        players = tuple(tuple(p) for p in self.players)
        if not players or any(len(p) == 0 for p in players):
            raise ConfigurationError("grid spec needs at least one player with at least one axis")
        for p in players:
            for ax in p:
                if not isinstance(ax, Axis):
                    raise ConfigurationError(f"expected Axis, got {ax!r}")
        object.__setattr__(self, "players", players)

    @classmethod
    def uniform(cls, n_players: int, points: int, lo: float = 0.0, hi: float = 1.0,
                dims: int = 1) -> "GridSpec":
        ax = Axis(lo, hi, points)
        return cls(tuple((ax,) * dims for _ in range(n_players)))

    @classmethod
    def for_boxes(cls, boxes, points: int) -> "GridSpec":
        """One axis with ``points`` nodes per coordinate of each (lo, hi) box."""
        players = []
        for lo, hi in boxes:
            lo = np.atleast_1d(np.asarray(lo, dtype=float))
            hi = np.atleast_1d(np.asarray(hi, dtype=float))
            players.append(tuple(Axis(float(a), float(b), points) for a, b in zip(lo, hi)))
        return cls(tuple(players))


class Grid:
    """Realized coordinates of a :class:`GridSpec`."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        self.axis_coords = []
        self._player_points = []
        for axes in spec.players:
            coords = []
            for ax in axes:
                c = np.linspace(ax.lo, ax.hi, ax.points)
                c[-1] = ax.hi
                coords.append(c)
            self.axis_coords.append(tuple(coords))
            mesh = np.meshgrid(*coords, indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
            pts.setflags(write=False)
            self._player_points.append(pts)
        self.player_sizes = tuple(len(p) for p in self._player_points)
        self.dims = tuple(len(axes) for axes in spec.players)
        self.size = int(np.prod(self.player_sizes))
        spacings = [ax.spacing for axes in spec.players for ax in axes]
        self.spacing = max(spacings)
        self.min_spacing = min(spacings)
        self.tol = GEOM_RTOL * self.min_spacing

    @property
    def n_players(self) -> int:
        return len(self.player_sizes)

    @property
    def shape(self) -> tuple:
        return self.player_sizes

    def player_points(self, i: int) -> np.ndarray:
        """(n_i, d_i) array of player i's grid points in index order."""
        return self._player_points[i]

    def box(self, i: int):
        axes = self.spec.players[i]
        return np.array([a.lo for a in axes]), np.array([a.hi for a in axes])

    def unravel(self, indices) -> tuple:
        return np.unravel_index(np.asarray(indices, dtype=np.int64), self.player_sizes)

    def ravel(self, per_player) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(p) for p in per_player), self.player_sizes)

    def coords(self, indices) -> np.ndarray:
        """(k, sum(dims)) coordinates of the given profile indices."""
        indices = np.asarray(indices, dtype=np.int64).reshape(-1)
        if indices.size == 0:
            return np.empty((0, sum(self.dims)))
        parts = self.unravel(indices)
        return np.concatenate([self._player_points[i][p] for i, p in enumerate(parts)], axis=1)

    def __eq__(self, other):
        return isinstance(other, Grid) and other.spec == self.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Grid(players={self.n_players}, sizes={self.player_sizes})"


def build_grid(spec: GridSpec) -> Grid:
    return Grid(spec)


def within(d, radius: float, closed: bool, tol: float):
    """Elementwise ``d < radius`` (open) or ``d <= radius`` (closed) with snapping.

    Distances within ``tol`` of the radius count as lying on the sphere.
    Zero distance is always inside.
    """
    d = np.asarray(d)
    if closed:
        return d <= radius + tol
    return (d < radius - tol) | (d == 0)


class PointSet:
    """Sorted, duplicate-free set of one player's grid-point indices."""

    __slots__ = ("grid", "player", "indices")

    def __init__(self, grid: Grid, player: int, indices: Iterable[int]):
        idx = np.unique(np.asarray(list(indices) if not isinstance(indices, np.ndarray) else indices,
                                   dtype=np.int64))
        n = grid.player_sizes[player]
        if idx.size and (idx[0] < 0 or idx[-1] >= n):
            raise DomainError(f"point index out of range for player {player} (size {n})")
        idx.setflags(write=False)
        self.grid = grid
        self.player = player
        self.indices = idx

    @classmethod
    def from_mask(cls, grid: Grid, player: int, mask) -> "PointSet":
        return cls(grid, player, np.flatnonzero(np.asarray(mask)))

    def points(self) -> np.ndarray:
        return self.grid.player_points(self.player)[self.indices]

    def values(self) -> list:
        """Coordinates as plain floats (1-d players) or tuples."""
        pts = self.points()
        if pts.shape[1] == 1:
            return [float(v) for v in pts[:, 0]]
        return [tuple(float(v) for v in row) for row in pts]

    def __len__(self):
        return int(self.indices.size)

    def __iter__(self):
        return iter(int(i) for i in self.indices)

    def __contains__(self, idx):
        k = np.searchsorted(self.indices, idx)
        return bool(k < self.indices.size and self.indices[k] == idx)

    def __eq__(self, other):
        return (isinstance(other, PointSet) and other.grid == self.grid
                and other.player == self.player and np.array_equal(other.indices, self.indices))

    def issubset(self, other: "PointSet") -> bool:
        return bool(np.isin(self.indices, other.indices, assume_unique=True).all())

    def __repr__(self):
        return f"PointSet(player={self.player}, n={len(self)})"


class ProfileSet:
    """Sorted, duplicate-free set of product-grid profile indices."""

    __slots__ = ("grid", "indices")

    def __init__(self, grid: Grid, indices: Iterable[int] = ()):
        if not isinstance(indices, np.ndarray):
            indices = np.fromiter((int(i) for i in indices), dtype=np.int64)
        idx = np.unique(indices.astype(np.int64, copy=False))
        if idx.size and (idx[0] < 0 or idx[-1] >= grid.size):
            raise DomainError(f"profile index out of range for grid of size {grid.size}")
        idx.setflags(write=False)
        self.grid = grid
        self.indices = idx

    @classmethod
    def from_mask(cls, grid: Grid, mask) -> "ProfileSet":
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != grid.shape:
            raise DomainError(f"mask shape {mask.shape} does not match grid {grid.shape}")
        return cls(grid, np.flatnonzero(mask.ravel()))

    @classmethod
    def full(cls, grid: Grid) -> "ProfileSet":
        return cls(grid, np.arange(grid.size, dtype=np.int64))

    @classmethod
    def from_points(cls, grid: Grid, points, atol: float | None = None) -> "ProfileSet":
        """Grid profiles whose coordinates match the given points (to ``atol``)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.size == 0:
            return cls(grid)
        atol = grid.tol if atol is None else atol
        per_player = []
        start = 0
        for i, d in enumerate(grid.dims):
            tree = cKDTree(grid.player_points(i))
            dist, idx = tree.query(pts[:, start:start + d])
            if np.any(dist > atol):
                raise DomainError("point does not lie on the grid")
            per_player.append(idx)
            start += d
        return cls(grid, grid.ravel(per_player))

    def _check(self, other):
        if not isinstance(other, ProfileSet):
            raise TypeError(f"expected ProfileSet, got {type(other).__name__}")
        if other.grid != self.grid:
            raise DomainError("profile sets reference different grids")

    def coords(self) -> np.ndarray:
        return self.grid.coords(self.indices)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.grid.size, dtype=bool)
        m[self.indices] = True
        return m.reshape(self.grid.shape)

    def __len__(self):
        return int(self.indices.size)

    def __bool__(self):
        return self.indices.size > 0

    def __iter__(self):
        return iter(int(i) for i in self.indices)

    def __contains__(self, idx):
        k = np.searchsorted(self.indices, idx)
        return bool(k < self.indices.size and self.indices[k] == idx)

    def __eq__(self, other):
        return (isinstance(other, ProfileSet) and other.grid == self.grid
                and np.array_equal(other.indices, self.indices))

    def __hash__(self):
        return hash((self.grid, self.indices.tobytes()))

    def union(self, other: "ProfileSet") -> "ProfileSet":
        self._check(other)
        return ProfileSet(self.grid, np.union1d(self.indices, other.indices))

    def intersection(self, other: "ProfileSet") -> "ProfileSet":
        self._check(other)
        return ProfileSet(self.grid, np.intersect1d(self.indices, other.indices, assume_unique=True))

    def difference(self, other: "ProfileSet") -> "ProfileSet":
        self._check(other)
        return ProfileSet(self.grid, np.setdiff1d(self.indices, other.indices, assume_unique=True))

    def symmetric_difference(self, other: "ProfileSet") -> "ProfileSet":
        self._check(other)
        return ProfileSet(self.grid, np.setxor1d(self.indices, other.indices, assume_unique=True))

    def issubset(self, other: "ProfileSet") -> bool:
        self._check(other)
        return bool(np.isin(self.indices, other.indices, assume_unique=True).all())

    __or__ = union
    __and__ = intersection
    __sub__ = difference
    __le__ = issubset

    def to_csv(self, fh=None) -> str | None:
        """Write ``profile_index,y_1_1,...`` rows in ascending index order.

        Returns the text when no file handle is given.
        """
        out = io.StringIO() if fh is None else fh
        header = ["profile_index"] + [f"y_{i + 1}_{k + 1}"
                                      for i, d in enumerate(self.grid.dims) for k in range(d)]
        out.write(",".join(header) + "\n")
        coords = self.coords()
        for idx, row in zip(self.indices, coords):
            out.write(str(int(idx)) + "," + ",".join(format(float(v), ".17g") for v in row) + "\n")
        if fh is None:
            return out.getvalue()
        return None

    def __repr__(self):
        return f"ProfileSet(n={len(self)}, grid={self.grid!r})"


def _split_players(coords: np.ndarray, dims: Sequence[int]):
    out, start = [], 0
    for d in dims:
        out.append(coords[:, start:start + d])
        start += d
    return out


def nearest_distance(points: np.ndarray, targets: np.ndarray, dims: Sequence[int],
                     metric: str = "euclidean") -> np.ndarray:
    """Distance from each row of ``points`` to the nearest row of ``targets``.

    ``euclidean`` treats a profile as one vector; ``sum`` adds per-player
    Euclidean distances.
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}")
    if len(targets) == 0:
        return np.full(len(points), np.inf)
    if len(points) == 0:
        return np.empty(0)
    if metric == "euclidean":
        return cKDTree(targets).query(points)[0]
    if all(d == 1 for d in dims):
        return cKDTree(targets).query(points, p=1)[0]
    # per-player Euclidean summed: not a Minkowski norm, brute force in chunks
    tparts = _split_players(targets, dims)
    out = np.empty(len(points))
    step = max(1, 2_000_000 // max(len(targets), 1))
    for s in range(0, len(points), step):
        pparts = _split_players(points[s:s + step], dims)
        tot = 0.0
        for pp, tp in zip(pparts, tparts):
            tot = tot + np.sqrt(((pp[:, None, :] - tp[None, :, :]) ** 2).sum(-1))
        out[s:s + step] = tot.min(axis=1)
    return out


def directed_hausdorff(a: ProfileSet, b: ProfileSet, metric: str = "euclidean") -> float:
    """sup over a of the distance to b (0 for empty a, inf for empty b)."""
    a._check(b)
    if len(a) == 0:
        return 0.0
    if len(b) == 0:
        return float("inf")
    d = nearest_distance(a.coords(), b.coords(), a.grid.dims, metric)
    return float(d.max())


def hausdorff(a: ProfileSet, b: ProfileSet, metric: str = "euclidean") -> float:
    a._check(b)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return float("inf")
    return max(directed_hausdorff(a, b, metric), directed_hausdorff(b, a, metric))


def contains_within(a: ProfileSet, b: ProfileSet, delta: float, metric: str = "euclidean") -> bool:
    """True iff every point of ``a`` lies within ``delta`` of some point of ``b``."""
    a._check(b)
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    if len(a) == 0:
        return True
    if len(b) == 0:
        return False
    if delta == 0:
        return a.issubset(b)
    d = nearest_distance(a.coords(), b.coords(), a.grid.dims, metric)
    return bool(within(d, delta, True, a.grid.tol).all())


def violations_within(a: ProfileSet, b: ProfileSet, delta: float,
                      metric: str = "euclidean") -> ProfileSet:
    """Members of ``a`` farther than ``delta`` from ``b``."""
    a._check(b)
    if len(a) == 0 or len(b) == 0:
        return a
    if delta == 0:
        return a.difference(b)
    d = nearest_distance(a.coords(), b.coords(), a.grid.dims, metric)
    return ProfileSet(a.grid, a.indices[~within(d, delta, True, a.grid.tol)])


def ball_dilate(pset: PointSet, eps: float, closed: bool = False) -> PointSet:
    """Player grid points at distance < eps (<= eps when closed) from ``pset``."""
    if len(pset) == 0:
        raise DomainError("cannot dilate an empty point set")
    if not eps > 0:
        raise DomainError(f"dilation radius must be positive, got {eps}")
    grid = pset.grid
    pts = grid.player_points(pset.player)
    members = pts[pset.indices]
    d = cKDTree(members).query(pts)[0]
    return PointSet.from_mask(grid, pset.player, within(d, eps, closed, grid.tol))


def _stencil(grid: Grid, delta: float) -> np.ndarray:
    """Integer per-axis offsets that can reach within ``delta``."""
    ranges = []
    for axes in grid.spec.players:
        for ax in axes:
            k = int(np.floor(delta / ax.spacing + 1e-9))
            ranges.append(np.arange(-k, k + 1))
    return np.array(list(product(*ranges)), dtype=np.int64)


def neighborhood(pset: ProfileSet, delta: float, metric: str = "euclidean") -> ProfileSet:
    """Grid profiles within ``delta`` (closed) of some member of ``pset``."""
    if delta < 0:
        raise DomainError("delta must be nonnegative")
    grid = pset.grid
    if len(pset) == 0 or delta == 0:
        return pset
    # per-axis integer index of every member
    sizes = [ax.points for axes in grid.spec.players for ax in axes]
    n_stencil = 1
    for axes in grid.spec.players:
        for ax in axes:
            n_stencil *= 2 * int(np.floor(delta / ax.spacing + 1e-9)) + 1
    if n_stencil * len(pset) >= grid.size:
        cand = np.arange(grid.size, dtype=np.int64)
    else:
        axis_idx = np.stack(np.unravel_index(pset.indices, sizes), axis=1)
        offs = _stencil(grid, delta)
        moved = (axis_idx[:, None, :] + offs[None, :, :]).reshape(-1, len(sizes))
        ok = np.all((moved >= 0) & (moved < np.array(sizes)), axis=1)
        cand = np.unique(np.ravel_multi_index(tuple(moved[ok].T), sizes))
    d = nearest_distance(grid.coords(cand), pset.coords(), grid.dims, metric)
    return ProfileSet(grid, cand[within(d, delta, True, grid.tol)])

"""Parameterized games: payoffs, truncation, values and (approximate) best responses.

Payoff and feasibility evaluators share one calling convention,
``f(x, ys)``, where ``x`` is the parameter (a float array) and ``ys`` is a
list with one array per player of shape ``(..., d_j)``.  Evaluators must
broadcast over the leading axes; the toolkit calls them both on whole
product grids and on single-player slices, and relies on the two routes
giving bit-identical values.  Keep evaluators elementwise (no BLAS
reductions) to preserve that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, InfeasibleError
from .grids import Grid, PointSet, ball_dilate, within

DISABLED = None
DEFAULT_TIE_TOL = 1e-9

Evaluator = Callable[[np.ndarray, list], np.ndarray]


@dataclass(frozen=True)
class EpsilonTriple:
    """Approximation levels: payoff slack, truncation level, feasibility dilation.

    ``eps2`` / ``eps3`` set to ``None`` (``DISABLED``) switch off truncation
    and dilation respectively.
    """

    eps1: float
    eps2: Optional[float] = None
    eps3: Optional[float] = None

    def __post_init__(self):
        for name in ("eps1", "eps2", "eps3"):
            v = getattr(self, name)
            if v is None and name != "eps1":
                continue
            if v is None or not np.isfinite(v) or v <= 0:
                raise ConfigurationError(f"{name} must be a positive real, got {v!r}")
            object.__setattr__(self, name, float(v))

    def scaled(self, k: float) -> "EpsilonTriple":
        return EpsilonTriple(self.eps1 * k,
                             None if self.eps2 is None else self.eps2 * k,
                             None if self.eps3 is None else self.eps3 * k)

    def to_dict(self) -> dict:
        return {"eps1": self.eps1, "eps2": self.eps2, "eps3": self.eps3}


@dataclass(frozen=True, eq=False)
class GameSpec:
    boxes: tuple
    payoffs: tuple
    feasibility: tuple = ()
    param_box: Optional[tuple] = None
    payoff_bound: Optional[float] = None
    name: str = "game"
    dims: tuple = field(init=False)

    def __post_init__(self):
        boxes = []
        for lo, hi in self.boxes:
            lo = np.atleast_1d(np.asarray(lo, dtype=float))
            hi = np.atleast_1d(np.asarray(hi, dtype=float))
            if lo.shape != hi.shape or lo.ndim != 1 or np.any(lo >= hi):
                raise ConfigurationError(f"invalid strategy box [{lo}, {hi}]")
            boxes.append((lo, hi))
        object.__setattr__(self, "boxes", tuple(boxes))
        object.__setattr__(self, "dims", tuple(len(lo) for lo, _ in boxes))
        if len(self.payoffs) != len(boxes):
            raise ConfigurationError("need one payoff evaluator per player")
        feas = tuple(self.feasibility) if self.feasibility else (None,) * len(boxes)
        if len(feas) != len(boxes):
            raise ConfigurationError("need one feasibility predicate per player (or none)")
        object.__setattr__(self, "feasibility", feas)
        if self.param_box is not None:
            lo, hi = self.param_box
            lo = np.atleast_1d(np.asarray(lo, dtype=float))
            hi = np.atleast_1d(np.asarray(hi, dtype=float))
            object.__setattr__(self, "param_box", (lo, hi))

    @property
    def n_players(self) -> int:
        return len(self.boxes)


def check_parameter(game: GameSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise DomainError(f"parameter must be finite, got {x}")
    if game.param_box is not None:
        lo, hi = game.param_box
        if np.any(np.atleast_1d(x) < lo) or np.any(np.atleast_1d(x) > hi):
            raise DomainError(f"parameter {x} outside box [{lo}, {hi}]")
    return x


def split_profile(game: GameSpec, y) -> list:
    """Per-player coordinate vectors from a profile.

    Accepts a sequence with one entry (scalar or vector) per player, or a
    flat vector of all coordinates.
    """
    if len(y) == game.n_players:
        parts = [np.atleast_1d(np.asarray(v, dtype=float)) for v in y]
        if all(p.shape == (d,) for p, d in zip(parts, game.dims)):
            return parts
    flat = np.asarray(y, dtype=float).reshape(-1)
    if flat.size != sum(game.dims):
        raise DomainError(f"profile has {flat.size} coordinates, game expects {sum(game.dims)}")
    return list(np.split(flat, np.cumsum(game.dims)[:-1]))


def _check_in_box(game: GameSpec, parts, skip: Optional[int] = None):
    for j, (p, (lo, hi)) in enumerate(zip(parts, game.boxes)):
        if j == skip:
            continue
        if not np.all(np.isfinite(p)) or np.any(p < lo) or np.any(p > hi):
            raise DomainError(f"strategy of player {j} {p} outside box [{lo}, {hi}]")


def _check_player(game: GameSpec, i: int):
    if not (0 <= i < game.n_players):
        raise DomainError(f"player index {i} out of range for {game.n_players} players")


def _check_grid(game: GameSpec, grid: Grid):
    if grid.dims != game.dims:
        raise DomainError(f"grid dims {grid.dims} do not match game dims {game.dims}")
    for i in range(game.n_players):
        glo, ghi = grid.box(i)
        lo, hi = game.boxes[i]
        if not (np.allclose(glo, lo) and np.allclose(ghi, hi)):
            raise DomainError(f"grid box of player {i} does not cover the strategy box")


def payoff(game: GameSpec, i: int, x, y) -> float:
    """f_i(x, y) at a single profile."""
    _check_player(game, i)
    x = check_parameter(game, x)
    parts = split_profile(game, y)
    _check_in_box(game, parts)
    ys = [p[None, :] for p in parts]
    return float(np.asarray(game.payoffs[i](x, ys), dtype=float).reshape(-1)[0])


def truncate_payoff(value, eps2):
    """Clamp to [-1/eps2, 1/eps2]; identity when eps2 is DISABLED."""
    if eps2 is None:
        return value
    bound = 1.0 / eps2
    if np.ndim(value) == 0:
        return max(-bound, min(float(value), bound))
    return np.clip(value, -bound, bound)


# ---- slice evaluation: player i's candidates against fixed opponents ----

def _slice_inputs(game, i, x, y, grid):
    _check_player(game, i)
    _check_grid(game, grid)
    x = check_parameter(game, x)
    parts = split_profile(game, y)
    _check_in_box(game, parts, skip=i)
    pts = grid.player_points(i)
    ys = [pts if j == i else p[None, :] for j, p in enumerate(parts)]
    return x, ys, pts.shape[0]


def _slice_payoffs(game, i, x, ys, n):
    return np.broadcast_to(np.asarray(game.payoffs[i](x, ys), dtype=float), (n,))


def _slice_feasible(game, i, x, ys, n):
    pred = game.feasibility[i]
    if pred is None:
        return np.ones(n, dtype=bool)
    return np.broadcast_to(np.asarray(pred(x, ys), dtype=bool), (n,))


def feasible_points(game: GameSpec, i: int, x, y, grid: Grid) -> PointSet:
    """Player-i grid points allowed by F_i(x, y_{-i}); ``y_i`` is ignored."""
    x, ys, n = _slice_inputs(game, i, x, y, grid)
    mask = _slice_feasible(game, i, x, ys, n)
    if not mask.any():
        raise InfeasibleError(f"empty feasible set for player {i} at x={x}")
    return PointSet.from_mask(grid, i, mask)


def value_eps(game: GameSpec, i: int, x, y, eps2, grid: Grid) -> float:
    """Grid maximum of the truncated payoff over feasible candidates."""
    x, ys, n = _slice_inputs(game, i, x, y, grid)
    mask = _slice_feasible(game, i, x, ys, n)
    if not mask.any():
        raise InfeasibleError(f"empty feasible set for player {i} at x={x}")
    f = truncate_payoff(_slice_payoffs(game, i, x, ys, n), eps2)
    return float(f[mask].max())


def best_response(game: GameSpec, i: int, x, y, grid: Grid,
                  tie_tol: float = DEFAULT_TIE_TOL) -> PointSet:
    """All feasible grid points within ``tie_tol`` of the grid maximum."""
    x, ys, n = _slice_inputs(game, i, x, y, grid)
    mask = _slice_feasible(game, i, x, ys, n)
    if not mask.any():
        raise InfeasibleError(f"empty feasible set for player {i} at x={x}")
    f = _slice_payoffs(game, i, x, ys, n)
    v = f[mask].max()
    return PointSet.from_mask(grid, i, mask & (f >= v - tie_tol))


def eps_best_response(game: GameSpec, i: int, x, y, eps: EpsilonTriple, grid: Grid,
                      closed: bool = False) -> PointSet:
    """Grid surrogate of the (closed) epsilon-best response of player i.

    Open: truncated payoff > v - eps1 and distance to F_i < eps3.
    Closed: the same with >= and <=.
    """
    x, ys, n = _slice_inputs(game, i, x, y, grid)
    mask = _slice_feasible(game, i, x, ys, n)
    if not mask.any():
        raise InfeasibleError(f"empty feasible set for player {i} at x={x}")
    t = truncate_payoff(_slice_payoffs(game, i, x, ys, n), eps.eps2)
    thr = t[mask].max() - eps.eps1
    good = t >= thr if closed else t > thr
    if eps.eps3 is None:
        near = mask
    else:
        near = np.zeros(n, dtype=bool)
        near[ball_dilate(PointSet.from_mask(grid, i, mask), eps.eps3, closed).indices] = True
    return PointSet.from_mask(grid, i, good & near)


# ---- whole-grid evaluation used by the equilibrium module ----

def grid_inputs(game: GameSpec, grid: Grid) -> list:
    """Per-player point arrays shaped to broadcast over the product grid."""
    _check_grid(game, grid)
    n = grid.n_players
    ys = []
    for i in range(n):
        pts = grid.player_points(i)
        shape = [1] * n + [pts.shape[1]]
        shape[i] = pts.shape[0]
        ys.append(pts.reshape(shape))
    return ys


def payoff_tensor(game: GameSpec, i: int, x, grid: Grid, ys=None) -> np.ndarray:
    ys = grid_inputs(game, grid) if ys is None else ys
    return np.broadcast_to(np.asarray(game.payoffs[i](x, ys), dtype=float), grid.shape)


def feasibility_tensor(game: GameSpec, i: int, x, grid: Grid, ys=None) -> Optional[np.ndarray]:
    """Boolean tensor of F_i membership, or None for the full box.

    Raises InfeasibleError when some opponent profile leaves player i
    without a feasible grid point.
    """
    pred = game.feasibility[i]
    if pred is None:
        return None
    ys = grid_inputs(game, grid) if ys is None else ys
    mask = np.broadcast_to(np.asarray(pred(x, ys), dtype=bool), grid.shape)
    if not mask.any(axis=i).all():
        raise InfeasibleError(f"empty feasible set for player {i} at x={x}")
    return mask


def feasible_distance_tensor(grid: Grid, i: int, feas: np.ndarray) -> np.ndarray:
    """Distance of each candidate of player i to the feasible set in its slice."""
    pts = grid.player_points(i)
    dmat = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    moved = np.moveaxis(feas, i, -1)
    flat = moved.reshape(-1, moved.shape[-1])
    out = np.empty(flat.shape, dtype=float)
    n = pts.shape[0]
    step = max(1, 4_000_000 // (n * n))
    for s in range(0, flat.shape[0], step):
        blk = flat[s:s + step]
        out[s:s + step] = np.where(blk[:, None, :], dmat[None, :, :], np.inf).min(axis=-1)
    return np.moveaxis(out.reshape(moved.shape), -1, i)


def max_along(values: np.ndarray, axis: int, mask: Optional[np.ndarray]) -> np.ndarray:
    if mask is None:
        return values.max(axis=axis, keepdims=True)
    return np.where(mask, values, -np.inf).max(axis=axis, keepdims=True)

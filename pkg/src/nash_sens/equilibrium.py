"""Equilibrium sets by exhaustive fixed-point checks over the product grid."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError
from .game import (DEFAULT_TIE_TOL, EpsilonTriple, GameSpec, check_parameter,
                   feasibility_tensor, feasible_distance_tensor, grid_inputs,
                   max_along, payoff_tensor, truncate_payoff)
from .grids import Grid, ProfileSet, within


def _fixed_point_mask(game: GameSpec, x, grid: Grid, eps: Optional[EpsilonTriple],
                      closed: bool, tie_tol: float) -> np.ndarray:
    x = check_parameter(game, x)
    ys = grid_inputs(game, grid)
    mask = np.ones(grid.shape, dtype=bool)
    for i in range(game.n_players):
        f = payoff_tensor(game, i, x, grid, ys)
        feas = feasibility_tensor(game, i, x, grid, ys)
        if eps is None:
            ok = f >= max_along(f, i, feas) - tie_tol
            if feas is not None:
                ok &= feas
        else:
            t = truncate_payoff(f, eps.eps2)
            thr = max_along(t, i, feas) - eps.eps1
            ok = t >= thr if closed else t > thr
            if feas is not None:
                if eps.eps3 is None:
                    ok &= feas
                else:
                    dist = feasible_distance_tensor(grid, i, feas)
                    ok &= within(dist, eps.eps3, closed, grid.tol)
        mask &= ok
    return mask


def nash_set(game: GameSpec, x, grid: Grid, tie_tol: float = DEFAULT_TIE_TOL) -> ProfileSet:
    """Profiles where every player's strategy is a grid best response.

    May be empty.
    """
    return ProfileSet.from_mask(grid, _fixed_point_mask(game, x, grid, None, False, tie_tol))


def approx_nash_set(game: GameSpec, x, eps: EpsilonTriple, grid: Grid,
                    closed: bool = False) -> ProfileSet:
    """Fixed points of the open (or closed) epsilon-best-response map."""
    return ProfileSet.from_mask(grid, _fixed_point_mask(game, x, grid, eps, closed, 0.0))


def map_parameters(fn: Callable, xs: Sequence, workers: int = 1) -> list:
    """``[fn(x) for x in xs]``, optionally on a thread pool; order is preserved."""
    if workers <= 1 or len(xs) <= 1:
        return [fn(x) for x in xs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, xs))


@dataclass(frozen=True)
class EpsilonSchedule:
    steps: tuple

    def __post_init__(self):
        steps = tuple(self.steps)
        if not steps:
            raise ConfigurationError("epsilon schedule must be nonempty")
        for s in steps:
            if not isinstance(s, EpsilonTriple):
                raise ConfigurationError(f"schedule entries must be EpsilonTriple, got {s!r}")
        for a, b in zip(steps, steps[1:]):
            for name in ("eps1", "eps2", "eps3"):
                va, vb = getattr(a, name), getattr(b, name)
                if (va is None) != (vb is None):
                    raise ConfigurationError(f"{name} cannot switch between active and disabled")
                if va is not None and not vb < va:
                    raise ConfigurationError(f"{name} must strictly decrease along the schedule")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def geometric(cls, start: EpsilonTriple, n_steps: int = 6, ratio: float = 0.5):
        if n_steps < 1 or not 0 < ratio < 1:
            raise ConfigurationError("geometric schedule needs n_steps >= 1 and ratio in (0, 1)")
        return cls(tuple(start.scaled(ratio ** k) for k in range(n_steps)))

    @classmethod
    def from_eps1(cls, values: Sequence[float]):
        return cls(tuple(EpsilonTriple(v) for v in values))

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)


def eps_intersection_limit(game: GameSpec, x, schedule: EpsilonSchedule, grid: Grid,
                           closed: bool = False) -> ProfileSet:
    """Intersection of the approximate equilibrium sets along the schedule."""
    out = None
    for eps in schedule:
        s = approx_nash_set(game, x, eps, grid, closed)
        out = s if out is None else out.intersection(s)
        if not out:
            break
    return out


SANDWICH_LINKS = (("h", "h_eps"), ("h_eps", "h_eps_closed"), ("h_eps_closed", "h_2eps"))


@dataclass
class SandwichReport:
    x: float
    eps: EpsilonTriple
    sets: dict
    flags: dict
    witnesses: dict

    @property
    def ok(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        x = np.asarray(self.x, dtype=float)
        return {
            "x": float(x) if x.ndim == 0 else [float(v) for v in x],
            "eps": self.eps.to_dict(),
            "cardinalities": {k: len(v) for k, v in self.sets.items()},
            "flags": dict(self.flags),
            "witnesses": {k: list(v) for k, v in self.witnesses.items()},
        }


def verify_sandwich(game: GameSpec, x, eps: EpsilonTriple, grid: Grid,
                    tie_tol: float = DEFAULT_TIE_TOL, max_witnesses: int = 20) -> SandwichReport:
    """Check h ⊆ h^eps ⊆ closed h^eps ⊆ h^(2 eps) as index-set inclusions."""
    if not tie_tol < eps.eps1:
        raise DomainError(f"tie_tol ({tie_tol}) must be smaller than eps1 ({eps.eps1})")
    sets = {
        "h": nash_set(game, x, grid, tie_tol),
        "h_eps": approx_nash_set(game, x, eps, grid, closed=False),
        "h_eps_closed": approx_nash_set(game, x, eps, grid, closed=True),
        "h_2eps": approx_nash_set(game, x, eps.scaled(2.0), grid, closed=False),
    }
    flags, witnesses = {}, {}
    for a, b in SANDWICH_LINKS:
        key = f"{a}_subset_{b}"
        missing = sets[a].difference(sets[b])
        flags[key] = len(missing) == 0
        witnesses[key] = [int(i) for i in missing.indices[:max_witnesses]]
    return SandwichReport(x=x, eps=eps, sets=sets, flags=flags, witnesses=witnesses)

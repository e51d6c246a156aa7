"""Finite-tail surrogates of Kuratowski limits and the convergence-chain checks.

For a finite sequence S_0, ..., S_{L-1} with tail start t and radius delta:

* liminf surrogate: grid points within delta of every S_j, j in [t, L);
* limsup surrogate: grid points within delta of some S_j, j in [t, L).

The tail [t, L) stands in for every late tail of the infinite sequence.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .equilibrium import EpsilonSchedule, approx_nash_set, map_parameters, nash_set
from .errors import ConfigurationError, DomainError
from .game import DEFAULT_TIE_TOL, GameSpec, check_parameter
from .grids import (Grid, ProfileSet, contains_within, hausdorff, nearest_distance,
                    neighborhood, violations_within, within)

KINDS = ("harmonic-above", "harmonic-below", "custom")


def _check_sequence(sets, tail_start):
    if len(sets) == 0:
        raise DomainError("need at least one set")
    if not 0 <= tail_start < len(sets):
        raise DomainError(f"tail_start {tail_start} outside [0, {len(sets)})")
    grid = sets[0].grid
    for s in sets[1:]:
        if s.grid != grid:
            raise DomainError("sets reference different grids")
    return grid


def kuratowski_limsup(sets: Sequence[ProfileSet], tail_start: int, delta: float,
                      metric: str = "euclidean") -> ProfileSet:
    grid = _check_sequence(sets, tail_start)
    union = ProfileSet(grid, np.concatenate([s.indices for s in sets[tail_start:]]))
    return neighborhood(union, delta, metric)


def kuratowski_liminf(sets: Sequence[ProfileSet], tail_start: int, delta: float,
                      metric: str = "euclidean") -> ProfileSet:
    grid = _check_sequence(sets, tail_start)
    tail = sets[tail_start:]
    if any(len(s) == 0 for s in tail):
        return ProfileSet(grid)
    # start from the smallest member's neighbourhood and filter against the rest
    order = sorted(range(len(tail)), key=lambda k: len(tail[k]))
    cand = neighborhood(tail[order[0]], delta, metric)
    for k in order[1:]:
        if not cand:
            break
        if delta == 0:
            cand = cand.intersection(tail[k])
            continue
        d = nearest_distance(cand.coords(), tail[k].coords(), grid.dims, metric)
        cand = ProfileSet(grid, cand.indices[within(d, delta, True, grid.tol)])
    return cand


@dataclass(frozen=True)
class ParameterSequence:
    """Deterministic parameter sequence x_n -> limit, n = 1..count."""

    kind: str
    limit: float
    count: int = 50
    scale: float = 1.0
    points: tuple = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"sequence kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "custom":
            object.__setattr__(self, "points", tuple(float(p) for p in self.points))
            object.__setattr__(self, "count", len(self.points))
        if int(self.count) != self.count or self.count < 2:
            raise ConfigurationError(f"sequence needs at least 2 points, got {self.count}")

    @classmethod
    def parse(cls, text: str, scale: float = 1.0) -> "ParameterSequence":
        """Parse ``KIND:LIMIT:SIDE:COUNT`` such as ``harmonic:1:above:50``."""
        parts = text.split(":")
        if len(parts) != 4 or parts[0] != "harmonic" or parts[2] not in ("above", "below"):
            raise ConfigurationError(f"sequence must look like harmonic:LIMIT:above|below:COUNT, got {text!r}")
        try:
            limit, count = float(parts[1]), int(parts[3])
        except ValueError:
            raise ConfigurationError(f"malformed sequence descriptor {text!r}") from None
        return cls(f"harmonic-{parts[2]}", limit, count, scale)

    def values(self) -> np.ndarray:
        if self.kind == "custom":
            return np.array(self.points, dtype=float)
        n = np.arange(1, self.count + 1, dtype=float)
        sign = 1.0 if self.kind == "harmonic-above" else -1.0
        return self.limit + sign * self.scale / n

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "limit": self.limit, "count": self.count}
        if self.kind == "custom":
            d["points"] = list(self.points)
        else:
            d["scale"] = self.scale
        return d


@dataclass
class LimitReport:
    sequence: dict
    closed: bool
    tail_start: int
    delta: float
    limit_set: ProfileSet
    liminf: ProfileSet
    limsup: ProfileSet
    distances: dict
    rows: list = field(default_factory=list)
    final_intersection: Optional[ProfileSet] = None
    verdicts: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def to_dict(self) -> dict:
        out = {
            "sequence": self.sequence,
            "variant": "closed" if self.closed else "open",
            "tail_start": self.tail_start,
            "delta": self.delta,
            "limit_set_size": len(self.limit_set),
            "liminf_size": len(self.liminf),
            "limsup_size": len(self.limsup),
            "distances": dict(self.distances),
            "rows": [dict(r) for r in self.rows],
            "verdicts": dict(self.verdicts),
        }
        if self.final_intersection is not None:
            out["final_intersection_size"] = len(self.final_intersection)
            out["final_intersection_hausdorff"] = hausdorff(self.final_intersection, self.limit_set)
        return out

    def trajectory_csv(self) -> str:
        buf = io.StringIO()
        buf.write("eps1,eps2,eps3,liminf_size,limsup_size,hausdorff_liminf,hausdorff_limsup\n")
        for r in self.rows:
            vals = [r["eps1"], r["eps2"], r["eps3"], r["liminf_size"], r["limsup_size"],
                    r["hausdorff_liminf"], r["hausdorff_limsup"]]
            buf.write(",".join(_fmt(v) for v in vals) + "\n")
        return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return "off"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def _nonincreasing(values) -> bool:
    return all(b <= a for a, b in zip(values, values[1:]))


def verify_figure1_chain(game: GameSpec, seq: ParameterSequence, schedule: EpsilonSchedule,
                         grid: Grid, delta: Optional[float] = None,
                         tail_start: Optional[int] = None, tie_tol: float = DEFAULT_TIE_TOL,
                         closed: bool = False, workers: int = 1,
                         metric: str = "euclidean") -> LimitReport:
    """Check the ordering of limits of exact and approximate equilibrium sets.

    Only the tail ``[tail_start, count)`` of the sequence is evaluated; the
    head cannot influence the surrogates.
    """
    xs = seq.values()
    try:
        for x in xs:
            check_parameter(game, x)
        check_parameter(game, seq.limit)
    except DomainError as e:
        raise DomainError(f"sequence leaves the parameter box: {e}") from None
    delta = grid.spacing if delta is None else float(delta)
    tail_start = len(xs) // 2 if tail_start is None else int(tail_start)
    if not 0 <= tail_start < len(xs):
        raise DomainError(f"tail_start {tail_start} outside [0, {len(xs)})")
    tail = list(xs[tail_start:])

    limit_set = nash_set(game, seq.limit, grid, tie_tol)
    exact = map_parameters(lambda x: nash_set(game, x, grid, tie_tol), tail, workers)
    liminf = kuratowski_liminf(exact, 0, delta, metric)
    limsup = kuratowski_limsup(exact, 0, delta, metric)

    verdicts = {
        "liminf_within_limsup": contains_within(liminf, limsup, delta, metric),
        "limsup_within_limit": contains_within(limsup, limit_set, delta, metric),
    }
    distances = {
        "hausdorff_liminf": hausdorff(liminf, limit_set, metric),
        "hausdorff_limsup": hausdorff(limsup, limit_set, metric),
    }

    rows, inf_trace, sup_trace = [], [], []
    final = None
    for eps in schedule:
        approx = map_parameters(lambda x: approx_nash_set(game, x, eps, grid, closed), tail, workers)
        lo = kuratowski_liminf(approx, 0, delta, metric)
        hi = kuratowski_limsup(approx, 0, delta, metric)
        final = lo if final is None else final.intersection(lo)
        d_lo, d_hi = hausdorff(lo, limit_set, metric), hausdorff(hi, limit_set, metric)
        inf_trace.append(d_lo)
        sup_trace.append(d_hi)
        tag = f"eps1={eps.eps1:.17g}"
        verdicts[f"{tag}:liminf_within_limsup"] = contains_within(lo, hi, delta, metric)
        verdicts[f"{tag}:limit_within_liminf"] = contains_within(limit_set, lo, delta, metric)
        rows.append({
            "eps1": eps.eps1, "eps2": eps.eps2, "eps3": eps.eps3,
            "liminf_size": len(lo), "limsup_size": len(hi),
            "hausdorff_liminf": d_lo, "hausdorff_limsup": d_hi,
            "limit_missing_from_liminf": len(violations_within(limit_set, lo, delta, metric)),
        })
    verdicts["liminf_distance_nonincreasing"] = _nonincreasing(inf_trace)
    verdicts["limsup_distance_nonincreasing"] = _nonincreasing(sup_trace)

    return LimitReport(sequence=seq.to_dict(), closed=closed, tail_start=tail_start, delta=delta,
                       limit_set=limit_set, liminf=liminf, limsup=limsup, distances=distances,
                       rows=rows, final_intersection=final, verdicts=verdicts)


def verify_closed_variant_limits(game: GameSpec, seq: ParameterSequence,
                                 schedule: EpsilonSchedule, grid: Grid, delta=None,
                                 **kwargs) -> LimitReport:
    """:func:`verify_figure1_chain` with the closed approximate equilibria."""
    return verify_figure1_chain(game, seq, schedule, grid, delta, closed=True, **kwargs)

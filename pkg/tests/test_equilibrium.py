import itertools

import numpy as np
import pytest

from nash_sens.equilibrium import (EpsilonSchedule, approx_nash_set, eps_intersection_limit,
                                   nash_set, verify_sandwich)
from nash_sens.errors import ConfigurationError, DomainError, InfeasibleError
from nash_sens.game import EpsilonTriple, GameSpec, best_response, eps_best_response, payoff
from nash_sens.games import random_quadratic_game
from nash_sens.grids import ProfileSet, hausdorff
from nash_sens.oracles import near_boundary, oracle_h, oracle_h_eps

from conftest import unit_grid


def brute_force_fixed_points(game, x, grid, response):
    """Independent per-profile re-check through the single-player routines."""
    members = []
    sizes = grid.player_sizes
    for combo in itertools.product(*(range(n) for n in sizes)):
        y = [grid.player_points(i)[k] for i, k in enumerate(combo)]
        if all(combo[i] in response(i, y) for i in range(game.n_players)):
            members.append(int(np.ravel_multi_index(combo, sizes)))
    return ProfileSet(grid, members)


# exact equilibria -------------------------------------------------------------

def test_nash_set_below_one(game):
    g = unit_grid(101)
    h = nash_set(game, 0.5, g)
    h_ = g.spacing
    # the grid game has one extra equilibrium (h, h): at y2 = h player 1's
    # maximizer x*y2 = h/2 sits midway between 0 and h, so both tie exactly
    assert payoff(game, 0, 0.5, (0.0, h_)) == payoff(game, 0, 0.5, (h_, h_))
    assert h == ProfileSet.from_points(g, [(0, 0), (h_, h_)])
    assert hausdorff(h, oracle_h(0.5).sample(g)) <= 2 * h_


def test_nash_set_above_one(game):
    g = unit_grid(101)
    h_ = g.spacing
    assert nash_set(game, 1.5, g) == ProfileSet.from_points(g, [(0, 0), (h_, h_), (1, 1)])
    assert nash_set(game, 1.75, g) == ProfileSet.from_points(g, [(0, 0), (1, 1)])


def test_nash_set_at_one_is_diagonal(game):
    g = unit_grid(101)
    h = nash_set(game, 1.0, g)
    assert h == oracle_h(1.0).sample(g)
    assert len(h) == 101


@pytest.mark.parametrize("x", [0.0, 0.3, 0.75, 1.0, 1.25, 1.6, 2.0])
def test_nash_set_matches_brute_force_motivating(game, x, grid21):
    br = lambda i, y: best_response(game, i, x, y, grid21)
    assert nash_set(game, x, grid21) == brute_force_fixed_points(game, x, grid21, br)


@pytest.mark.parametrize("seed,players,dims,pts", [(0, 2, 1, 21), (1, 2, 2, 5), (2, 3, 1, 9),
                                                   (3, 2, 1, 21), (4, 3, 1, 7)])
def test_nash_set_matches_brute_force_random(seed, players, dims, pts):
    gm = random_quadratic_game(seed, players, dims, 1.5)
    g = unit_grid(pts, players, dims)
    x = 0.37 + seed * 0.3
    br = lambda i, y: best_response(gm, i, x, y, g)
    assert nash_set(gm, x, g) == brute_force_fixed_points(gm, x, g, br)


@pytest.mark.parametrize("closed", [False, True])
@pytest.mark.parametrize("eps", [EpsilonTriple(0.02), EpsilonTriple(0.05, 0.4, None)])
def test_approx_set_matches_brute_force(closed, eps):
    gm = random_quadratic_game(11, 2, 1, 2.0)
    g = unit_grid(15)
    resp = lambda i, y: eps_best_response(gm, i, 0.8, y, eps, g, closed)
    assert approx_nash_set(gm, 0.8, eps, g, closed) == brute_force_fixed_points(gm, 0.8, g, resp)


def _constrained_game():
    base = random_quadratic_game(5, 2, 1, 2.0)
    # player 0 may not exceed player 1 by more than 0.2
    feas = lambda x, ys: ys[0][..., 0] <= ys[1][..., 0] + 0.2
    return GameSpec(boxes=base.boxes, payoffs=base.payoffs, feasibility=(feas, None),
                    param_box=base.param_box)


@pytest.mark.parametrize("closed", [False, True])
def test_approx_set_with_dilation_matches_brute_force(closed):
    gm = _constrained_game()
    g = unit_grid(11)
    eps = EpsilonTriple(0.05, None, 0.1)
    resp = lambda i, y: eps_best_response(gm, i, 1.1, y, eps, g, closed)
    assert approx_nash_set(gm, 1.1, eps, g, closed) == brute_force_fixed_points(gm, 1.1, g, resp)
    br = lambda i, y: best_response(gm, i, 1.1, y, g)
    assert nash_set(gm, 1.1, g) == brute_force_fixed_points(gm, 1.1, g, br)


def test_infeasibility_propagates():
    base = random_quadratic_game(5, 2, 1, 2.0)
    gm = GameSpec(boxes=base.boxes, payoffs=base.payoffs,
                  feasibility=(lambda x, ys: ys[0][..., 0] > 2.0, None))
    with pytest.raises(InfeasibleError):
        nash_set(gm, 0.5, unit_grid(5))


# approximate equilibria against the closed forms -----------------------------------

def _off_boundary_mismatch(approx, oracle, grid):
    diff = approx.symmetric_difference(oracle.sample(grid))
    c = diff.coords()
    return diff.indices[~near_boundary(oracle, c[:, 0], c[:, 1], grid.spacing)]


def test_approx_set_region_A(game, grid201):
    s = approx_nash_set(game, 0.5, EpsilonTriple(0.01), grid201)
    assert oracle_h_eps(0.5, 0.01).labels == ("A",)
    assert _off_boundary_mismatch(s, oracle_h_eps(0.5, 0.01), grid201).size == 0


def test_approx_set_regions_A_B1(game, grid201):
    o = oracle_h_eps(1.2, 0.01)
    assert o.labels == ("A", "B1")
    s = approx_nash_set(game, 1.2, EpsilonTriple(0.01), grid201)
    assert _off_boundary_mismatch(s, o, grid201).size == 0


def test_approx_set_vacuous(game, grid21):
    assert approx_nash_set(game, 1.0, EpsilonTriple(10.0), grid21) == ProfileSet.full(grid21)


# epsilon limit ------------------------------------------------------------------

def test_intersection_limit_shrinks_to_nash_set(game, grid201):
    sched = EpsilonSchedule.from_eps1([0.1, 0.01, 0.001])
    lim = eps_intersection_limit(game, 0.5, sched, grid201)
    sets = [approx_nash_set(game, 0.5, e, grid201) for e in sched]
    assert lim == sets[-1]
    dists = [hausdorff(s, oracle_h(0.5).sample(grid201)) for s in sets]
    assert dists == sorted(dists, reverse=True)
    # A(0.5) at eps=1e-3 reaches y2 < 4 sqrt(1e-3), y1 within sqrt(1e-3) of the band
    assert dists[-1] < 4 * np.sqrt(1e-3) * np.sqrt(2) + grid201.spacing
    assert nash_set(game, 0.5, grid201).issubset(lim)


def test_intersection_limit_single_step(game, grid21):
    sched = EpsilonSchedule.from_eps1([0.03])
    assert eps_intersection_limit(game, 1.3, sched, grid21) == approx_nash_set(
        game, 1.3, EpsilonTriple(0.03), grid21)


def _cyclic_game():
    # player 1 copies y2, player 2 plays 1 - y1; the only fixed point (1/2, 1/2)
    # is missing from grids with an even number of points
    f1 = lambda x, ys: -(ys[0][..., 0] - ys[1][..., 0]) ** 2
    f2 = lambda x, ys: -(ys[1][..., 0] - 1.0 + ys[0][..., 0]) ** 2
    return GameSpec(boxes=(([0.0], [1.0]), ([0.0], [1.0])), payoffs=(f1, f2))


def test_intersection_limit_empty_nash_set():
    gm = _cyclic_game()
    g = unit_grid(10)
    assert len(nash_set(gm, 0.0, g)) == 0
    sched = EpsilonSchedule.geometric(EpsilonTriple(0.2), 8)
    sizes = [len(approx_nash_set(gm, 0.0, e, g)) for e in sched]
    assert sizes == sorted(sizes, reverse=True)
    assert sizes[0] > 0
    # brute force: (y1, y2) is an eps-equilibrium iff (y1-y2)^2 < eps and (y1+y2-1)^2 < eps
    pts = g.player_points(0)[:, 0]
    for e, n in zip(sched, sizes):
        expect = sum(1 for a in pts for b in pts if (a - b) ** 2 < e.eps1 and (a + b - 1) ** 2 < e.eps1)
        assert n == expect
    assert len(eps_intersection_limit(gm, 0.0, sched, g)) == 0


def test_schedule_validation():
    with pytest.raises(ConfigurationError):
        EpsilonSchedule(())
    with pytest.raises(ConfigurationError):
        EpsilonSchedule.from_eps1([0.1, 0.1])
    with pytest.raises(ConfigurationError):
        EpsilonSchedule((EpsilonTriple(0.1, 0.5), EpsilonTriple(0.05)))
    geo = EpsilonSchedule.geometric(EpsilonTriple(0.16, 0.4, 0.2))
    assert len(geo) == 6
    assert geo.steps[-1].eps1 == pytest.approx(0.005)
    assert geo.steps[-1].eps2 == pytest.approx(0.0125)


@pytest.mark.parametrize("seed", range(4))
def test_approx_sets_monotone_along_schedule(seed):
    gm = random_quadratic_game(seed, 2, 1, 1.0)
    g = unit_grid(31)
    sched = EpsilonSchedule.geometric(EpsilonTriple(0.2, 0.5, None), 5)
    sets = [approx_nash_set(gm, 0.9, e, g) for e in sched]
    for big, small in zip(sets, sets[1:]):
        assert small.issubset(big)


# sandwich ---------------------------------------------------------------------

def test_sandwich_motivating(game, grid201):
    rep = verify_sandwich(game, 1.5, EpsilonTriple(0.01), grid201)
    assert rep.ok
    assert all(not w for w in rep.witnesses.values())


def test_sandwich_vacuous(game, grid21):
    rep = verify_sandwich(game, 0.7, EpsilonTriple(50.0), grid21)
    assert rep.ok
    assert all(len(s) == grid21.size for k, s in rep.sets.items() if k != "h")


def test_sandwich_strict_at_one(game, grid201):
    rep = verify_sandwich(game, 1.0, EpsilonTriple(0.04), grid201)
    assert rep.ok
    extra = rep.sets["h_eps"].difference(rep.sets["h"])
    assert len(extra) > 0
    c = extra.coords()
    assert np.all(c[:, 0] != c[:, 1])
    assert np.all(oracle_h_eps(1.0, 0.04).contains(c[:, 0], c[:, 1])
                  | near_boundary(oracle_h_eps(1.0, 0.04), c[:, 0], c[:, 1], grid201.spacing))


def test_sandwich_with_dilation_and_truncation():
    gm = _constrained_game()
    g = unit_grid(41)
    for x in (0.2, 1.1, 1.9):
        assert verify_sandwich(gm, x, EpsilonTriple(0.03, 0.3, 0.05), g).ok


def test_sandwich_requires_small_tie_tol(game, grid21):
    with pytest.raises(DomainError):
        verify_sandwich(game, 1.0, EpsilonTriple(0.01), grid21, tie_tol=0.01)


def test_sandwich_report_dict(game, grid21):
    d = verify_sandwich(game, 1.0, EpsilonTriple(0.01), grid21).to_dict()
    assert set(d["cardinalities"]) == {"h", "h_eps", "h_eps_closed", "h_2eps"}
    assert d["cardinalities"]["h"] == 21
    assert all(d["flags"].values())

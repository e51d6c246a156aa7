import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nash_sens.equilibrium import EpsilonSchedule, approx_nash_set, nash_set
from nash_sens.errors import ConfigurationError, DomainError
from nash_sens.game import EpsilonTriple
from nash_sens.grids import ProfileSet, contains_within, neighborhood
from nash_sens.setlimits import (ParameterSequence, kuratowski_liminf, kuratowski_limsup,
                                 verify_closed_variant_limits, verify_figure1_chain)

from conftest import unit_grid


def test_constant_sequence():
    g = unit_grid(11)
    s = ProfileSet.from_points(g, [(0.2, 0.3), (0.8, 0.8)])
    seq = [s] * 5
    assert kuratowski_liminf(seq, 2, 0.0) == s
    assert kuratowski_limsup(seq, 2, 0.0) == s
    assert kuratowski_liminf(seq, 0, 0.1) == neighborhood(s, 0.1)


def test_alternating_sequence():
    g = unit_grid(11)
    a = ProfileSet.from_points(g, [(0.0, 0.0)])
    b = ProfileSet.from_points(g, [(1.0, 1.0)])
    seq = [a, b] * 4
    assert len(kuratowski_liminf(seq, 3, 0.1)) == 0
    assert kuratowski_limsup(seq, 3, 0.0) == a.union(b)


def test_empty_member_empties_liminf():
    g = unit_grid(11)
    s = ProfileSet.full(g)
    seq = [s, s, ProfileSet(g), s]
    assert len(kuratowski_liminf(seq, 1, 0.5)) == 0
    assert kuratowski_limsup(seq, 1, 0.0) == s


def test_converging_points():
    g = unit_grid(101)
    seq = [ProfileSet.from_points(g, [(0.5 + round(1 / n, 2), 0.5)]) for n in range(2, 40)]
    target = ProfileSet.from_points(g, [(0.5, 0.5)])
    lo = kuratowski_liminf(seq, 20, 0.05)
    assert target.issubset(lo)


def test_argument_errors():
    g = unit_grid(5)
    with pytest.raises(DomainError):
        kuratowski_liminf([], 0, 0.1)
    with pytest.raises(DomainError):
        kuratowski_limsup([ProfileSet(g)], 1, 0.1)
    with pytest.raises(DomainError):
        kuratowski_liminf([ProfileSet(g), ProfileSet(unit_grid(6))], 0, 0.1)


def _random_sets(seed, n_sets, pts=9):
    g = unit_grid(pts)
    rng = np.random.default_rng(seed)
    return [ProfileSet.from_mask(g, rng.random(g.shape) < rng.uniform(0.02, 0.3))
            for _ in range(n_sets)]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(1, 8), delta=st.floats(0.0, 0.5))
def test_liminf_within_limsup(seed, n, delta):
    sets = _random_sets(seed, n)
    t = seed % n
    assert kuratowski_liminf(sets, t, delta).issubset(kuratowski_limsup(sets, t, delta))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n=st.integers(2, 8), d1=st.floats(0.0, 0.3),
       d2=st.floats(0.0, 0.3))
def test_monotone_in_delta_and_tail(seed, n, d1, d2):
    sets = _random_sets(seed, n)
    lo, hi = sorted((d1, d2))
    assert kuratowski_liminf(sets, 0, lo).issubset(kuratowski_liminf(sets, 0, hi))
    assert kuratowski_limsup(sets, 0, lo).issubset(kuratowski_limsup(sets, 0, hi))
    # later tails drop constraints from liminf and members from limsup
    assert kuratowski_liminf(sets, 0, lo).issubset(kuratowski_liminf(sets, n - 1, lo))
    assert kuratowski_limsup(sets, n - 1, lo).issubset(kuratowski_limsup(sets, 0, lo))


def test_sequence_parse():
    s = ParameterSequence.parse("harmonic:1:above:50")
    assert s.kind == "harmonic-above" and s.count == 50
    v = s.values()
    assert v[0] == 2.0 and v[-1] == pytest.approx(1.02)
    b = ParameterSequence.parse("harmonic:1:below:4", scale=0.5).values()
    assert np.allclose(b, [0.5, 0.75, 1 - 0.5 / 3, 0.875])
    c = ParameterSequence("custom", 1.0, points=(0.2, 0.3))
    assert c.count == 2 and list(c.values()) == [0.2, 0.3]
    assert c.to_dict() == {"kind": "custom", "limit": 1.0, "count": 2, "points": [0.2, 0.3]}


@pytest.mark.parametrize("text", ["harmonic:1:left:5", "harmonic:one:above:5", "geo:1:above:5",
                                  "harmonic:1:above", "harmonic:1:above:1"])
def test_sequence_parse_errors(text):
    with pytest.raises(ConfigurationError):
        ParameterSequence.parse(text)


SCHEDULE = EpsilonSchedule.from_eps1([0.16, 0.08, 0.04, 0.02, 0.01])


@pytest.mark.slow
@pytest.mark.parametrize("side", ["above", "below"])
def test_figure1_chain_motivating(game, grid201, side):
    seq = ParameterSequence.parse(f"harmonic:1:{side}:50")
    rep = verify_figure1_chain(game, seq, SCHEDULE, grid201)
    assert rep.ok, rep.verdicts
    assert rep.tail_start == 25
    assert len(rep.rows) == 5
    assert all(r["limit_missing_from_liminf"] == 0 for r in rep.rows)
    traj = [r["hausdorff_liminf"] for r in rep.rows]
    assert traj == sorted(traj, reverse=True)
    assert contains_within(rep.limsup, rep.limit_set, rep.delta)
    d = rep.to_dict()
    assert d["variant"] == "open" and d["limit_set_size"] == 201
    assert rep.trajectory_csv().count("\n") == 6


def test_figure1_chain_detects_missing_limit(game):
    g = unit_grid(41)
    seq = ParameterSequence("custom", 1.0, points=(0.2, 0.3))
    rep = verify_figure1_chain(game, seq, EpsilonSchedule.from_eps1([0.02]), g, tail_start=0)
    assert not rep.verdicts["eps1=0.02:limit_within_liminf"]
    assert not rep.ok


def test_closed_liminf_contains_open(game):
    g = unit_grid(61)
    xs = ParameterSequence.parse("harmonic:1:above:20").values()[10:]
    for e in (0.08, 0.02):
        eps = EpsilonTriple(e)
        op = [approx_nash_set(game, x, eps, g) for x in xs]
        cl = [approx_nash_set(game, x, eps, g, closed=True) for x in xs]
        assert kuratowski_liminf(op, 0, g.spacing).issubset(kuratowski_liminf(cl, 0, g.spacing))


def test_closed_constant_sequence(game):
    g = unit_grid(61)
    eps = EpsilonTriple(0.03)
    seq = ParameterSequence("custom", 1.5, points=(1.5,) * 6)
    rep = verify_closed_variant_limits(game, seq, EpsilonSchedule((eps,)), g, delta=0.0)
    assert rep.closed
    assert rep.final_intersection == approx_nash_set(game, 1.5, eps, g, closed=True)
    assert rep.liminf == nash_set(game, 1.5, g)


def test_sequence_outside_parameter_box(game):
    seq = ParameterSequence.parse("harmonic:1.9:above:10")
    with pytest.raises(DomainError):
        verify_figure1_chain(game, seq, SCHEDULE, unit_grid(11))

"""Limits along x_n -> 1 for exact and approximate equilibrium sets.

Exact sets jump at x = 1: along x_n = 1 - 1/n they stay at the origin,
so their limit misses most of the diagonal h(1).  The approximate sets
contain h(1) in the limit and shrink towards it as eps goes to 0.
"""
from nash_sens.equilibrium import EpsilonSchedule
from nash_sens.games import motivating_game
from nash_sens.grids import GridSpec, build_grid
from nash_sens.setlimits import ParameterSequence, verify_figure1_chain

game = motivating_game()
grid = build_grid(GridSpec.uniform(2, 201))
schedule = EpsilonSchedule.from_eps1([0.16, 0.08, 0.04, 0.02, 0.01])

for side in ("below", "above"):
    seq = ParameterSequence.parse(f"harmonic:1:{side}:50")
    rep = verify_figure1_chain(game, seq, schedule, grid)
    print(f"x_n = 1 {'-' if side == 'below' else '+'} 1/n, tail n = {rep.tail_start + 1}..50")
    print(f"  exact sets: d_H(limsup, h(1)) = {rep.distances['hausdorff_limsup']:.4f}")
    print(f"  {'eps1':>6} {'liminf':>8} {'limsup':>8} {'d_H inf':>8} {'d_H sup':>8}")
    for r in rep.rows:
        print(f"  {r['eps1']:6.3f} {r['liminf_size']:8d} {r['limsup_size']:8d} "
              f"{r['hausdorff_liminf']:8.4f} {r['hausdorff_limsup']:8.4f}")
    print("  all verdicts true:", rep.ok)

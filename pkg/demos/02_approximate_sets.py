"""Approximate equilibrium sets against their closed-form regions.

For each (x, eps) the grid set is compared with the region formulas; any
disagreement should hug a region boundary, within one grid spacing.
"""
from nash_sens.equilibrium import approx_nash_set
from nash_sens.game import EpsilonTriple
from nash_sens.games import motivating_game
from nash_sens.grids import GridSpec, build_grid
from nash_sens.oracles import near_boundary, oracle_h_eps, regime_boundary

game = motivating_game()
grid = build_grid(GridSpec.uniform(2, 201))

for eps in (0.04, 0.01):
    print(f"eps = {eps}: regimes switch at x = {regime_boundary(eps):.4f}")
    for x in (0.5, 1.0, 1.2, 1.3, 1.5):
        s = approx_nash_set(game, x, EpsilonTriple(eps), grid)
        o = oracle_h_eps(x, eps)
        diff = s.symmetric_difference(o.sample(grid))
        c = diff.coords()
        off = int((~near_boundary(o, c[:, 0], c[:, 1], grid.spacing)).sum())
        print(f"  x={x:4.2f} regions={'+'.join(o.labels):8s} size={len(s):6d} "
              f"diffs={len(diff):4d} off-band={off}")

# the closed variant adds the points with exact equality on the threshold
op = approx_nash_set(game, 1.5, EpsilonTriple(0.01), grid)
cl = approx_nash_set(game, 1.5, EpsilonTriple(0.01), grid, closed=True)
print(f"\nx=1.5, eps=0.01: open {len(op)}, closed {len(cl)}, open within closed: {op.issubset(cl)}")

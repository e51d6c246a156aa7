"""Exact equilibria of the motivating game as the parameter crosses x = 1.

Below 1 the only equilibrium is the origin, at 1 the whole diagonal is in
equilibrium, above 1 the corner (1, 1) joins the origin.  The grid picture
follows that, apart from a few extra profiles near the origin where grid
best responses tie.
"""
import numpy as np

from nash_sens.equilibrium import nash_set
from nash_sens.games import motivating_game
from nash_sens.grids import GridSpec, build_grid, hausdorff
from nash_sens.oracles import oracle_h

game = motivating_game()
grid = build_grid(GridSpec.uniform(2, 201))

print(f"{'x':>6} {'count':>6} {'d_H to closed form':>20}  profiles")
for x in np.linspace(0, 2, 9):
    h = nash_set(game, x, grid)
    d = hausdorff(h, oracle_h(x).sample(grid))
    shown = [tuple(round(float(v), 3) for v in c) for c in h.coords()[:4]]
    more = " ..." if len(h) > 4 else ""
    print(f"{x:6.2f} {len(h):6d} {d:20.5f}  {shown}{more}")

# the tie at x = 0.75: with y2 = h, player 1's exact best response is 0.75 h,
# which sits closer to h than to 0, but at y2 = 2h it is 1.5 h, midway
# between h and 2h, so both are grid best responses
h = nash_set(game, 0.75, grid)
print("\nx = 0.75 grid equilibria:", [tuple(float(v) for v in c) for c in h.coords()])

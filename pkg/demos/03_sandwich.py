"""The inclusion chain h ⊆ h^eps ⊆ closed h^eps ⊆ h^(2 eps), on a few games."""
from nash_sens.equilibrium import verify_sandwich
from nash_sens.game import EpsilonTriple
from nash_sens.games import motivating_game, random_quadratic_game
from nash_sens.grids import GridSpec, build_grid

grid = build_grid(GridSpec.uniform(2, 101))
rep = verify_sandwich(motivating_game(), 1.5, EpsilonTriple(0.01), grid)
print("motivating game, x = 1.5")
for k, s in rep.sets.items():
    print(f"  {k:14s} {len(s):6d} profiles")
print("  flags:", rep.flags)

# truncation barely matters for bounded payoffs, but exercise it anyway
for seed in range(5):
    gm = random_quadratic_game(seed, players=3)
    g = build_grid(GridSpec.uniform(3, 11))
    r = verify_sandwich(gm, 0.8, EpsilonTriple(0.05, 0.25), g)
    sizes = ", ".join(f"{k}={len(v)}" for k, v in r.sets.items())
    print(f"quadratic seed {seed}: ok={r.ok}  {sizes}")

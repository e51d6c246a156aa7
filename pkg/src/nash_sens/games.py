"""Built-in games and the name registry used by the command line driver."""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .game import GameSpec


def _motivating_f1(x, ys):
    y1, y2 = ys[0][..., 0], ys[1][..., 0]
    return -y1 * (y1 - 2.0 * x * y2)


def _motivating_f2(x, ys):
    y1, y2 = ys[0][..., 0], ys[1][..., 0]
    return -y2 * (y2 - 2.0 * y1)


def motivating_game() -> GameSpec:
    """Two players on [0, 1] with parameter x in [0, 2].

    f1 = -y1 (y1 - 2 x y2), f2 = -y2 (y2 - 2 y1); best responses are
    min(x y2, 1) and y1.
    """
    # |f1| <= y1 * max(y1, 2 x y2) <= 4 on the box, |f2| <= 2
    return GameSpec(
        boxes=(([0.0], [1.0]), ([0.0], [1.0])),
        payoffs=(_motivating_f1, _motivating_f2),
        param_box=([0.0], [2.0]),
        payoff_bound=4.0,
        name="motivating",
    )


class _QuadraticPayoff:
    """-sum a_k y_ik^2 + y_i . (B y_-i + x c + d) + g . y_-i, written elementwise."""

    def __init__(self, i, dims, a, B, c, d, g):
        self.i, self.dims = i, dims
        self.a, self.B, self.c, self.d, self.g = a, B, c, d, g

    def __call__(self, x, ys):
        x = float(np.asarray(x, dtype=float).reshape(-1)[0])
        own = ys[self.i]
        others = [ys[j][..., k] for j in range(len(ys)) if j != self.i
                  for k in range(self.dims[j])]
        total = 0.0
        for k in range(self.dims[self.i]):
            yk = own[..., k]
            lin = self.d[k] + x * self.c[k]
            for m, om in enumerate(others):
                lin = lin + self.B[k, m] * om
            total = total + yk * (lin - self.a[k] * yk)
        for m, om in enumerate(others):
            total = total + self.g[m] * om
        return total


def random_quadratic_game(seed: int, players: int = 2, dims_per_player: int = 1,
                          coeff_range: float = 1.0) -> GameSpec:
    """Seeded game with strictly concave quadratic payoffs on [0, 1] boxes.

    All coefficients lie in [-coeff_range, coeff_range]; the own-quadratic
    weights are drawn from [coeff_range / 2, coeff_range] so each payoff is
    strictly concave in the player's own strategy (for coeff_range > 0).
    The parameter x lives in [0, 2].
    """
    if int(players) != players or players < 1:
        raise ConfigurationError(f"players must be a positive integer, got {players}")
    if int(dims_per_player) != dims_per_player or dims_per_player < 1:
        raise ConfigurationError(f"dims_per_player must be a positive integer, got {dims_per_player}")
    if not coeff_range >= 0:
        raise ConfigurationError(f"coeff_range must be nonnegative, got {coeff_range}")
    rng = np.random.default_rng(seed)
    r = float(coeff_range)
    dims = (int(dims_per_player),) * int(players)
    n_other = sum(dims) - dims_per_player
    payoffs = []
    for i in range(players):
        a = rng.uniform(r / 2, r, size=dims_per_player)
        B = rng.uniform(-r, r, size=(dims_per_player, n_other))
        c = rng.uniform(-r, r, size=dims_per_player)
        d = rng.uniform(-r, r, size=dims_per_player)
        g = rng.uniform(-r, r, size=n_other)
        payoffs.append(_QuadraticPayoff(i, dims, a, B, c, d, g))
    # crude bound on |f| over [0,1]^n x [0,2]
    bound = r * (dims_per_player * (1 + 2 * n_other + 3) + n_other)
    return GameSpec(
        boxes=tuple(([0.0] * dims_per_player, [1.0] * dims_per_player) for _ in range(players)),
        payoffs=tuple(payoffs),
        param_box=([0.0], [2.0]),
        payoff_bound=bound,
        name=f"quadratic:{seed}:{players}:{dims_per_player}",
    )


def get_game(name: str, seed: int = 0) -> GameSpec:
    """Resolve ``motivating`` or ``quadratic[:seed[:players[:dims]]]``."""
    parts = name.split(":")
    if parts[0] == "motivating" and len(parts) == 1:
        return motivating_game()
    if parts[0] == "quadratic" and len(parts) <= 4:
        try:
            nums = [int(p) for p in parts[1:]]
        except ValueError:
            raise ConfigurationError(f"malformed game name {name!r}") from None
        defaults = [seed, 2, 1]
        nums = nums + defaults[len(nums):]
        return random_quadratic_game(nums[0], nums[1], nums[2])
    raise ConfigurationError(f"unknown game {name!r}")

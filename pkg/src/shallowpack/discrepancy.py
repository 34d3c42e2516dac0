"""Two-coloring evaluation and size-sensitive discrepancy predictors.

Evaluation and baselines only: the low-discrepancy construction itself
(partial coloring via the entropy method) is out of scope.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .seeding import spawn
from .setsystem import SetSystem


@dataclass(frozen=True)
class Coloring:
    """Signs in {-1, +1}, one per ground element."""

    n: int
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.signs) != self.n:
            raise ValueError("need exactly n signs")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be -1 or +1")

    def negate(self) -> "Coloring":
        return Coloring(self.n, tuple(-s for s in self.signs))


def random_coloring(n: int, seed: int) -> Coloring:
    """Independent uniform +-1 signs."""
    if n < 0:
        raise ValueError("n must be >= 0")
    rng = spawn(seed, "coloring", n)
    signs = rng.integers(0, 2, size=n) * 2 - 1
    return Coloring(n, tuple(int(s) for s in signs))


def eval_coloring(sys: SetSystem, chi: Coloring) -> tuple[np.ndarray, int]:
    """Signed sums chi(S) for every set, and their max absolute value."""
    if chi.n != sys.n:
        raise ValueError("ground-set size mismatch")
    if len(sys) == 0:
        return np.zeros(0, dtype=np.int64), 0
    sums = sys.bool_matrix() @ np.asarray(chi.signs, dtype=np.int64)
    return sums, int(np.abs(sums).max())


def bound_disc_halfspaces(s: int, n: int, d: int) -> float:
    """Size-sensitive discrepancy predictor for halfspaces in dimension d >= 3.

    Even d >= 4: s^(1/4) * n^(1/4 - 1/(2d)) * log2(n)^(1/(2d)).
    Odd d >= 5:  s^(1/4 + 1/(4d)) * n^(1/4 - 3/(4d)) * log2(n)^(1/(2d)).
    d = 3:       s^(1/3) * log2(n)^(7/6).
    Unit constants; log base 2.
    """
    if d < 3:
        raise ValueError("predictor defined for d >= 3")
    if not 0 <= s <= n:
        raise ValueError("need 0 <= s <= n")
    if n < 2:
        raise ValueError("need n >= 2")
    lg = math.log2(n)
    if d == 3:
        return s ** (1 / 3) * lg ** (7 / 6)
    if d % 2 == 0:
        return s**0.25 * n ** (0.25 - 1 / (2 * d)) * lg ** (1 / (2 * d))
    return s ** (0.25 + 1 / (4 * d)) * n ** (0.25 - 3 / (4 * d)) * lg ** (1 / (2 * d))

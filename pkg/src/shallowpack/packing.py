"""Separated subsets of set systems: greedy and exact packings, closed-form
bound predictors, and log-log scaling experiments against the predictors.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import kernels
from .seeding import spawn
from .setsystem import (
    BudgetError,
    CsParams,
    PointSet,
    SetSystem,
    build_balls,
    build_halfspaces,
    build_rectangle_grid_dual,
    build_slabs,
    convex_position_points,
    random_points,
)


@dataclass(frozen=True)
class Packing:
    """A separated subset of a system's rows.

    Separation is pairwise distance > delta in strict mode, >= delta
    otherwise (both conventions appear in practice; see the module tests).
    """

    system: SetSystem
    member_indices: tuple[int, ...]
    delta: int
    strict: bool

    def __len__(self) -> int:
        return len(self.member_indices)

    def subsystem(self) -> SetSystem:
        return self.system.subsystem(self.member_indices)

    def verify(self) -> bool:
        """Exhaustively re-check pairwise separation of the members."""
        idx = list(self.member_indices)
        if len(idx) < 2:
            return True
        words = self.system.words[idx]
        d = kernels.min_pairwise_distance(words)
        return d > self.delta if self.strict else d >= self.delta


def _scan_order(m: int, seed: int) -> np.ndarray:
    if seed == 0:
        return np.arange(m, dtype=np.int64)
    return spawn(seed, "greedy_order", m).permutation(m).astype(np.int64)


def greedy_packing(
    sys: SetSystem, delta: int, strict: bool = True, order_seed: int = 0
) -> Packing:
    """Maximal separated subset by greedy scan.

    Scan order is canonical order for seed 0, a seeded permutation otherwise.
    The result is maximal: no excluded row can be added without violating
    separation.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    m = len(sys)
    if m == 0:
        return Packing(sys, (), delta, strict)
    order = _scan_order(m, order_seed)
    kept = kernels.greedy_select(sys.words, sys.lengths, order, delta, strict)
    return Packing(sys, tuple(int(i) for i in sorted(kept)), delta, strict)


def max_packing_bruteforce(
    sys: SetSystem, delta: int, strict: bool = True, budget: int = 24
) -> Packing:
    """Exact maximum separated subset via branch and bound.

    Maximum independent set in the conflict graph (edges join pairs that
    violate separation), with bitmask candidate sets; systems above
    ``budget`` rows are rejected.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    m = len(sys)
    if m > budget:
        raise BudgetError(f"{m} rows exceed the exact-packing budget ({budget})")
    if m == 0:
        return Packing(sys, (), delta, strict)
    dm = kernels.pairwise_distances(sys.words)
    conflict = (dm <= delta) if strict else (dm < delta)
    np.fill_diagonal(conflict, False)
    adj = [int(sum(1 << j for j in range(m) if conflict[i, j])) for i in range(m)]
    best_mask = 0
    best_size = 0

    def grow(chosen: int, size: int, cand: int) -> None:
        nonlocal best_mask, best_size
        if size + cand.bit_count() <= best_size:
            return
        if cand == 0:
            if size > best_size:
                best_size, best_mask = size, chosen
            return
        v = (cand & -cand).bit_length() - 1
        grow(chosen | (1 << v), size + 1, cand & ~adj[v] & ~(1 << v))
        grow(chosen, size, cand & ~(1 << v))

    grow(0, 0, (1 << m) - 1)
    members = tuple(i for i in range(m) if best_mask >> i & 1)
    return Packing(sys, members, delta, strict)


def shallow_filter(sys: SetSystem, k: int) -> SetSystem:
    """Subsystem of rows with length at most k."""
    if not 0 <= k <= sys.n:
        raise ValueError("k out of range")
    idx = np.nonzero(sys.lengths <= k)[0]
    return sys.subsystem(idx)


def bound_packing(n: int, delta: int, params: CsParams) -> float:
    """Packing-number predictor (n/delta)^d, unit constant."""
    if not 1 <= delta <= n:
        raise ValueError("need 1 <= delta <= n")
    return (n / delta) ** params.d


def bound_shallow_packing(n: int, k: int, delta: int, params: CsParams) -> float:
    """Shallow packing predictor n^d1 * k^(d-d1) / delta^d, unit constant.

    Requires k >= delta/2: below that threshold any two rows of length <= k
    are closer than delta and the packing is empty.
    """
    if not 1 <= delta <= n:
        raise ValueError("need 1 <= delta <= n")
    if k < delta / 2:
        raise ValueError("need k >= delta/2 (otherwise the packing is empty)")
    return n**params.d1 * k ** (params.d - params.d1) / delta**params.d


# ---------------------------------------------------------------------------
# scaling experiments


@dataclass(frozen=True)
class SweepSpec:
    """One swept variable with the rest fixed.

    vary: one of 'n', 'k', 'delta'; values: the swept grid; fixed: values for
    the non-swept parameters.
    """

    vary: str
    values: tuple[int, ...]
    n: int = 0
    k: int = 0
    delta: int = 0
    strict: bool = True

    def __post_init__(self):
        if self.vary not in ("n", "k", "delta"):
            raise ValueError("vary must be one of n, k, delta")
        if len(self.values) < 3:
            raise ValueError("need at least 3 swept values to fit a slope")

    def configurations(self) -> list[tuple[int, int, int]]:
        out = []
        for v in self.values:
            n, k, d = self.n, self.k, self.delta
            if self.vary == "n":
                n = v
            elif self.vary == "k":
                k = v
            else:
                d = v
            if k < d / 2:
                raise ValueError(f"configuration (n={n}, k={k}, delta={d}) has k < delta/2")
            out.append((n, k, d))
        return out


@dataclass
class ScalingRow:
    generator: str
    n: int
    k: int
    delta: int
    trials: int
    packing_size: int
    bound: float


@dataclass
class ScalingReport:
    rows: list[ScalingRow] = field(default_factory=list)
    swept: str = ""
    slope: float = float("nan")
    slope_se: float = float("nan")
    predicted_slope: float = float("nan")

    CSV_HEADER = "generator,n,k,delta,trials,packing_size,bound,slope,slope_se"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for r in self.rows:
            lines.append(
                f"{r.generator},{r.n},{r.k},{r.delta},{r.trials},"
                f"{r.packing_size},{r.bound!r},{self.slope!r},{self.slope_se!r}"
            )
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "swept": self.swept,
            "slope": self.slope,
            "slope_se": self.slope_se,
            "predicted_slope": self.predicted_slope,
            "rows": [vars(r) for r in self.rows],
        }


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float]:
    """OLS slope and standard error of log2(y) against log2(x)."""
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    lx = np.log2(np.asarray(xs, dtype=float))
    ly = np.log2(np.asarray(ys, dtype=float))
    if not (np.isfinite(lx).all() and np.isfinite(ly).all()):
        raise ValueError("values must be positive and finite")
    xm = lx - lx.mean()
    denom = float((xm**2).sum())
    if denom == 0:
        raise ValueError("swept values must be distinct")
    slope = float((xm * (ly - ly.mean())).sum() / denom)
    resid = ly - (ly.mean() + slope * xm)
    dof = len(xs) - 2
    se = math.sqrt(float((resid**2).sum()) / dof / denom) if dof > 0 else 0.0
    return slope, se


_GENERATORS: dict[str, Callable[[PointSet], SetSystem]] = {
    "halfplanes": build_halfspaces,
    "halfspaces": build_halfspaces,
    "balls": build_balls,
    "slabs": build_slabs,
}


def _generate(
    generator: str, n: int, dim: int, seed: int, support: str = "uniform"
) -> SetSystem:
    if generator == "grid":
        raise ValueError("grid systems are built per (n, delta); handled by caller")
    try:
        build = _GENERATORS[generator]
    except KeyError:
        raise ValueError(f"unknown generator '{generator}'") from None
    if support == "uniform":
        pts = random_points(n, dim, seed)
    elif support == "circle":
        if dim != 2:
            raise ValueError("circle support is planar")
        pts = convex_position_points(n, seed)
    else:
        raise ValueError(f"unknown point support '{support}'")
    return build(pts)


def _best_greedy_size(
    shallow: SetSystem, delta: int, strict: bool, trials: int, max_workers: int
) -> int:
    """Max greedy-packing size over scan-order seeds 0..trials-1.

    Trial results only feed a max, so parallel execution stays deterministic;
    caches are primed up front because SetSystem lazies are not lock-guarded.
    """
    if len(shallow) == 0:
        return 0
    shallow.words, shallow.lengths  # noqa: B018 - prime lazy caches
    if max_workers <= 1 or trials == 1:
        return max(
            len(greedy_packing(shallow, delta, strict, t)) for t in range(trials)
        )
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        sizes = pool.map(
            lambda t: len(greedy_packing(shallow, delta, strict, t)), range(trials)
        )
        return max(sizes)


def scaling_experiment(
    generator: str,
    sweep: SweepSpec,
    trials: int,
    seed: int,
    dim: int = 2,
    params: CsParams | None = None,
    support: str = "uniform",
    max_workers: int = 1,
) -> ScalingReport:
    """Greedy-packing sizes across a one-variable sweep, with a fitted slope.

    For each configuration: build the system (cached per ground-set size),
    keep rows of length <= k, take the best greedy packing over ``trials``
    scan orders, and record it next to the closed-form bound.  The slope of
    log(size) against log(swept value) estimates the bound's exponent.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if params is None:
        params = CsParams(d=2.0, d1=1.0, d0=3)
    report = ScalingReport(swept=sweep.vary)
    cache: dict[tuple, SetSystem] = {}
    for n, k, delta in sweep.configurations():
        if generator == "grid":
            key = ("grid", n, delta)
            if key not in cache:
                cache[key] = build_rectangle_grid_dual(n, delta)
            base = cache[key]
        else:
            key = (generator, n, support)
            if key not in cache:
                cache[key] = _generate(generator, n, dim, seed, support)
            base = cache[key]
        shallow = shallow_filter(base, k)
        best = _best_greedy_size(shallow, delta, sweep.strict, trials, max_workers)
        bound = bound_shallow_packing(n, k, delta, params)
        report.rows.append(
            ScalingRow(generator, n, k, delta, trials, best, bound)
        )
    swept_values = {
        "n": [r.n for r in report.rows],
        "k": [r.k for r in report.rows],
        "delta": [r.delta for r in report.rows],
    }[sweep.vary]
    sizes = [max(r.packing_size, 1) for r in report.rows]
    report.slope, report.slope_se = fit_loglog(swept_values, sizes)
    report.predicted_slope = {
        "n": params.d1,
        "k": params.d - params.d1,
        "delta": -params.d,
    }[sweep.vary]
    return report

"""Acceptance suite: one test per criterion, at the stated tolerances.

Each test prints a single [PASS] line (visible with ``pytest -s``) carrying
the measured quantity and its runtime budget.  Run via:

    pytest tests/test_acceptance.py -v -s
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_system
from shallowpack import kernels
from shallowpack.measures import brute_force_measure, traverse_and_measure
from shallowpack.packing import (
    SweepSpec,
    greedy_packing,
    scaling_experiment,
    shallow_filter,
)
from shallowpack.sampling import (
    SampleParams,
    compact_projection_experiment,
    conditional_variance_sum,
    decay_tail_experiment,
    epsilon_net_experiment,
    hypergeom_pmf,
    projection_expectation_check,
    relative_approx_experiment,
    relative_approximation_size,
    symmetric_difference_system,
)
from shallowpack.seeding import spawn
from shallowpack.setsystem import (
    CsParams,
    build_halfspaces,
    build_rectangle_grid_dual,
    clustered_points,
    random_points,
    vc_dimension_exact,
)
from shallowpack.spanning import bound_tree_conflict, exact_mst


class _Budget:
    def __init__(self, seconds: float):
        self.limit = seconds
        self.start = time.monotonic()

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def check(self) -> float:
        elapsed = self.elapsed
        assert elapsed < self.limit, f"runtime {elapsed:.1f}s exceeds {self.limit}s"
        return elapsed


def _report(num: int, label: str, detail: str, budget: _Budget) -> None:
    elapsed = budget.check()
    print(f"[PASS] criterion {num} ({label}): {detail} ({elapsed:.1f}s < {budget.limit:.0f}s)")


def test_criterion_01_grid_lower_bound_exact():
    budget = _Budget(1.0)
    details = []
    for n, delta in ((16, 2), (64, 4), (256, 8)):
        system = build_rectangle_grid_dual(n, delta)
        expected = (n // delta) ** 2
        assert len(system) == expected, (n, delta, len(system))
        assert (system.lengths == delta).all()
        min_dist = kernels.min_pairwise_distance(system.words)
        assert min_dist >= delta
        details.append(f"(n={n},d={delta})->{len(system)} cells,min_dist={min_dist}")
    _report(1, "grid lower bound", "; ".join(details), budget)


def test_criterion_02_delta_exponent_halfplanes():
    budget = _Budget(60.0)
    sweep = SweepSpec(vary="delta", values=(4, 8, 16, 32), n=512, k=64, strict=True)
    report = scaling_experiment(
        "halfplanes", sweep, trials=8, seed=1, support="circle",
        params=CsParams(2, 1, 3),
    )
    assert -2.5 <= report.slope <= -1.5, report.slope
    sizes = [r.packing_size for r in report.rows]
    _report(2, "delta exponent", f"sizes={sizes} slope={report.slope:.3f} in [-2.5,-1.5]", budget)


def test_criterion_03_k_exponent_halfplanes():
    budget = _Budget(60.0)
    sweep = SweepSpec(vary="k", values=(16, 32, 64, 128), n=512, delta=8, strict=True)
    report = scaling_experiment(
        "halfplanes", sweep, trials=8, seed=1, support="circle",
        params=CsParams(2, 1, 3),
    )
    assert 0.5 <= report.slope <= 1.5, report.slope
    sizes = [r.packing_size for r in report.rows]
    _report(3, "k exponent", f"sizes={sizes} slope={report.slope:.3f} in [0.5,1.5]", budget)


def test_criterion_04_exponential_decay_exact():
    budget = _Budget(5.0)
    report = decay_tail_experiment(
        32, 8, 9, [2 * math.e, 8.0, 12.0], trials=10_000, seed=7
    )
    details = []
    for row in report.rows:
        assert row.exact < row.bound, (row.t, row.exact, row.bound)
        sigma = math.sqrt(row.exact * (1 - row.exact) / report.trials)
        assert abs(row.empirical - row.exact) <= 3 * sigma + 1e-15
        details.append(f"t={row.t:.2f}:exact={row.exact:.2e}<bound={row.bound:.2e}")
    _report(4, "exponential decay", "; ".join(details), budget)


def test_criterion_05_pmf_normalization_exact():
    budget = _Budget(5.0)
    checked = 0
    for n in range(1, 21):
        for sample in range(0, n + 1):
            for v_len in range(0, n + 1):
                total = sum(
                    hypergeom_pmf(n, sample, v_len, s)
                    for s in range(0, min(v_len, sample) + 1)
                )
                assert total == Fraction(1), (n, sample, v_len)
                checked += 1
    _report(5, "pmf normalization", f"{checked} (n,sample,v_len) triples sum to 1 exactly", budget)


def test_criterion_06_conditional_variance_bound():
    budget = _Budget(30.0)
    rng = np.random.Generator(np.random.PCG64(606))
    violations = 0
    for _ in range(200):
        n = int(rng.integers(2, 11))
        m = int(rng.integers(1, min(2**n, 256) + 1))
        system = random_system(rng, n, m)
        if conditional_variance_sum(system) > vc_dimension_exact(system) + 1e-9:
            violations += 1
    assert violations == 0
    _report(6, "conditional variance", "200 systems, 0 violations of sum<=vc_dim", budget)


def test_criterion_07_projection_inequality():
    budget = _Budget(60.0)
    violations = 0
    worst = 0.0
    for point_seed in range(10):
        points = random_points(128, 2, seed=point_seed)
        halfplanes = build_halfspaces(points)
        for delta in (4, 8):
            packing = greedy_packing(halfplanes, delta, strict=True, order_seed=0)
            check = projection_expectation_check(
                packing.subsystem(), delta, d0=3, trials=400, seed=70 + point_seed
            )
            if not check.holds(3.0):
                violations += 1
            worst = max(worst, check.lhs / check.rhs)
    assert violations == 0
    _report(
        7,
        "projection inequality",
        f"20 packings, 0 violations, worst lhs/rhs={worst:.3f}",
        budget,
    )


def test_criterion_08_net_and_approximation_success():
    budget = _Budget(120.0)
    points = random_points(128, 2, seed=11)
    halfplanes = build_halfspaces(points)
    delta = 32
    packing = greedy_packing(halfplanes, delta, strict=True, order_seed=0).subsystem()
    params = SampleParams(epsilon=delta / 128, eta=0.25, q=0.25, c=4.0)

    diff = symmetric_difference_system(packing)
    net = epsilon_net_experiment(diff, params, d=3.0, trials=200, seed=80)
    assert net.frequency >= 0.5, net.frequency
    assert net.sample_size < 128  # the net itself is a proper subsample

    approx = relative_approx_experiment(packing, params, d=3.0, trials=200, seed=81)
    assert approx.frequency >= 0.5, approx.frequency
    full_fallback = relative_approximation_size(params, 3.0) >= 128
    _report(
        8,
        "net/approx success",
        f"net freq={net.frequency:.2f} (size {net.sample_size}/128), "
        f"approx freq={approx.frequency:.2f} (full-set fallback={full_fallback})",
        budget,
    )


def test_criterion_09_compact_projection_joint():
    budget = _Budget(120.0)
    points = random_points(128, 2, seed=11)
    halfplanes = build_halfspaces(points)
    delta, k = 24, 48
    packing = greedy_packing(shallow_filter(halfplanes, k), delta, strict=True).subsystem()
    freqs = compact_projection_experiment(packing, delta, k, d=2.0, trials=200, seed=90)
    assert freqs["joint"] >= 0.5, freqs
    assert 0 < freqs["sample_size"] < 128
    _report(
        9,
        "compact projection",
        f"joint freq={freqs['joint']:.2f} (inj={freqs['injective']:.2f}, "
        f"len={freqs['length']:.2f}, sample {freqs['sample_size']}/128)",
        budget,
    )


def _prufer_min_tree_weight(dm: np.ndarray) -> int:
    m = dm.shape[0]
    if m == 1:
        return 0
    best = None
    for seq in itertools.product(range(m), repeat=m - 2):
        degree = [1] * m
        for v in seq:
            degree[v] += 1
        import heapq

        heap = [i for i in range(m) if degree[i] == 1]
        heapq.heapify(heap)
        weight = 0
        for v in seq:
            leaf = heapq.heappop(heap)
            weight += int(dm[leaf, v])
            degree[v] -= 1
            if degree[v] == 1:
                heapq.heappush(heap, v)
        a = heapq.heappop(heap)
        b = heapq.heappop(heap)
        weight += int(dm[a, b])
        if best is None or weight < best:
            best = weight
    return best


def test_criterion_10_mst_exactness():
    budget = _Budget(10.0)
    rng = np.random.Generator(np.random.PCG64(1010))
    checked = 0
    for _ in range(50):
        m = int(rng.integers(2, 7))
        system = random_system(rng, 10, m)
        tree = exact_mst(system)
        dm = kernels.pairwise_distances(system.words)
        assert tree.total_conflict == _prufer_min_tree_weight(dm)
        checked += 1
    _report(10, "mst exactness", f"{checked} systems match full tree enumeration", budget)


def test_criterion_11_tree_conflict_trend():
    budget = _Budget(120.0)
    ratios = []
    for factor in (1, 2, 4):
        n, k, m = 64 * factor, 16 * factor, 64 * factor
        points = random_points(n, 2, seed=21)
        base = shallow_filter(build_halfspaces(points), k)
        if len(base) > m:
            rng = spawn(21, "subsample", n)
            base = base.subsystem(np.sort(rng.permutation(len(base))[:m]))
        tree = exact_mst(base)
        bound = bound_tree_conflict(n, k, len(base), CsParams(2, 1, 3))
        ratios.append(tree.total_conflict / bound)
    spread = max(ratios) / min(ratios)
    assert spread <= 4.0, ratios
    _report(
        11,
        "tree conflict trend",
        f"ratios={[f'{r:.3f}' for r in ratios]} spread={spread:.2f} <= 4",
        budget,
    )


def test_criterion_12_measures_framework():
    budget = _Budget(30.0)
    points = clustered_points(64, 2, seed=9)
    base = shallow_filter(build_halfspaces(points), 16)
    rng = spawn(9, "subsample", len(base))
    system = base.subsystem(np.sort(rng.permutation(len(base))[:100]))
    assert len(system) == 100
    tree = exact_mst(system)
    root_len = int(system.lengths.max())
    brute_total = 2 * int(system.lengths.sum())
    details = []
    for measure, tol in (("diameter", 0.0), ("bbox", 0.0), ("seb", 1e-9)):
        walked = traverse_and_measure(system, tree, points, measure)
        brute = brute_force_measure(system, points, measure)
        for a, b in zip(walked.values, brute.values):
            assert abs(a - b) <= tol, (measure, a, b)
        assert walked.total_updates == root_len + 2 * tree.total_conflict
        assert brute.total_updates == brute_total
        assert walked.total_updates < brute_total
        details.append(f"{measure}:{walked.total_updates}<{brute_total}")
    _report(12, "measures framework", "; ".join(details), budget)


def test_criterion_13_declared_out_of_reach():
    budget = _Budget(1.0)
    declared = (
        "approximate-MST asymptotic runtimes (range counting + dynamic ANN)",
        "coreset-based measure runtimes (dynamic coreset structure)",
        "size-sensitive discrepancy exponents (entropy-method coloring)",
        "iteration constants of the refined packing recursion",
    )
    _report(
        13,
        "declared non-reproducible",
        "covered by property suites instead: " + "; ".join(declared),
        budget,
    )

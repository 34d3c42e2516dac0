"""Random index sampling and its guarantees.

Covers the sample-size formulas used by packing arguments, epsilon-nets and
relative approximations with their verifiers, exact hypergeometric tails for
the projected-length decay bound, conditional-variance sums, and the
projection expectation inequality |V| <= (d0+1) E[|V restricted to I|].

Sample-size formulas use the natural logarithm; iterated logarithms are
base 2.  Exact probability arithmetic is rational (fractions.Fraction);
float comparisons carry a 1e-12 slack.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .seeding import spawn
from .setsystem import (
    BudgetError,
    IndexSample,
    SetSystem,
    projection_count,
    vc_dimension_exact,
)

_SLACK = 1e-12


@dataclass(frozen=True)
class SampleParams:
    """Parameters of the approximation-sample size formulas."""

    epsilon: float
    eta: float = 0.25
    q: float = 0.25
    c: float = 4.0

    def __post_init__(self):
        for name in ("epsilon", "eta", "q"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1)")
        if self.c <= 0:
            raise ValueError("c must be positive")


# ---------------------------------------------------------------------------
# sample sizes


def haussler_sample_size(d0: int, n: int, delta: int) -> int:
    """ceil((2*d0+2)*(n+1) / (delta + 2*d0 + 2)).

    Requires n >= max(d0, delta).  The result is <= n whenever
    delta * n >= 2*d0 + 2; at delta = 0 it degenerates to n + 1 (the
    size-(m-1) sample is then the full index set).
    """
    if d0 < 1:
        raise ValueError("d0 must be >= 1")
    if delta < 0:
        raise ValueError("delta must be >= 0")
    if n < max(d0, delta):
        raise ValueError("need n >= max(d0, delta)")
    return math.ceil((2 * d0 + 2) * (n + 1) / (delta + 2 * d0 + 2))


def iterated_log2(x: float, j: int) -> float:
    """j-fold iterated base-2 logarithm."""
    if j < 1:
        raise ValueError("j must be >= 1")
    for _ in range(j):
        if x <= 0:
            raise ValueError("iterated logarithm underflows")
        x = math.log2(x)
    return x


def iterated_sample_size(m: int, n: int, delta: int, j: int) -> int:
    """ceil(m * log2^(j)(n/delta)); errors when the iterated log drops below 1."""
    if m < 1 or delta < 1 or n < delta:
        raise ValueError("need m >= 1 and 1 <= delta <= n")
    x = iterated_log2(n / delta, j)
    if x < 1:
        raise ValueError("iterated logarithm below 1; no further iterations")
    return math.ceil(m * x)


def draw_sample(n: int, size: int, seed: int) -> IndexSample:
    """Uniform random size-subset of [0, n), without replacement.

    Seeded partial Fisher-Yates shuffle; deterministic given (n, size, seed).
    """
    if not 0 <= size <= n:
        raise ValueError("need 0 <= size <= n")
    rng = spawn(seed, "draw_sample", n, size)
    arr = np.arange(n)
    for i in range(size):
        j = i + int(rng.integers(0, n - i))
        arr[i], arr[j] = arr[j], arr[i]
    return IndexSample(n, tuple(sorted(int(v) for v in arr[:size])))


# ---------------------------------------------------------------------------
# epsilon-nets and relative approximations


def _shatter_dim(sys: SetSystem, d: float | None) -> float:
    if d is not None:
        if d < 1:
            raise ValueError("d must be >= 1")
        return float(d)
    return float(max(1, vc_dimension_exact(sys)))


def epsilon_net_size(params: SampleParams, d: float) -> int:
    return math.ceil(
        params.c * (d * math.log(1 / params.epsilon) + math.log(1 / params.q)) / params.epsilon
    )


def epsilon_net(
    sys: SetSystem, params: SampleParams, seed: int, d: float | None = None
) -> IndexSample:
    """Sampled candidate epsilon-net; verify_epsilon_net is the check.

    Draws c*(d*ln(1/eps) + ln(1/q))/eps indices without replacement; when the
    formula exceeds n, the full index set is returned (trivially a net).
    """
    dim = _shatter_dim(sys, d)
    size = epsilon_net_size(params, dim)
    if size >= sys.n:
        return IndexSample(sys.n, tuple(range(sys.n)))
    return draw_sample(sys.n, size, seed)


def verify_epsilon_net(sys: SetSystem, sample: IndexSample, epsilon: float) -> bool:
    """True iff every vector of length >= n*epsilon has a set bit inside I."""
    if sample.n != sys.n:
        raise ValueError("ground-set size mismatch")
    if len(sys) == 0:
        return True
    long = sys.lengths >= sys.n * epsilon - _SLACK
    if not long.any():
        return True
    idx = np.asarray(sample.indices, dtype=np.int64)
    if idx.size == 0:
        return False
    hits = sys.bool_matrix()[:, idx].any(axis=1)
    return bool(hits[long].all())


def relative_approximation_size(params: SampleParams, d: float) -> int:
    return math.ceil(
        params.c
        * (d * math.log(1 / params.epsilon) + math.log(1 / params.q))
        / (params.epsilon * params.eta**2)
    )


def relative_approximation(
    sys: SetSystem, params: SampleParams, seed: int, d: float | None = None
) -> IndexSample:
    """Sampled candidate relative (epsilon, eta)-approximation."""
    dim = _shatter_dim(sys, d)
    size = relative_approximation_size(params, dim)
    if size >= sys.n:
        return IndexSample(sys.n, tuple(range(sys.n)))
    return draw_sample(sys.n, size, seed)


def verify_relative_approximation(
    sys: SetSystem, sample: IndexSample, epsilon: float, eta: float
) -> bool:
    """Check both branches of the relative-approximation definition.

    For every vector: |density in sample - density in ground set| must be at
    most eta * density when density >= epsilon, and at most eta * epsilon
    otherwise.
    """
    if sample.n != sys.n:
        raise ValueError("ground-set size mismatch")
    if len(sys) == 0:
        return True
    if len(sample) == 0:
        return False
    idx = np.asarray(sample.indices, dtype=np.int64)
    dens = sys.lengths / sys.n
    sample_dens = sys.bool_matrix()[:, idx].sum(axis=1) / len(sample)
    err = np.abs(sample_dens - dens)
    heavy = dens >= epsilon - _SLACK
    ok_heavy = err[heavy] <= eta * dens[heavy] + _SLACK
    ok_light = err[~heavy] <= eta * epsilon + _SLACK
    return bool(ok_heavy.all() and ok_light.all())


def symmetric_difference_system(sys: SetSystem) -> SetSystem:
    """System of XORs of all distinct row pairs (the pair-difference family)."""
    m = len(sys)
    if m < 2:
        return SetSystem.empty(sys.n)
    ii, jj = np.triu_indices(m, k=1)
    xored = sys.packed[ii] ^ sys.packed[jj]
    return SetSystem(sys.n, xored)


# ---------------------------------------------------------------------------
# compact projection (injective + short sample)


@dataclass(frozen=True)
class CompactProjectionDiagnostics:
    sample_size: int
    injective: bool
    max_projected_length: int
    length_bound: float

    @property
    def length_ok(self) -> bool:
        return self.max_projected_length <= self.length_bound + _SLACK

    @property
    def joint_ok(self) -> bool:
        return self.injective and self.length_ok


def compact_projection_size(n: int, delta: int, d: float, c: float = 4.0) -> int:
    if not 1 <= delta < n:
        raise ValueError("need 1 <= delta < n")
    ratio = n / delta
    return math.ceil(c * d * ratio * math.log(ratio))


def compact_projection(
    sys: SetSystem,
    delta: int,
    k: int,
    seed: int,
    d: float | None = None,
    c: float = 4.0,
) -> tuple[IndexSample, CompactProjectionDiagnostics]:
    """Sample meant to keep separated short vectors distinct and short.

    Preconditions: pairwise distances exceed delta, all lengths <= k, and
    k >= delta/2.  Draws c*d*(n/delta)*ln(n/delta) indices; the diagnostics
    report (i) injectivity of the projection and (ii) the max projected
    length against (3/2) * k * |I1| / n.
    """
    if len(sys) == 0:
        raise ValueError("empty system")
    if k < delta / 2:
        raise ValueError("need k >= delta/2")
    if int(sys.lengths.max()) > k:
        raise ValueError("system is not k-shallow")
    if len(sys) >= 2 and kernels.min_pairwise_distance(sys.words) <= delta:
        raise ValueError("system is not delta-separated")
    dim = _shatter_dim(sys, d)
    size = compact_projection_size(sys.n, delta, dim, c)
    if size >= sys.n:
        sample = IndexSample(sys.n, tuple(range(sys.n)))
    else:
        sample = draw_sample(sys.n, size, seed)
    idx = np.asarray(sample.indices, dtype=np.int64)
    sub = sys.bool_matrix()[:, idx]
    injective = projection_count(sys, idx) == len(sys)
    max_len = int(sub.sum(axis=1).max()) if idx.size else 0
    bound = 1.5 * k * len(sample) / sys.n
    return sample, CompactProjectionDiagnostics(len(sample), injective, max_len, bound)


# ---------------------------------------------------------------------------
# hypergeometric machinery


def hypergeom_pmf(n: int, sample_size: int, v_len: int, s: int) -> Fraction:
    """P[|v restricted to a uniform sample| = s], exactly.

    C(v_len, s) * C(n - v_len, sample_size - s) / C(n, sample_size); zero
    outside the support.
    """
    if not (0 <= sample_size <= n and 0 <= v_len <= n):
        raise ValueError("inconsistent parameters")
    if s < 0 or s > min(v_len, sample_size) or sample_size - s > n - v_len:
        return Fraction(0)
    return Fraction(
        math.comb(v_len, s) * math.comb(n - v_len, sample_size - s),
        math.comb(n, sample_size),
    )


def hypergeom_tail(n: int, sample_size: int, v_len: int, threshold: float) -> Fraction:
    """P[count >= threshold], summed exactly over the integer support."""
    lo = max(0, math.ceil(threshold - _SLACK))
    hi = min(v_len, sample_size)
    total = Fraction(0)
    for s in range(lo, hi + 1):
        total += hypergeom_pmf(n, sample_size, v_len, s)
    return total


@dataclass
class TailRow:
    t: float
    threshold: float
    empirical: float
    exact: float
    bound: float


@dataclass
class TailReport:
    rows: list[TailRow] = field(default_factory=list)
    trials: int = 0

    CSV_HEADER = "t,empirical,exact,bound"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        lines.extend(
            f"{r.t!r},{r.empirical!r},{r.exact!r},{r.bound!r}" for r in self.rows
        )
        return "\n".join(lines) + "\n"


def decay_tail_experiment(
    n: int,
    k: int,
    m_j: int,
    t_grid: Sequence[float],
    trials: int,
    seed: int,
) -> TailReport:
    """Projected-length tail of a worst-case length-k vector vs. its bound.

    For each t >= 2e: the exact probability (rational hypergeometric sum)
    that a uniform (m_j - 1)-sample hits >= t*k*(m_j-1)/n of a fixed k-subset,
    an empirical frequency over ``trials`` samples, and the bound
    2^(-t*k*(m_j-1)/n).
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    if not 1 <= m_j <= n + 1:
        raise ValueError("need 1 <= m_j <= n+1")
    sample_size = m_j - 1
    if k * sample_size == 0:
        raise ValueError("k*(m_j-1) must be positive")
    floor_t = 2 * math.e
    for t in t_grid:
        if t < floor_t - _SLACK:
            raise ValueError("every t must be >= 2e")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = spawn(seed, "decay_tail", n, k, m_j)
    # uniform samples without replacement: first sample_size slots of a
    # random permutation; the worst-case vector occupies indices < k
    hits = np.empty(trials, dtype=np.int64)
    for tr in range(trials):
        perm = rng.permutation(n)[:sample_size]
        hits[tr] = int((perm < k).sum())
    report = TailReport(trials=trials)
    for t in t_grid:
        threshold = t * k * sample_size / n
        exact = hypergeom_tail(n, sample_size, k, threshold)
        empirical = float((hits >= threshold - _SLACK).mean())
        bound = 2.0 ** (-t * k * sample_size / n)
        report.rows.append(TailRow(float(t), threshold, empirical, float(exact), bound))
    return report


# ---------------------------------------------------------------------------
# conditional variance and the projection expectation inequality


def conditional_variance_sum(sys: SetSystem, budget_n: int = 12, budget_m: int = 4096) -> float:
    """Sum over coordinates of Var(bit_i | all other bits), uniform over rows.

    Exact: rows are grouped by their pattern outside coordinate i; each group
    contributes weight * p * (1 - p) with p the in-group frequency of bit i.
    """
    if sys.n > budget_n or len(sys) > budget_m:
        raise BudgetError("system too large for exact conditional variance")
    m = len(sys)
    if m == 0:
        raise ValueError("empty system")
    mat = sys.bool_matrix()
    total = 0.0
    cols = np.arange(sys.n)
    for i in range(sys.n):
        rest = mat[:, cols != i]
        groups: dict[bytes, list[int]] = {}
        for r in range(m):
            key = rest[r].tobytes()
            entry = groups.setdefault(key, [0, 0])
            entry[0] += 1
            entry[1] += int(mat[r, i])
        for cnt, ones in groups.values():
            p = ones / cnt
            total += (cnt / m) * p * (1.0 - p)
    return total


@dataclass(frozen=True)
class ProjectionCheck:
    """Both sides of |V| <= (d0+1) * E[|V projected onto an (m-1)-sample|]."""

    lhs: int
    mean_projection: float
    se: float
    d0: int
    m: int
    trials: int
    exact: bool

    @property
    def rhs(self) -> float:
        return (self.d0 + 1) * self.mean_projection

    @property
    def rhs_se(self) -> float:
        return (self.d0 + 1) * self.se

    def holds(self, sigmas: float = 3.0) -> bool:
        return self.lhs <= self.rhs + sigmas * self.rhs_se + _SLACK

    def csv_row(self) -> str:
        return f"{self.lhs},{self.rhs!r},{self.rhs_se!r},{self.trials}"


def projection_expectation_check(
    sys: SetSystem,
    delta: int,
    d0: int,
    trials: int,
    seed: int,
    exact_limit: int = 100_000,
) -> ProjectionCheck:
    """Estimate E[|V projected onto a uniform (m-1)-sample|] against |V|.

    The system must be strictly delta-separated and satisfy
    delta <= n / 2^(d0+1); m comes from haussler_sample_size.  The
    expectation is enumerated exactly when C(n, m-1) <= exact_limit,
    otherwise estimated over ``trials`` samples with a standard error.
    """
    if len(sys) == 0:
        raise ValueError("empty system")
    if len(sys) >= 2 and kernels.min_pairwise_distance(sys.words) <= delta:
        raise ValueError("system is not strictly delta-separated")
    if delta > sys.n / 2 ** (d0 + 1):
        raise ValueError("need delta <= n / 2^(d0+1)")
    n = sys.n
    m = haussler_sample_size(d0, n, delta)
    size = min(m - 1, n)
    if math.comb(n, size) <= exact_limit:
        counts = [
            projection_count(sys, np.asarray(combo, dtype=np.int64))
            for combo in itertools.combinations(range(n), size)
        ]
        mean = float(np.mean(counts))
        return ProjectionCheck(len(sys), mean, 0.0, d0, m, len(counts), True)
    if trials < 2:
        raise ValueError("need trials >= 2 for a standard error")
    counts = np.empty(trials, dtype=np.int64)
    for tr in range(trials):
        rng = spawn(seed, "projection_check", tr)
        idx = np.sort(rng.permutation(n)[:size])
        counts[tr] = projection_count(sys, idx)
    mean = float(counts.mean())
    se = float(counts.std(ddof=1) / math.sqrt(trials))
    return ProjectionCheck(len(sys), mean, se, d0, m, trials, False)


# ---------------------------------------------------------------------------
# success-frequency experiments


@dataclass
class SuccessReport:
    kind: str
    trials: int
    successes: int
    sample_size: int

    @property
    def frequency(self) -> float:
        return self.successes / self.trials

    CSV_HEADER = "kind,trials,successes,frequency,sample_size"

    def to_csv(self) -> str:
        return (
            f"{self.CSV_HEADER}\n{self.kind},{self.trials},{self.successes},"
            f"{self.frequency!r},{self.sample_size}\n"
        )


def epsilon_net_experiment(
    sys: SetSystem,
    params: SampleParams,
    d: float,
    trials: int,
    seed: int,
) -> SuccessReport:
    """Frequency with which the sampled net actually hits all long vectors."""
    successes = 0
    size = min(epsilon_net_size(params, d), sys.n)
    for tr in range(trials):
        sample = epsilon_net(sys, params, seed=_trial_seed(seed, "net", tr), d=d)
        successes += verify_epsilon_net(sys, sample, params.epsilon)
    return SuccessReport("epsilon-net", trials, successes, size)


def relative_approx_experiment(
    sys: SetSystem,
    params: SampleParams,
    d: float,
    trials: int,
    seed: int,
) -> SuccessReport:
    successes = 0
    size = min(relative_approximation_size(params, d), sys.n)
    for tr in range(trials):
        sample = relative_approximation(sys, params, seed=_trial_seed(seed, "approx", tr), d=d)
        successes += verify_relative_approximation(sys, sample, params.epsilon, params.eta)
    return SuccessReport("relative-approximation", trials, successes, size)


def compact_projection_experiment(
    sys: SetSystem,
    delta: int,
    k: int,
    d: float,
    trials: int,
    seed: int,
    c: float = 4.0,
) -> dict[str, float]:
    """Joint and per-property success frequencies of compact_projection."""
    joint = inj = length = 0
    size = 0
    for tr in range(trials):
        _, diag = compact_projection(
            sys, delta, k, seed=_trial_seed(seed, "compact", tr), d=d, c=c
        )
        size = diag.sample_size
        inj += diag.injective
        length += diag.length_ok
        joint += diag.joint_ok
    return {
        "trials": trials,
        "sample_size": size,
        "injective": inj / trials,
        "length": length / trials,
        "joint": joint / trials,
    }


def _trial_seed(seed: int, label: str, trial: int) -> int:
    return int(spawn(seed, label, trial).integers(1 << 62))

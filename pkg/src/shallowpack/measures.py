"""Batch geometric measures over all sets of a system via tree walks.

The point of the framework: loading each set from scratch costs two updates
per element (insert + delete), while walking a low-conflict spanning tree
only pays for symmetric differences along tree edges.  The walk is an Euler
tour (down and up each edge), so the update count is exactly
|root set| + 2 * total_conflict and the store returns to the root state.
"""

from __future__ import annotations

import sys as _sysmod
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .setsystem import PointSet, SetSystem
from .spanning import SpanningTree

_SEB_TOL = 1e-9


def measure_diameter(points: np.ndarray) -> float:
    """Largest pairwise Euclidean distance; 0 for fewer than two points."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        return 0.0
    best = 0.0
    for i in range(pts.shape[0] - 1):
        d2 = ((pts[i + 1 :] - pts[i]) ** 2).sum(axis=1).max()
        if d2 > best:
            best = float(d2)
    return float(np.sqrt(best))


def measure_bbox_volume(points: np.ndarray) -> float:
    """Axis-aligned bounding-box volume; 0 when any extent is degenerate."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] < 2:
        return 0.0
    return float(np.prod(np.ptp(pts, axis=0)))


# -- smallest enclosing ball (move-to-front Welzl) ---------------------------


def _circumball(support: list[np.ndarray]) -> tuple[np.ndarray, float] | None:
    """Ball with all support points on its boundary, or None if degenerate."""
    q = len(support)
    if q == 1:
        return support[0], 0.0
    base = support[0]
    edges = np.asarray(support[1:]) - base
    gram = edges @ edges.T
    scale = float(np.abs(gram).max())
    if scale <= 0 or abs(float(np.linalg.det(gram))) <= scale ** (q - 1) * 1e-12:
        return None
    rhs = 0.5 * (edges**2).sum(axis=1)
    center = base + np.linalg.solve(gram, rhs) @ edges
    return center, float(((support[0] - center) ** 2).sum())


def _ball_of_support(support: list[np.ndarray]) -> tuple[np.ndarray, float]:
    if not support:
        return np.zeros(1), -1.0
    best: tuple[np.ndarray, float] | None = None
    import itertools

    for size in range(1, len(support) + 1):
        for combo in itertools.combinations(range(len(support)), size):
            ball = _circumball([support[i] for i in combo])
            if ball is None:
                continue
            c, r2 = ball
            tol = _SEB_TOL * (1.0 + r2)
            if all(((p - c) ** 2).sum() <= r2 + tol for p in support):
                if best is None or r2 < best[1]:
                    best = (c, r2)
        if best is not None:
            return best
    raise RuntimeError("no enclosing ball of support found")  # pragma: no cover


def _welzl(pts: np.ndarray, i: int, support: list[np.ndarray], dim: int) -> tuple[np.ndarray, float]:
    if i == pts.shape[0] or len(support) == dim + 1:
        return _ball_of_support(support)
    c, r2 = _welzl(pts, i + 1, support, dim)
    p = pts[i]
    if r2 >= 0 and ((p - c) ** 2).sum() <= r2 + _SEB_TOL * (1.0 + r2):
        return c, r2
    return _welzl(pts, i + 1, support + [p], dim)


def measure_seb_radius(points: np.ndarray) -> float:
    """Exact smallest-enclosing-ball radius (dimension <= 3).

    Randomized move-to-front recursion with a fixed shuffle; boundary
    membership tolerance 1e-9.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[0] == 0:
        return 0.0
    dim = pts.shape[1]
    if dim > 3:
        raise ValueError("dimension > 3 is not supported")
    if pts.shape[0] == 1:
        return 0.0
    rng = np.random.Generator(np.random.PCG64(12345))
    shuffled = pts[rng.permutation(pts.shape[0])]
    old = _sysmod.getrecursionlimit()
    _sysmod.setrecursionlimit(max(old, 4 * pts.shape[0] + 1000))
    try:
        _, r2 = _welzl(shuffled, 0, [], dim)
    finally:
        _sysmod.setrecursionlimit(old)
    return float(np.sqrt(max(r2, 0.0)))


MEASURES: dict[str, Callable[[np.ndarray], float]] = {
    "diameter": measure_diameter,
    "seb": measure_seb_radius,
    "bbox": measure_bbox_volume,
}


# ---------------------------------------------------------------------------
# dynamic store and walks


class DynamicPointStore:
    """Multiset of ground points with an update counter.

    Every insert or delete bumps the counter; measures are recomputed from
    the currently stored points at query time (the framework's contract is
    the update count, not the per-query cost).
    """

    def __init__(self, pts: PointSet):
        self._coords = pts.to_array()
        self._counts = np.zeros(len(pts), dtype=np.int64)
        self.update_count = 0

    def insert(self, i: int) -> None:
        self._counts[i] += 1
        self.update_count += 1

    def delete(self, i: int) -> None:
        if self._counts[i] <= 0:
            raise ValueError(f"element {i} is not stored")
        self._counts[i] -= 1
        self.update_count += 1

    def stored_indices(self) -> np.ndarray:
        return np.repeat(np.arange(self._counts.shape[0]), self._counts)

    def current_points(self) -> np.ndarray:
        return self._coords[self.stored_indices()]

    def query(self, measure: str) -> float:
        return MEASURES[measure](self.current_points())


@dataclass
class MeasureReport:
    """Per-set measure values plus the update-count accounting."""

    measure: str
    values: list[float]
    set_sizes: list[int]
    total_updates: int
    brute_force_updates: int
    walk_order: list[int] = field(default_factory=list)

    @property
    def update_ratio(self) -> float:
        if self.brute_force_updates == 0:
            return 0.0
        return self.total_updates / self.brute_force_updates

    CSV_HEADER = "set_index,set_size,measure_value"

    def to_csv(self) -> str:
        lines = [self.CSV_HEADER]
        for i, (size, val) in enumerate(zip(self.set_sizes, self.values)):
            lines.append(f"{i},{size},{val!r}")
        lines.append(
            f"summary,{self.total_updates},{self.brute_force_updates},"
            f"{self.update_ratio!r}"
        )
        return "\n".join(lines) + "\n"


def brute_force_measure(sys: SetSystem, pts: PointSet, measure: str) -> MeasureReport:
    """Load every set from scratch: insert all, query, delete all."""
    if sys.n != len(pts):
        raise ValueError("ground set does not index the point set")
    if measure not in MEASURES:
        raise ValueError(f"unknown measure '{measure}'")
    store = DynamicPointStore(pts)
    mat = sys.bool_matrix()
    values = []
    for r in range(len(sys)):
        members = np.nonzero(mat[r])[0]
        for i in members:
            store.insert(int(i))
        values.append(store.query(measure))
        for i in members:
            store.delete(int(i))
    sizes = [int(s) for s in sys.lengths] if len(sys) else []
    return MeasureReport(measure, values, sizes, store.update_count, store.update_count)


def traverse_and_measure(
    sys: SetSystem,
    tree: SpanningTree,
    pts: PointSet,
    measure: str,
    root: int | None = None,
) -> MeasureReport:
    """Measure every set by walking the tree with incremental updates.

    Loads the root set, then Euler-tours the tree: each edge is crossed down
    and up, applying the endpoint sets' symmetric difference both ways, so
    the total update count is exactly |root set| + 2 * total_conflict and the
    store ends back at the root set.  Values are recorded on first arrival.
    """
    m = len(sys)
    if sys.n != len(pts):
        raise ValueError("ground set does not index the point set")
    if tree.node_count != m:
        raise ValueError("tree does not span the system")
    if measure not in MEASURES:
        raise ValueError(f"unknown measure '{measure}'")
    if m == 0:
        return MeasureReport(measure, [], [], 0, 0)
    if root is None:
        root = int(np.argmax(sys.lengths))
    elif not 0 <= root < m:
        raise ValueError("root out of range")
    adj: list[list[int]] = [[] for _ in range(m)]
    for u, v, _ in tree.edges:
        adj[u].append(v)
        adj[v].append(u)
    for nbrs in adj:
        nbrs.sort()
    mat = sys.bool_matrix()
    store = DynamicPointStore(pts)
    for i in np.nonzero(mat[root])[0]:
        store.insert(int(i))
    values: list[float] = [0.0] * m
    seen = [False] * m
    values[root] = store.query(measure)
    seen[root] = True
    walk = [root]

    def apply_diff(a: int, b: int) -> None:
        gained = np.nonzero(mat[b] & ~mat[a])[0]
        lost = np.nonzero(mat[a] & ~mat[b])[0]
        for i in gained:
            store.insert(int(i))
        for i in lost:
            store.delete(int(i))

    stack: list[tuple[int, int, int]] = [(root, -1, 0)]
    while stack:
        node, par, child_pos = stack.pop()
        nxt = None
        while child_pos < len(adj[node]):
            cand = adj[node][child_pos]
            child_pos += 1
            if cand != par:
                nxt = cand
                break
        if nxt is None:
            if par != -1:
                apply_diff(node, par)
            continue
        stack.append((node, par, child_pos))
        apply_diff(node, nxt)
        values[nxt] = store.query(measure)
        seen[nxt] = True
        walk.append(nxt)
        stack.append((nxt, node, 0))
    if not all(seen):
        raise ValueError("tree does not connect all rows")
    sizes = [int(s) for s in sys.lengths]
    brute = int(2 * sys.lengths.sum())
    return MeasureReport(measure, values, sizes, store.update_count, brute, walk)

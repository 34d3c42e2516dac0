"""Spanning trees over set-system rows under the symmetric-difference metric.

The conflict number of an edge {S, S'} is |S xor S'|; the total conflict
number of a tree is the sum over its edges.  Provides the exact MST (dense
Prim over the implicit metric), the closed-form bound predictor, and an
approximate MST built from a Hamming-sketch embedding with calibrated
distances (the approximation factor is measured, never assumed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .seeding import spawn
from .setsystem import CsParams, IndexSample, SetSystem


@dataclass(frozen=True)
class SpanningTree:
    """Tree over m system rows; edges carry exact conflict weights."""

    node_count: int
    edges: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.edges) != max(self.node_count - 1, 0):
            raise ValueError("a spanning tree on m nodes has m-1 edges")

    @property
    def total_conflict(self) -> int:
        return sum(w for _, _, w in self.edges)

    def to_csv(self) -> str:
        lines = [f"m={self.node_count} total_conflict={self.total_conflict}"]
        lines.append("u,v,weight")
        lines.extend(f"{u},{v},{w}" for u, v, w in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SpanningTree":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        head = lines[0].split()
        m = int(head[0].split("=")[1])
        edges = tuple(
            (int(u), int(v), int(w))
            for u, v, w in (ln.split(",") for ln in lines[2:])
        )
        return cls(m, edges)


def total_conflict(tree: SpanningTree) -> int:
    """Sum of the tree's edge conflict weights."""
    return tree.total_conflict


def _edges_from_prim(parent: np.ndarray, weight: np.ndarray) -> tuple[tuple[int, int, int], ...]:
    edges = []
    for v in range(1, parent.shape[0]):
        u = int(parent[v])
        edges.append((min(u, v), max(u, v), int(weight[v])))
    edges.sort()
    return tuple(edges)


def exact_mst(sys: SetSystem) -> SpanningTree:
    """Minimum spanning tree of the complete conflict graph, O(m^2) distances.

    Deterministic: Prim from row 0, keys improve strictly, ties pick the
    lowest row index.
    """
    m = len(sys)
    if m == 0:
        raise ValueError("empty system")
    if m == 1:
        return SpanningTree(1, ())
    parent, weight = kernels.prim_mst(sys.words)
    return SpanningTree(m, _edges_from_prim(parent, weight))


def bound_tree_conflict(n: int, k: int, m: int, params: CsParams) -> float:
    """Total-conflict predictor n^(d1/d) * k^(1-d1/d) * m^(1-1/d)."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not 0 <= k <= n:
        raise ValueError("need 0 <= k <= n")
    d, d1 = params.d, params.d1
    return n ** (d1 / d) * k ** (1 - d1 / d) * m ** (1 - 1 / d)


# ---------------------------------------------------------------------------
# Hamming sketch embedding


@dataclass(frozen=True)
class HammingSketch:
    """Per-row integer ID vectors from projections onto random index subsets.

    Coordinate i stores a dense ID of the row's projection onto subset i;
    equal projections always share an ID, so sketch Hamming distance only
    counts subsets that actually separate two rows.
    """

    mu: int
    ids: np.ndarray  # (m, mu) int64
    subsets: tuple[IndexSample, ...]

    def hamming(self, i: int, j: int) -> int:
        return int((self.ids[i] != self.ids[j]).sum())


def _subset_size_schedule(n: int, mu: int) -> list[int]:
    base = []
    s = 1
    while s < n:
        base.append(s)
        s *= 2
    base.append(min(s, n))
    return [base[i % len(base)] for i in range(mu)]


def build_sketch(
    sys: SetSystem, mu: int, seed: int, sizes: list[int] | None = None
) -> HammingSketch:
    """Sketch with mu coordinates; subset sizes follow a geometric schedule
    1, 2, 4, ... capped at n and cycled, unless given explicitly."""
    if mu < 1:
        raise ValueError("mu must be >= 1")
    if sizes is None:
        sizes = _subset_size_schedule(sys.n, mu)
    elif len(sizes) != mu:
        raise ValueError("need one subset size per coordinate")
    mat = sys.bool_matrix()
    ids = np.zeros((len(sys), mu), dtype=np.int64)
    subsets = []
    for c in range(mu):
        rng = spawn(seed, "sketch_subset", c)
        idx = np.sort(rng.permutation(sys.n)[: sizes[c]])
        subsets.append(IndexSample(sys.n, tuple(int(i) for i in idx)))
        sub = np.packbits(mat[:, idx], axis=1)
        _, inverse = np.unique(sub, axis=0, return_inverse=True)
        ids[:, c] = inverse.reshape(-1)
    return HammingSketch(mu, ids, tuple(subsets))


def _prim_float(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = dist.shape[0]
    INF = math.inf
    key = np.full(m, INF)
    parent = np.full(m, -1, dtype=np.int64)
    done = np.zeros(m, dtype=bool)
    order = np.zeros(m, dtype=np.int64)
    key[0] = 0.0
    for it in range(m):
        u = int(np.argmin(np.where(done, INF, key)))
        done[u] = True
        order[it] = u
        improve = (~done) & (dist[u] < key)
        key[improve] = dist[u][improve]
        parent[improve] = u
    return parent, order


def _row_distance(sys: SetSystem, i: int, j: int) -> int:
    return int(kernels.distances_to(sys.words[j : j + 1], sys.words[i])[0])


def approx_mst(sys: SetSystem, sketch: HammingSketch, eta: float = 0.25) -> SpanningTree:
    """MST over calibrated sketch distances, reweighted with exact conflicts.

    Sketch Hamming counts are converted to distance estimates by per-size-
    class least squares against exact distances on a random pair sample
    (about 8/eta^2 pairs).  The returned tree's edge weights are recomputed
    exactly, so total_conflict is truthful; degenerate calibration falls back
    to the exact MST.
    """
    if eta <= 0:
        raise ValueError("eta must be positive")
    m = len(sys)
    if m == 0:
        raise ValueError("empty system")
    if m == 1:
        return SpanningTree(1, ())
    sizes = np.array([len(s) for s in sketch.subsets])
    classes = np.unique(sizes)
    rng = spawn(0, "sketch_calibration", m, sketch.mu)
    n_pairs = min(m * (m - 1) // 2, max(64, math.ceil(8 / eta**2)))
    ii = rng.integers(0, m, size=4 * n_pairs)
    jj = rng.integers(0, m, size=4 * n_pairs)
    keep = ii != jj
    ii, jj = ii[keep][:n_pairs], jj[keep][:n_pairs]
    if ii.size == 0:
        return exact_mst(sys)
    true_d = np.array(
        [_row_distance(sys, int(a), int(b)) for a, b in zip(ii, jj)], dtype=float
    )
    feats = np.column_stack(
        [
            (sketch.ids[ii][:, sizes == cl] != sketch.ids[jj][:, sizes == cl]).sum(axis=1)
            for cl in classes
        ]
    ).astype(float)
    if not feats.any() or not true_d.any():
        return exact_mst(sys)
    coef, *_ = np.linalg.lstsq(feats, true_d, rcond=None)
    coef = np.clip(coef, 0.0, None)
    if not coef.any():
        return exact_mst(sys)
    # estimated pairwise distances, blockwise per size class
    est = np.zeros((m, m))
    for c, cl in zip(coef, classes):
        if c == 0.0:
            continue
        block = sketch.ids[:, sizes == cl]
        for i in range(m):
            est[i] += c * (block[i] != block).sum(axis=1)
    parent, _ = _prim_float(est)
    words = sys.words
    edges = []
    for v in range(1, m):
        u = int(parent[v])
        w = int(kernels.distances_to(words[v : v + 1], words[u])[0])
        edges.append((min(u, v), max(u, v), w))
    edges.sort()
    return SpanningTree(m, tuple(edges))

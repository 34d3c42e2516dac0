"""Generators for geometric set systems over small-dimensional point sets.

Range families (halfspaces, balls, parallel slabs) are enumerated exactly at
desk scale by the standard sweep: range boundaries through <= d points, with
perturbation variants resolving which boundary points fall inside.  Degenerate
inputs (collinear, cocircular, coincident) are supported: the on-boundary
points of a candidate are resolved recursively, since their realizable in/out
patterns are exactly the halfspace subsets of the on-boundary set.

All enumeration is deterministic; dedup happens in the SetSystem constructor.
"""

from __future__ import annotations

import itertools
import warnings

import numpy as np

from ..seeding import spawn
from .core import PointSet, SetSystem

_DIM_CAP = 3


class _RowCollector:
    """Accumulates candidate indicator rows, packing them in batches."""

    def __init__(self, n: int, batch: int = 8192):
        self.n = n
        self._batch = batch
        self._packed: list[np.ndarray] = []
        self._pending: list[np.ndarray] = []
        self._pending_rows = 0

    def add_matrix(self, mat: np.ndarray) -> None:
        if mat.size == 0:
            return
        self._packed.append(np.packbits(mat.astype(np.uint8, copy=False), axis=1))

    def add_row(self, row: np.ndarray) -> None:
        self._pending.append(row.astype(np.uint8, copy=False))
        self._pending_rows += 1
        if self._pending_rows >= self._batch:
            self._flush()

    def _flush(self) -> None:
        if self._pending:
            self.add_matrix(np.asarray(self._pending))
            self._pending = []
            self._pending_rows = 0

    def system(self) -> SetSystem:
        self._flush()
        nbytes = (self.n + 7) // 8
        if not self._packed:
            return SetSystem.empty(self.n)
        packed = np.vstack(self._packed) if len(self._packed) > 1 else self._packed[0]
        return SetSystem(self.n, packed.reshape(-1, nbytes))


# ---------------------------------------------------------------------------
# geometry helpers


def _affine_coords(P: np.ndarray, tol: float) -> tuple[np.ndarray, int]:
    """Coordinates of P within its affine hull, plus the hull dimension."""
    n = P.shape[0]
    if n == 0:
        return np.zeros((0, 0)), 0
    centered = P - P.mean(axis=0)
    _, svals, vt = np.linalg.svd(centered, full_matrices=False)
    if svals.size == 0 or svals[0] <= tol:
        return np.zeros((n, 0)), 0
    rank = int((svals > svals[0] * 1e-9 + tol).sum())
    return centered @ vt[:rank].T, rank


def _tie_groups(keys: np.ndarray, tol: float) -> list[np.ndarray]:
    """Indices grouped by ascending key; keys within tol share a group."""
    order = np.argsort(keys, kind="stable")
    groups: list[np.ndarray] = []
    start = 0
    for pos in range(1, len(order) + 1):
        if pos == len(order) or keys[order[pos]] - keys[order[pos - 1]] > tol:
            groups.append(order[start:pos])
            start = pos
    return groups


def _prefix_suffix_rows(n: int, groups: list[np.ndarray]) -> np.ndarray:
    """Halfspace subsets of points on a line: prefixes and suffixes."""
    rows = []
    acc = np.zeros(n, dtype=bool)
    rows.append(acc.copy())
    for g in groups:
        acc[g] = True
        rows.append(acc.copy())
    acc = np.zeros(n, dtype=bool)
    for g in reversed(groups):
        acc[g] = True
        rows.append(acc.copy())
    return np.asarray(rows)


def _run_rows(n: int, groups: list[np.ndarray]) -> np.ndarray:
    """All contiguous runs of the group order (slab/interval subsets)."""
    g_count = len(groups)
    ranks = np.empty(n, dtype=np.int64)
    for gi, g in enumerate(groups):
        ranks[g] = gi
    a, b = np.triu_indices(g_count + 1, k=1)
    rows = (ranks[np.newaxis, :] >= a[:, np.newaxis]) & (
        ranks[np.newaxis, :] < b[:, np.newaxis]
    )
    return np.vstack([np.zeros((1, n), dtype=bool), rows])


def _hs_small(P: np.ndarray, tol: float) -> list[np.ndarray]:
    """Exact halfspace subsets of a small point set, as boolean rows.

    Used to resolve on-boundary points of a candidate range; the input is
    expected to be tiny (a handful of points), so the exponential worst case
    is irrelevant.
    """
    q = P.shape[0]
    if q == 0:
        return [np.zeros(0, dtype=bool)]
    coords, dim = _affine_coords(P, tol)
    if dim == 0:
        return [np.zeros(q, dtype=bool), np.ones(q, dtype=bool)]
    if dim == 1:
        keys = coords[:, 0]
        span = float(keys.max() - keys.min())
        return list(_prefix_suffix_rows(q, _tie_groups(keys, tol * (1 + span))))
    seen: dict[bytes, np.ndarray] = {}

    def emit(row: np.ndarray) -> None:
        seen.setdefault(row.tobytes(), row)

    emit(np.zeros(q, dtype=bool))
    emit(np.ones(q, dtype=bool))
    for combo in itertools.combinations(range(q), dim):
        base = coords[combo[0]]
        edges = coords[list(combo[1:])] - base
        if dim == 2:
            normal = np.array([-edges[0, 1], edges[0, 0]])
        else:
            normal = np.cross(edges[0], edges[1])
        scale = float(np.abs(edges).sum())
        if float(np.linalg.norm(normal)) <= tol * (1 + scale):
            continue
        vals = coords @ normal - base @ normal
        vtol = tol * (1 + float(np.abs(normal).sum())) * (1 + float(np.abs(coords).max()))
        on = np.abs(vals) <= vtol
        left = vals < -vtol
        right = vals > vtol
        on_idx = np.nonzero(on)[0]
        for sub in _hs_small(P[on_idx], tol):
            row = left.copy()
            row[on_idx[sub]] = True
            emit(row)
            row = right.copy()
            row[on_idx[sub]] = True
            emit(row)
    return list(seen.values())


# ---------------------------------------------------------------------------
# halfspace subsets


def _halfplane_rows_2d(coords: np.ndarray, tol: float, out: _RowCollector) -> None:
    n = coords.shape[0]
    x, y = coords[:, 0], coords[:, 1]
    pair_i, pair_j = np.triu_indices(n, k=1)
    chunk = max(1, 2_000_000 // max(n, 1))
    for start in range(0, pair_i.size, chunk):
        ii = pair_i[start : start + chunk]
        jj = pair_j[start : start + chunk]
        dx = x[jj] - x[ii]
        dy = y[jj] - y[ii]
        vals = dx[:, None] * (y[None, :] - y[ii][:, None]) - dy[:, None] * (
            x[None, :] - x[ii][:, None]
        )
        vtol = (np.abs(dx) + np.abs(dy))[:, None] * tol + 1e-300
        on = np.abs(vals) <= vtol
        on_count = on.sum(axis=1)
        generic = np.nonzero(on_count == 2)[0]
        if generic.size:
            left = vals[generic] > vtol[generic]
            right = vals[generic] < -vtol[generic]
            g = generic.size
            rows = np.zeros((g, 8, n), dtype=bool)
            rows[:, 0:4, :] = left[:, None, :]
            rows[:, 4:8, :] = right[:, None, :]
            gi = ii[generic]
            gj = jj[generic]
            rg = np.arange(g)
            for slot in (1, 3, 5, 7):
                rows[rg, slot, gi] = True
            for slot in (2, 3, 6, 7):
                rows[rg, slot, gj] = True
            out.add_matrix(rows.reshape(g * 8, n))
        for p in np.nonzero(on_count != 2)[0]:
            on_idx = np.nonzero(on[p])[0]
            left = vals[p] < -vtol[p, 0]
            right = vals[p] > vtol[p, 0]
            t = dx[p] * (x[on_idx] - x[ii[p]]) + dy[p] * (y[on_idx] - y[ii[p]])
            ttol = tol * (abs(dx[p]) + abs(dy[p])) * (1 + float(np.abs(t).max(initial=0.0)))
            groups = _tie_groups(t, ttol)
            for sub in _prefix_suffix_rows(len(on_idx), groups):
                row = left.copy()
                row[on_idx[sub]] = True
                out.add_row(row)
                row = right.copy()
                row[on_idx[sub]] = True
                out.add_row(row)


def _halfspace_rows_3d(coords: np.ndarray, tol: float, out: _RowCollector) -> None:
    n = coords.shape[0]
    cmax = 1 + float(np.abs(coords).max())
    for i, j, k in itertools.combinations(range(n), 3):
        u = coords[j] - coords[i]
        v = coords[k] - coords[i]
        normal = np.cross(u, v)
        nn = float(np.linalg.norm(normal))
        if nn <= tol * (1 + float(np.linalg.norm(u)) * float(np.linalg.norm(v))):
            continue
        vals = coords @ normal - coords[i] @ normal
        vtol = tol * nn * cmax * 4
        on = np.abs(vals) <= vtol
        left = vals < -vtol
        right = vals > vtol
        on_idx = np.nonzero(on)[0]
        if on_idx.size == 3:
            for bits in range(8):
                row = left.copy()
                row2 = right.copy()
                for slot, el in enumerate((i, j, k)):
                    if bits >> slot & 1:
                        row[el] = True
                        row2[el] = True
                out.add_row(row)
                out.add_row(row2)
        else:
            for sub in _hs_small(coords[on_idx], tol):
                row = left.copy()
                row[on_idx[sub]] = True
                out.add_row(row)
                row = right.copy()
                row[on_idx[sub]] = True
                out.add_row(row)


def _add_halfspace_rows(coords: np.ndarray, dim: int, tol: float, out: _RowCollector) -> None:
    n = coords.shape[0]
    out.add_row(np.zeros(n, dtype=bool))
    out.add_row(np.ones(n, dtype=bool))
    if dim == 0:
        return
    if dim == 1:
        keys = coords[:, 0]
        span = float(keys.max() - keys.min())
        out.add_matrix(_prefix_suffix_rows(n, _tie_groups(keys, tol * (1 + span))))
    elif dim == 2:
        _halfplane_rows_2d(coords, tol, out)
    elif dim == 3:
        _halfspace_rows_3d(coords, tol, out)
    else:  # pragma: no cover - callers cap the dimension
        raise ValueError("hull dimension above 3 is not supported")


def _validate_pointset(pts: PointSet) -> np.ndarray:
    if len(pts) == 0:
        raise ValueError("point set must be non-empty")
    if pts.dim > _DIM_CAP:
        raise ValueError(f"dimension {pts.dim} > {_DIM_CAP} is not supported")
    P = pts.to_array()
    if np.unique(P, axis=0).shape[0] < P.shape[0]:
        warnings.warn("point set contains duplicate points", stacklevel=3)
    return P


def _tolerance(P: np.ndarray) -> float:
    span = float(np.ptp(P, axis=0).max()) if P.size else 0.0
    return 1e-9 * (1.0 + span)


def build_halfspaces(pts: PointSet) -> SetSystem:
    """All point subsets realizable as closed/open halfspaces {x : a.x <= b}."""
    P = _validate_pointset(pts)
    tol = _tolerance(P)
    coords, dim = _affine_coords(P, tol)
    out = _RowCollector(len(pts))
    _add_halfspace_rows(coords, dim, tol, out)
    return out.system()


# ---------------------------------------------------------------------------
# balls


def _coincident_groups(coords: np.ndarray, tol: float) -> list[np.ndarray]:
    n = coords.shape[0]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        close = np.nonzero(np.abs(coords[i + 1 :] - coords[i]).sum(axis=1) <= tol)[0]
        for j in close + i + 1:
            parent[find(int(j))] = find(i)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [np.asarray(g) for g in groups.values()]


def _emit_sphere_variants(
    coords: np.ndarray,
    center: np.ndarray,
    r2: float,
    tol_v: float,
    tol: float,
    out: _RowCollector,
) -> None:
    vals = ((coords - center) ** 2).sum(axis=1) - r2
    on = np.abs(vals) <= tol_v
    inside = vals < -tol_v
    on_idx = np.nonzero(on)[0]
    for sub in _hs_small(coords[on_idx], tol):
        row = inside.copy()
        row[on_idx[sub]] = True
        out.add_row(row)


def build_balls(pts: PointSet) -> SetSystem:
    """All point subsets realizable as closed/open balls {x : |x - c| <= r}.

    Candidate spheres pass through 2, 3, or 4 points (diametral, circum-
    circle, circumsphere); the in/out patterns of on-sphere points under
    perturbation are spherical caps, i.e. halfspace subsets of the on-sphere
    set.  Halfspace subsets are included as limiting balls.
    """
    P = _validate_pointset(pts)
    tol = _tolerance(P)
    coords, dim = _affine_coords(P, tol)
    n = len(pts)
    out = _RowCollector(n)
    _add_halfspace_rows(coords, dim, tol, out)
    if dim <= 1:
        if dim == 1:
            keys = coords[:, 0]
            span = float(keys.max() - keys.min())
            out.add_matrix(_run_rows(n, _tie_groups(keys, tol * (1 + span))))
        return out.system()
    for g in _coincident_groups(coords, tol):
        row = np.zeros(n, dtype=bool)
        row[g] = True
        out.add_row(row)
    span = float(np.ptp(coords, axis=0).max())
    tol_v = 4 * tol * (1 + span)
    for i, j in itertools.combinations(range(n), 2):
        center = (coords[i] + coords[j]) / 2.0
        r2 = float(((coords[i] - center) ** 2).sum())
        if r2 <= tol_v:
            continue
        _emit_sphere_variants(coords, center, r2, tol_v, tol, out)
    for combo in itertools.combinations(range(n), 3):
        center = _circumcenter(coords[list(combo)], tol)
        if center is None:
            continue
        r2 = float(((coords[combo[0]] - center) ** 2).sum())
        _emit_sphere_variants(coords, center, r2, tol_v, tol, out)
    if dim == 3:
        for combo in itertools.combinations(range(n), 4):
            center = _circumcenter(coords[list(combo)], tol)
            if center is None:
                continue
            r2 = float(((coords[combo[0]] - center) ** 2).sum())
            _emit_sphere_variants(coords, center, r2, tol_v, tol, out)
    return out.system()


def _circumcenter(Q: np.ndarray, tol: float) -> np.ndarray | None:
    """Center equidistant from the rows of Q, within their affine span.

    Returns None for degenerate (affinely dependent) tuples; for a triple in
    3-space this is the circumcenter of the circle through the three points.
    """
    base = Q[0]
    edges = Q[1:] - base
    gram = edges @ edges.T
    rhs = 0.5 * (edges**2).sum(axis=1)
    scale = float(np.abs(gram).max())
    if scale <= tol * tol:
        return None
    if abs(float(np.linalg.det(gram))) <= scale ** edges.shape[0] * 1e-12:
        return None
    sol = np.linalg.solve(gram, rhs)
    return base + sol @ edges


# ---------------------------------------------------------------------------
# slabs


def _slab_directions_2d(coords: np.ndarray, tol: float) -> np.ndarray:
    diffs = coords[:, None, :] - coords[None, :, :]
    iu = np.triu_indices(coords.shape[0], k=1)
    d = diffs[iu]
    good = np.abs(d).sum(axis=1) > tol
    d = d[good]
    crit = np.mod(np.arctan2(d[:, 1], d[:, 0]) + np.pi / 2, np.pi)
    crit = np.unique(np.round(crit / 1e-10).astype(np.int64)) * 1e-10
    if crit.size == 0:
        return np.zeros((0, 2))
    ext = np.concatenate([crit, [crit[0] + np.pi]])
    mids = (ext[:-1] + ext[1:]) / 2.0
    angles = np.concatenate([crit, np.mod(mids, np.pi)])
    return np.column_stack([np.cos(angles), np.sin(angles)])


def _slab_directions_3d(coords: np.ndarray, tol: float) -> np.ndarray:
    iu = np.triu_indices(coords.shape[0], k=1)
    d = (coords[:, None, :] - coords[None, :, :])[iu]
    norms = np.linalg.norm(d, axis=1)
    d = d[norms > tol] / norms[norms > tol, None]
    # canonicalize mod sign, dedup
    flip = (d[:, 0] < 0) | ((d[:, 0] == 0) & (d[:, 1] < 0)) | (
        (d[:, 0] == 0) & (d[:, 1] == 0) & (d[:, 2] < 0)
    )
    d[flip] *= -1
    d = np.unique(np.round(d / 1e-9).astype(np.int64), axis=0) * 1e-9
    dirs: list[np.ndarray] = []
    eps = 1e-5
    for a, b in itertools.combinations(range(d.shape[0]), 2):
        v = np.cross(d[a], d[b])
        nv = float(np.linalg.norm(v))
        if nv <= 1e-9:
            continue
        v = v / nv
        tangent = d[np.abs(d @ v) <= 1e-7]
        e1 = tangent[0]
        e2 = np.cross(v, e1)
        phis = np.mod(np.arctan2(tangent @ e2, tangent @ e1) + np.pi / 2, np.pi)
        phis = np.unique(np.round(phis / 1e-9).astype(np.int64)) * 1e-9
        ext = np.concatenate([phis, [phis[0] + np.pi]])
        sector = np.concatenate([phis, (ext[:-1] + ext[1:]) / 2.0])
        dirs.append(v[None, :])
        moved = v[None, :] + eps * (
            np.cos(sector)[:, None] * e1[None, :] + np.sin(sector)[:, None] * e2[None, :]
        )
        dirs.append(moved / np.linalg.norm(moved, axis=1)[:, None])
    if not dirs:
        return np.zeros((0, 3))
    alldirs = np.vstack(dirs)
    return np.unique(np.round(alldirs / 1e-9).astype(np.int64), axis=0) * 1e-9


def build_slabs(pts: PointSet) -> SetSystem:
    """All point subsets realizable as slabs {x : b1 <= a.x <= b2}.

    Enumerates one projection direction per combinatorially distinct ordering
    of the points, takes every contiguous run, and unions in the halfspace
    subsets (a halfspace clipped to the point range is a slab).
    """
    P = _validate_pointset(pts)
    tol = _tolerance(P)
    coords, dim = _affine_coords(P, tol)
    n = len(pts)
    out = _RowCollector(n)
    _add_halfspace_rows(coords, dim, tol, out)
    if dim == 1:
        keys = coords[:, 0]
        span = float(keys.max() - keys.min())
        out.add_matrix(_run_rows(n, _tie_groups(keys, tol * (1 + span))))
    elif dim >= 2:
        dirs = (
            _slab_directions_2d(coords, tol)
            if dim == 2
            else _slab_directions_3d(coords, tol)
        )
        for a in dirs:
            keys = coords @ a
            span = float(keys.max() - keys.min())
            out.add_matrix(_run_rows(n, _tie_groups(keys, tol * (1 + span))))
    return out.system()


# ---------------------------------------------------------------------------
# lower-bound grid and point-cloud helpers


def build_rectangle_grid_dual(n: int, delta: int) -> SetSystem:
    """Dual system of a grid of duplicated rectangle stacks.

    Ground set: n/delta vertical stacks then n/delta horizontal stacks, each
    of multiplicity delta/2, in left-to-right / top-to-bottom order.  Returns
    the (n/delta)^2 depth-delta intersection cells; each vector has length
    delta and pairwise distances at least delta.
    """
    if delta < 2 or delta % 2 != 0:
        raise ValueError("delta must be a positive even integer >= 2")
    if n <= 0 or n % delta != 0:
        raise ValueError("n must be a positive multiple of delta")
    g = n // delta
    half = delta // 2
    mat = np.zeros((g * g, n), dtype=bool)
    for i in range(g):
        for j in range(g):
            r = i * g + j
            mat[r, i * half : (i + 1) * half] = True
            base = g * half + j * half
            mat[r, base : base + half] = True
    return SetSystem.from_bool_matrix(n, mat)


def random_points(n: int, dim: int = 2, seed: int = 0) -> PointSet:
    """n points drawn uniformly from the unit cube, seed-deterministic."""
    rng = spawn(seed, "points", n, dim)
    return PointSet.from_array(rng.random((n, dim)))


def convex_position_points(n: int, seed: int = 0) -> PointSet:
    """n planar points drawn uniformly on the unit circle (convex position).

    Convex position is the family on which halfplane subsets of size <= k
    number exactly n*k + 1, so packing-size sweeps track the predicted
    exponents cleanly; box-uniform clouds depress the small-k counts.
    """
    rng = spawn(seed, "circle", n)
    ang = np.sort(rng.random(n) * 2 * np.pi)
    return PointSet.from_array(np.column_stack([np.cos(ang), np.sin(ang)]))


def clustered_points(
    n: int, dim: int = 2, seed: int = 0, clusters: int = 4, spread: float = 0.04
) -> PointSet:
    """n points in a few tight Gaussian clusters inside the unit cube."""
    rng = spawn(seed, "clustered", n, dim, clusters)
    centers = rng.random((clusters, dim))
    assign = rng.integers(0, clusters, size=n)
    pts = centers[assign] + rng.normal(scale=spread, size=(n, dim))
    return PointSet.from_array(pts)

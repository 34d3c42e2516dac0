"""Pure-numpy implementations of the bit-vector kernels.

Mirrors the API of the compiled extension (``shallowpack._ckernels``) and is
selected automatically when the extension is unavailable or when
``SHALLOWPACK_PURE=1``.  Same inputs, same outputs, same tie-breaking.
"""

import numpy as np


def popcounts(words: np.ndarray) -> np.ndarray:
    return np.bitwise_count(words).sum(axis=1).astype(np.int64)


def distances_to(words: np.ndarray, row: np.ndarray) -> np.ndarray:
    if row.shape[0] != words.shape[1]:
        raise ValueError("row width mismatch")
    return np.bitwise_count(words ^ row[np.newaxis, :]).sum(axis=1).astype(np.int64)


def pairwise_distances(words: np.ndarray) -> np.ndarray:
    m = words.shape[0]
    out = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        d = distances_to(words[i + 1 :], words[i])
        out[i, i + 1 :] = d
        out[i + 1 :, i] = d
    return out


def min_pairwise_distance(words: np.ndarray) -> int:
    m = words.shape[0]
    if m < 2:
        raise ValueError("need at least two rows")
    best = words.shape[1] * 64 + 1
    for i in range(m - 1):
        d = int(distances_to(words[i + 1 :], words[i]).min())
        if d < best:
            best = d
            if best == 0:
                break
    return best


def greedy_select(
    words: np.ndarray,
    lengths: np.ndarray,
    order: np.ndarray,
    delta: int,
    strict: bool,
) -> np.ndarray:
    m = words.shape[0]
    if lengths.shape[0] != m or order.shape[0] != m:
        raise ValueError("lengths/order size mismatch")
    maxlen = words.shape[1] * 64
    buckets: list[list[int]] = [[] for _ in range(maxlen + 1)]
    kept: list[int] = []
    for cand in order:
        cand = int(cand)
        length = int(lengths[cand])
        near = [
            i
            for b in range(max(0, length - delta), min(maxlen, length + delta) + 1)
            for i in buckets[b]
        ]
        if near:
            d = np.bitwise_count(words[near] ^ words[cand]).sum(axis=1)
            conflict = (d <= delta) if strict else (d < delta)
            if bool(conflict.any()):
                continue
        kept.append(cand)
        buckets[length].append(cand)
    return np.asarray(kept, dtype=np.int64)


def prim_mst(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = words.shape[0]
    if m < 1:
        raise ValueError("need at least one row")
    INF = np.int64(1) << 62
    key = np.full(m, INF, dtype=np.int64)
    parent = np.full(m, -1, dtype=np.int64)
    weight = np.zeros(m, dtype=np.int64)
    done = np.zeros(m, dtype=bool)
    key[0] = 0
    for _ in range(m):
        masked = np.where(done, INF + 1, key)
        u = int(np.argmin(masked))  # argmin returns the first (lowest) index
        done[u] = True
        weight[u] = key[u] if u != 0 else 0
        d = distances_to(words, words[u])
        improve = (~done) & (d < key)
        key[improve] = d[improve]
        parent[improve] = u
    return parent, weight

"""Core representation of finite set systems as indicator bit-vectors.

A set system over ground set {0, ..., n-1} is stored as a deduplicated,
lexicographically sorted matrix of packed bit rows.  Lexicographic order is
over the bit string (element 0 first), which coincides with byte order of the
big-endian packing, so canonicalization is a single ``np.unique``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .. import kernels
from ..seeding import spawn


class BudgetError(RuntimeError):
    """Raised when an exact enumeration would exceed its cost budget."""


# ---------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class PointSet:
    """Ordered finite point set in R^dim."""

    dim: int
    points: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        for p in self.points:
            if len(p) != self.dim:
                raise ValueError("point arity does not match dim")
            if not all(math.isfinite(c) for c in p):
                raise ValueError("coordinates must be finite")

    @classmethod
    def from_array(cls, arr) -> "PointSet":
        a = np.asarray(arr, dtype=float)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array of points")
        return cls(a.shape[1], tuple(tuple(float(c) for c in row) for row in a))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float).reshape(len(self.points), self.dim)

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        lines = [f"dim={self.dim}"]
        lines.extend(",".join(repr(c) for c in p) for p in self.points)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "PointSet":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("dim="):
            raise ValueError("missing 'dim=<d>' header")
        dim = int(lines[0][4:])
        pts = tuple(tuple(float(c) for c in ln.split(",")) for ln in lines[1:])
        return cls(dim, pts)


@dataclass(frozen=True)
class IncidenceVector:
    """Indicator vector over a ground set of ``width`` elements.

    ``mask`` holds bit i for ground element i (LSB first).
    """

    width: int
    mask: int

    def __post_init__(self):
        if self.width < 0:
            raise ValueError("width must be >= 0")
        if self.mask < 0 or self.mask >> self.width:
            raise ValueError("mask has bits outside the ground set")

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "IncidenceVector":
        mask = 0
        width = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("bits must be 0/1")
            mask |= int(b) << width
            width += 1
        return cls(width, mask)

    @classmethod
    def from_string(cls, s: str) -> "IncidenceVector":
        return cls.from_bits(int(ch) for ch in s.strip())

    @classmethod
    def from_indices(cls, width: int, indices: Iterable[int]) -> "IncidenceVector":
        mask = 0
        for i in indices:
            if not 0 <= i < width:
                raise ValueError("index out of range")
            mask |= 1 << i
        return cls(width, mask)

    @property
    def length(self) -> int:
        """Number of set bits (L1 norm)."""
        return self.mask.bit_count()

    def bit(self, i: int) -> int:
        if not 0 <= i < self.width:
            raise ValueError("index out of range")
        return (self.mask >> i) & 1

    def indices(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.width) if (self.mask >> i) & 1)

    def bitstring(self) -> str:
        return "".join("1" if (self.mask >> i) & 1 else "0" for i in range(self.width))


def distance(u: IncidenceVector, v: IncidenceVector) -> int:
    """Symmetric-difference (Hamming) distance between two vectors."""
    if u.width != v.width:
        raise ValueError("width mismatch")
    return (u.mask ^ v.mask).bit_count()


def _pack_bool(mat: np.ndarray) -> np.ndarray:
    return np.packbits(mat.astype(np.uint8, copy=False), axis=1)


class SetSystem:
    """Deduplicated set system over ground set size ``n``.

    Rows are kept packed (uint8, big bit order) in canonical lexicographic
    order of their bit strings.  Construct through the ``from_*`` factories.
    """

    __slots__ = ("n", "_packed", "_words", "_lengths", "_vectors", "_bools")

    _BOOL_CACHE_LIMIT = 1 << 25  # cells; larger bool matrices are not kept

    def __init__(self, n: int, packed: np.ndarray, _canonical: bool = False):
        if n < 0:
            raise ValueError("n must be >= 0")
        nbytes = (n + 7) // 8
        packed = np.ascontiguousarray(packed, dtype=np.uint8)
        if packed.ndim != 2 or packed.shape[1] != nbytes:
            raise ValueError("packed shape does not match n")
        if not _canonical and packed.shape[0] > 1:
            packed = np.unique(packed, axis=0)
        self.n = n
        self._packed = packed
        self._packed.setflags(write=False)
        self._words = None
        self._lengths = None
        self._vectors = None
        self._bools = None

    # -- construction -------------------------------------------------------

    @classmethod
    def from_bool_matrix(cls, n: int, mat: np.ndarray) -> "SetSystem":
        mat = np.asarray(mat)
        if mat.ndim != 2 or mat.shape[1] != n:
            raise ValueError("matrix shape does not match n")
        return cls(n, _pack_bool(mat))

    @classmethod
    def from_masks(cls, n: int, masks: Iterable[int]) -> "SetSystem":
        rows = []
        nbytes = (n + 7) // 8
        for mk in masks:
            mk = int(mk)
            if mk < 0 or mk >> n:
                raise ValueError("mask outside ground set")
            little = np.frombuffer(mk.to_bytes(nbytes, "little"), dtype=np.uint8)
            bits = np.unpackbits(little, bitorder="little")[:n]
            rows.append(bits)
        mat = np.asarray(rows, dtype=np.uint8).reshape(len(rows), n)
        return cls.from_bool_matrix(n, mat)

    @classmethod
    def from_vectors(cls, vectors: Sequence[IncidenceVector]) -> "SetSystem":
        if not vectors:
            raise ValueError("need at least one vector (or use from_masks with n)")
        n = vectors[0].width
        if any(v.width != n for v in vectors):
            raise ValueError("width mismatch between vectors")
        return cls.from_masks(n, (v.mask for v in vectors))

    @classmethod
    def empty(cls, n: int) -> "SetSystem":
        return cls(n, np.zeros((0, (n + 7) // 8), dtype=np.uint8), _canonical=True)

    # -- accessors -----------------------------------------------------------

    def __len__(self) -> int:
        return self._packed.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SetSystem):
            return NotImplemented
        return self.n == other.n and self._packed.shape == other._packed.shape and bool(
            np.array_equal(self._packed, other._packed)
        )

    def __hash__(self):
        return hash((self.n, self._packed.tobytes()))

    def __repr__(self) -> str:
        return f"SetSystem(n={self.n}, size={len(self)})"

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @property
    def words(self) -> np.ndarray:
        """Rows as a C-contiguous (m, W) uint64 matrix for the kernels."""
        if self._words is None:
            m, nbytes = self._packed.shape
            wbytes = ((nbytes + 7) // 8) * 8
            buf = np.zeros((m, wbytes), dtype=np.uint8)
            buf[:, :nbytes] = self._packed
            words = np.ascontiguousarray(buf.view(np.uint64))
            words.setflags(write=False)
            self._words = words
        return self._words

    @property
    def lengths(self) -> np.ndarray:
        """Per-row popcounts, aligned with canonical order."""
        if self._lengths is None:
            if len(self) == 0:
                lengths = np.zeros(0, dtype=np.int64)
            else:
                lengths = kernels.popcounts(self.words)
            lengths.setflags(write=False)
            self._lengths = lengths
        return self._lengths

    def bool_matrix(self) -> np.ndarray:
        """Rows as an (m, n) boolean matrix (element 0 in column 0)."""
        if self._bools is not None:
            return self._bools
        if len(self) == 0:
            mat = np.zeros((0, self.n), dtype=bool)
        else:
            mat = np.unpackbits(self._packed, axis=1, count=self.n).astype(bool)
        if mat.size <= self._BOOL_CACHE_LIMIT:
            mat.setflags(write=False)
            self._bools = mat
        return mat

    def mask(self, i: int) -> int:
        row = self._packed[i]
        bits = np.unpackbits(row, count=self.n)
        little = np.packbits(bits, bitorder="little")
        return int.from_bytes(little.tobytes(), "little")

    def vector(self, i: int) -> IncidenceVector:
        return IncidenceVector(self.n, self.mask(i))

    @property
    def vectors(self) -> tuple[IncidenceVector, ...]:
        if self._vectors is None:
            self._vectors = tuple(self.vector(i) for i in range(len(self)))
        return self._vectors

    def __iter__(self) -> Iterator[IncidenceVector]:
        return iter(self.vectors)

    def subsystem(self, row_indices) -> "SetSystem":
        """Subsystem of the given rows; canonical order is preserved."""
        idx = np.unique(np.asarray(row_indices, dtype=np.int64))
        return SetSystem(self.n, self._packed[idx], _canonical=True)

    # -- serialization -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"n={self.n} m={len(self)}"]
        if len(self):
            mat = self.bool_matrix().astype(np.uint8)
            lines.extend("".join("1" if b else "0" for b in row) for row in mat)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SetSystem":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty input")
        head = lines[0].split()
        try:
            n = int(head[0].split("=")[1])
            m = int(head[1].split("=")[1])
        except (IndexError, ValueError) as exc:
            raise ValueError("bad header, expected 'n=<int> m=<int>'") from exc
        body = lines[1:]
        if len(body) != m:
            raise ValueError(f"expected {m} rows, found {len(body)}")
        mat = np.zeros((m, n), dtype=np.uint8)
        for r, ln in enumerate(body):
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise ValueError(f"row {r} is not a 0/1 string of length {n}")
            mat[r] = np.frombuffer(ln.encode(), dtype=np.uint8) - ord("0")
        return cls.from_bool_matrix(n, mat)


@dataclass(frozen=True)
class IndexSample:
    """Strictly increasing subset of ground-set indices."""

    n: int
    indices: tuple[int, ...]

    def __post_init__(self):
        prev = -1
        for i in self.indices:
            if i <= prev:
                raise ValueError("indices must be strictly increasing")
            prev = i
        if prev >= self.n:
            raise ValueError("index out of range")

    @classmethod
    def from_iterable(cls, n: int, it: Iterable[int]) -> "IndexSample":
        return cls(n, tuple(sorted(set(int(i) for i in it))))

    def __len__(self) -> int:
        return len(self.indices)

    def complement(self) -> "IndexSample":
        inside = set(self.indices)
        return IndexSample(self.n, tuple(i for i in range(self.n) if i not in inside))


@dataclass
class ShatterProfile:
    """Sampled Clarkson-Shor profile: max projected count per (m, k) cell."""

    entries: dict[tuple[int, int], int] = field(default_factory=dict)
    trials: int = 0

    def entry(self, m: int, k: int) -> int:
        return self.entries[(m, k)]


@dataclass(frozen=True)
class CsParams:
    """Shatter-function parameters: exponent d, split d1, VC dimension d0."""

    d: float
    d1: float
    d0: int

    def __post_init__(self):
        if not (1.0 <= self.d1 <= self.d):
            raise ValueError("need 1 <= d1 <= d")
        if self.d0 < 1:
            raise ValueError("d0 must be >= 1")


# ---------------------------------------------------------------------------
# operations


def project(sys: SetSystem, sample: IndexSample) -> SetSystem:
    """Restriction of the system onto the sampled coordinates, deduplicated."""
    if sample.n != sys.n:
        raise ValueError("ground-set size mismatch")
    idx = np.asarray(sample.indices, dtype=np.int64)
    sub = sys.bool_matrix()[:, idx]
    return SetSystem.from_bool_matrix(len(idx), sub)


def projection_count(sys: SetSystem, indices) -> int:
    """|projection| without materializing a SetSystem (Monte Carlo fast path)."""
    idx = np.asarray(indices, dtype=np.int64)
    if len(sys) == 0:
        return 0
    if idx.size == 0:
        return 1
    sub = sys.bool_matrix()[:, idx]
    if idx.size <= 62:
        keys = sub @ (np.int64(1) << np.arange(idx.size, dtype=np.int64))
        return int(np.unique(keys).size)
    return int(np.unique(np.packbits(sub, axis=1), axis=0).shape[0])


def shatter_function_exact(sys: SetSystem, m: int, budget: int = 2_000_000) -> int:
    """max over all m-index subsets of the projected system size.

    Exhaustive over C(n, m) subsets; raises BudgetError when that count
    exceeds ``budget`` (use cs_profile for larger ground sets).
    """
    if not 0 <= m <= sys.n:
        raise ValueError("m out of range")
    if math.comb(sys.n, m) > budget:
        raise BudgetError(f"C({sys.n},{m}) exceeds enumeration budget")
    if m == 0 or len(sys) == 0:
        return min(1, len(sys)) if m == 0 else 0
    mat = sys.bool_matrix()
    weights = np.int64(1) << np.arange(m, dtype=np.int64)
    ceiling = min(len(sys), 2**m)
    best = 0
    for combo in itertools.combinations(range(sys.n), m):
        keys = mat[:, combo] @ weights
        count = int(np.unique(keys).size)
        if count > best:
            best = count
            if best == ceiling:
                break
    return best


def vc_dimension_exact(sys: SetSystem, budget: int = 2_000_000) -> int:
    """Largest k such that some k-subset of indices is fully shattered."""
    if len(sys) == 0:
        return 0
    mat = sys.bool_matrix()
    best = 0
    for k in range(1, sys.n + 1):
        if 2**k > len(sys):
            break
        if math.comb(sys.n, k) > budget:
            raise BudgetError(f"C({sys.n},{k}) exceeds enumeration budget")
        weights = np.int64(1) << np.arange(k, dtype=np.int64)
        found = False
        for combo in itertools.combinations(range(sys.n), k):
            if np.unique(mat[:, combo] @ weights).size == 2**k:
                found = True
                break
        if not found:
            break
        best = k
    return best


def cs_profile(
    sys: SetSystem,
    sample_sizes: Sequence[int],
    length_caps: Sequence[int],
    trials: int,
    seed: int,
) -> ShatterProfile:
    """Sampled shallow shatter profile.

    For each (m, k): the max, over ``trials`` random m-index subsets, of the
    number of distinct projected vectors of length <= k.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for m in sample_sizes:
        if not 0 <= m <= sys.n:
            raise ValueError("sample size out of range")
    profile = ShatterProfile(trials=trials)
    mat = sys.bool_matrix()
    for m in sample_sizes:
        best = {k: 0 for k in length_caps}
        for t in range(trials):
            rng = spawn(seed, "cs_profile", m, t)
            idx = np.sort(rng.permutation(sys.n)[:m])
            sub = mat[:, idx]
            if m == 0:
                uniq = np.zeros((min(1, len(sys)), 0), dtype=bool)
            else:
                uniq = np.unique(np.packbits(sub, axis=1), axis=0)
                uniq = np.unpackbits(uniq, axis=1, count=m).astype(bool)
            lens = uniq.sum(axis=1)
            for k in length_caps:
                c = int((lens <= k).sum())
                if c > best[k]:
                    best[k] = c
        for k in length_caps:
            profile.entries[(m, k)] = best[k]
    return profile


def unit_distance_density(sys: SetSystem) -> Fraction:
    """|pairs at distance exactly 1| / |system|."""
    m = len(sys)
    if m < 1:
        raise ValueError("empty system")
    if m == 1:
        return Fraction(0, 1)
    dm = kernels.pairwise_distances(sys.words)
    edges = int((np.triu(dm == 1, k=1)).sum())
    return Fraction(edges, m)

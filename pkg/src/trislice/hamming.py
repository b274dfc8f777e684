"""Bit-packed points on fixed-weight Hamming slices and their triangle geometry.

Points are 0/1 vectors of dimension n packed into Python ints: bit i-1 of the
mask is coordinate i, so the leftmost character of the display string is
coordinate 1.  On such vectors the squared Euclidean distance equals the
Hamming distance, which keeps every distance computation an exact popcount.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .errors import ResourceLimitError

DEFAULT_MAX_DIMENSION = 4096
DEFAULT_MAX_POINTS = 2_000_000


@dataclass(frozen=True)
class SlicePoint:
    """A 0/1 vector of dimension n, packed into an int mask."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"mask 0x{self.bits:x} does not fit dimension {self.n}")

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "SlicePoint":
        """Build a point from 1-based coordinate indices."""
        bits = 0
        for i in support:
            if not 1 <= i <= n:
                raise ValueError(f"coordinate {i} outside 1..{n}")
            bits |= 1 << (i - 1)
        return cls(n, bits)

    @classmethod
    def from_bitstring(cls, s: str) -> "SlicePoint":
        """Parse a coordinate string such as '111100000' (coordinate 1 first)."""
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {s!r}")
        bits = 0
        for i, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << i
        return cls(len(s), bits)

    def support(self) -> tuple[int, ...]:
        """1-based coordinates set to 1."""
        return tuple(i + 1 for i in range(self.n) if (self.bits >> i) & 1)

    def bitstring(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.n))

    def hex(self) -> str:
        """Fixed-width hex of the packed mask (width ceil(n/4) digits)."""
        return format(self.bits, f"0{(self.n + 3) // 4}x")

    def __str__(self) -> str:
        return self.bitstring()


@dataclass(frozen=True)
class CoordinateProfile:
    """Counts a_j of coordinates i with x_i + y_i + z_i = j, for j in 0..3."""

    a0: int
    a1: int
    a2: int
    a3: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a0, self.a1, self.a2, self.a3)


def mask_hex(mask: int, n: int) -> str:
    return format(mask, f"0{(n + 3) // 4}x")


def _same_dimension(*points: SlicePoint) -> int:
    n = points[0].n
    for q in points[1:]:
        if q.n != n:
            raise ValueError(f"dimension mismatch: {q.n} != {n}")
    return n


def squared_distance(x: SlicePoint, y: SlicePoint) -> int:
    """Squared Euclidean distance between 0/1 vectors (= Hamming distance)."""
    _same_dimension(x, y)
    return (x.bits ^ y.bits).bit_count()


def half_squared_distance(x: SlicePoint, y: SlicePoint) -> int:
    """Half the squared distance, which is an exact integer for equal weights."""
    d = squared_distance(x, y)
    if d & 1:
        raise ValueError(f"odd squared distance {d}: points have different weight parity")
    return d >> 1


def mask_profile(xb: int, yb: int, zb: int, n: int) -> tuple[int, int, int, int]:
    """Coordinate profile (a0, a1, a2, a3) computed from raw masks via popcounts."""
    t3 = xb & yb & zb
    a3 = t3.bit_count()
    a1 = (xb ^ yb ^ zb).bit_count() - a3
    a2 = ((xb & yb) | (yb & zb) | (zb & xb)).bit_count() - a3
    return (n - a1 - a2 - a3, a1, a2, a3)


def coordinate_profile(x: SlicePoint, y: SlicePoint, z: SlicePoint) -> CoordinateProfile:
    """Count coordinates by the value of x_i + y_i + z_i."""
    n = _same_dimension(x, y, z)
    return CoordinateProfile(*mask_profile(x.bits, y.bits, z.bits, n))


def is_equilateral(x: SlicePoint, y: SlicePoint, z: SlicePoint, s2: int) -> bool:
    """True iff the three pairwise squared distances all equal s2.

    Repeated points are rejected rather than reported as non-equilateral, so
    that triangle enumerations stay well-defined.
    """
    _same_dimension(x, y, z)
    if x.bits == y.bits or y.bits == z.bits or z.bits == x.bits:
        raise ValueError("degenerate triangle: points must be pairwise distinct")
    return (
        (x.bits ^ y.bits).bit_count() == s2
        and (y.bits ^ z.bits).bit_count() == s2
        and (z.bits ^ x.bits).bit_count() == s2
    )


def _gosper_next(v: int) -> int:
    c = v & -v
    r = v + c
    return r | (((v ^ r) >> 2) // c)


def iter_slice_masks(n: int, k: int) -> Iterator[int]:
    """Yield all weight-k masks of width n in ascending (colexicographic) order."""
    if not 0 <= k <= n:
        raise ValueError(f"weight {k} outside 0..{n}")
    if k == 0:
        yield 0
        return
    v = (1 << k) - 1
    top = 1 << n
    while v < top:
        yield v
        if v == top - (1 << (n - k)):  # last pattern: k high bits set
            return
        v = _gosper_next(v)


def enumerate_slice_masks(
    n: int,
    k: int,
    max_dimension: int = DEFAULT_MAX_DIMENSION,
    max_points: int = DEFAULT_MAX_POINTS,
) -> list[int]:
    """All weight-k masks in canonical order, guarded by size limits."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if n > max_dimension:
        raise ResourceLimitError(f"dimension {n} exceeds configured limit {max_dimension}")
    if not 0 <= k <= n:
        raise ValueError(f"weight {k} outside 0..{n}")
    count = math.comb(n, k)
    if count > max_points:
        raise ResourceLimitError(
            f"slice has C({n},{k}) = {count} points, above the {max_points} budget"
        )
    return list(iter_slice_masks(n, k))


def enumerate_slice(
    n: int,
    k: int,
    max_dimension: int = DEFAULT_MAX_DIMENSION,
    max_points: int = DEFAULT_MAX_POINTS,
) -> list[SlicePoint]:
    """The weight-k slice of {0,1}^n in canonical (ascending mask) order.

    The order is colexicographic on supports, which coincides with ascending
    numeric order of the packed masks; certificates therefore serialize
    identically across runs and platforms.
    """
    masks = enumerate_slice_masks(n, k, max_dimension, max_points)
    return [SlicePoint(n, m) for m in masks]


def random_slice_mask(n: int, k: int, rng) -> int:
    """One uniform weight-k mask drawn from rng (used by sampled verifiers)."""
    bits = 0
    for i in rng.sample(range(n), k):
        bits |= 1 << i
    return bits


def permute_mask(mask: int, perm: list[int], n: int) -> int:
    """Apply a coordinate permutation (perm maps old index -> new index)."""
    out = 0
    for i in range(n):
        if (mask >> i) & 1:
            out |= 1 << perm[i]
    return out


def all_triangles_brute(masks: list[int], s2: int) -> list[tuple[int, int, int]]:
    """Index triples {i<j<l} at pairwise squared distance s2, by cubic scan.

    Deliberately naive; serves as the independent cross-check for the
    pair-closure enumeration in the search oracle.
    """
    out = []
    for i, j, l in combinations(range(len(masks)), 3):
        x, y, z = masks[i], masks[j], masks[l]
        if (
            (x ^ y).bit_count() == s2
            and (y ^ z).bit_count() == s2
            and (z ^ x).bit_count() == s2
        ):
            out.append((i, j, l))
    return out

"""Prime selection, pointwise tensor evaluation over F_p, and diagonality certificates.

The three-point tensor is the product of a coordinate factor F (nonzero exactly
when no coordinate sums to 1 across the triple) and a distance factor G
(nonzero exactly when p divides half the squared distance of the first two
arguments).  Restricted to a set with no equilateral triple of squared side
2p, the product is diagonal with nonzero diagonal, which is the hypothesis the
rank certificate machine-checks.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations
from typing import Sequence

from .errors import DiagonalityError
from .hamming import SlicePoint, _same_dimension, mask_hex

DEFAULT_SAMPLED_TRIPLES = 10_000


def is_prime(m: int) -> bool:
    """Deterministic trial-division primality test (exact for any int)."""
    if m < 2:
        return False
    if m % 2 == 0:
        return m == 2
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


def smallest_odd_prime_above(q) -> int:
    """Least odd prime strictly greater than q (int, float, or Fraction)."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError(f"threshold must be positive, got {q}")
    c = max(3, math.floor(q) + 1)
    if c % 2 == 0:
        c += 1
    while c <= q or not is_prime(c):
        c += 2
    return c


@dataclass(frozen=True)
class TriangleParams:
    """Instance tuple (n, k, p, degree bound) shared by all certificate modules.

    p is the least odd prime exceeding k/4; the degree bound is
    min(3n, n + 2(p-1)) and block_weight_cap is its floor third, the weight
    radius that caps every slice key in a decomposition.
    """

    n: int
    k: int
    p: int
    degree_bound: int
    block_weight_cap: int

    @classmethod
    def for_slice(cls, n: int, k: int) -> "TriangleParams":
        # The canonical range is k <= n/2; complementing coordinates is a
        # distance isometry sending weight k to n-k, so the inclusive midpoint
        # ceil(n/2) is admitted too (C(7,4) is the mirror of C(7,3)).
        if n < 2:
            raise ValueError(f"dimension must be >= 2, got {n}")
        if not 1 <= k <= (n + 1) // 2:
            raise ValueError(f"weight {k} outside 1..ceil({n}/2)")
        p = smallest_odd_prime_above(Fraction(k, 4))
        d = min(3 * n, n + 2 * (p - 1))
        return cls(n=n, k=k, p=p, degree_bound=d, block_weight_cap=d // 3)

    def __post_init__(self) -> None:
        if self.p < 3 or self.p % 2 == 0 or not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not an odd prime")
        if 4 * self.p <= self.k:
            raise ValueError(f"p = {self.p} does not exceed k/4 = {self.k}/4")

    @property
    def side_squared(self) -> int:
        return 2 * self.p

    @property
    def slice_size(self) -> int:
        return math.comb(self.n, self.k)

    @property
    def active_window(self) -> bool:
        """True when 2p <= k, the only regime where the tensor can fire off-diagonal."""
        return 2 * self.p <= self.k


def _f_masks(xb: int, yb: int, zb: int, n: int, p: int) -> int:
    acc = 1
    for i in range(n):
        s = ((xb >> i) & 1) + ((yb >> i) & 1) + ((zb >> i) & 1)
        if s == 1:
            return 0
        acc = acc * (s - 1) % p
    return acc


def _g_masks(xb: int, yb: int, p: int) -> int:
    d = (xb ^ yb).bit_count()
    if d & 1:
        raise ValueError(f"odd squared distance {d}: half-distance is not an integer")
    return (1 - pow((d >> 1) % p, p - 1, p)) % p


def eval_F(x: SlicePoint, y: SlicePoint, z: SlicePoint, p: int) -> int:
    """Product over coordinates of (x_i + y_i + z_i - 1), reduced mod p."""
    n = _same_dimension(x, y, z)
    return _f_masks(x.bits, y.bits, z.bits, n, p)


def eval_G(x: SlicePoint, y: SlicePoint, p: int) -> int:
    """1 - (half squared distance)^(p-1) mod p.

    The half-distance is computed as an exact integer and reduced before
    exponentiation; no modular inverse is needed here.
    """
    _same_dimension(x, y)
    return _g_masks(x.bits, y.bits, p)


def eval_H(x: SlicePoint, y: SlicePoint, z: SlicePoint, p: int) -> int:
    """The product tensor F(x,y,z) * G(x,y) mod p."""
    n = _same_dimension(x, y, z)
    f = _f_masks(x.bits, y.bits, z.bits, n, p)
    if f == 0:
        # G may be undefined (odd distance) off the equal-weight domain, but the
        # product is already zero there.
        return 0
    return f * _g_masks(x.bits, y.bits, p) % p


def _h_masks(xb: int, yb: int, zb: int, n: int, p: int) -> int:
    f = _f_masks(xb, yb, zb, n, p)
    if f == 0:
        return 0
    return f * _g_masks(xb, yb, p) % p


@dataclass(frozen=True)
class DiagonalCertificate:
    """Witness that the tensor restricted to a set is diagonal and nonzero there.

    In complete mode every ordered off-diagonal triple was evaluated, so
    off_diagonal_checked equals |A|^3 - |A|.
    """

    params: TriangleParams
    set_size: int
    diagonal_values: dict[int, int]
    off_diagonal_checked: int
    status: str

    def to_json_obj(self) -> dict:
        n = self.params.n
        return {
            "set_size": str(self.set_size),
            "status": self.status,
            "off_diagonal_checked": str(self.off_diagonal_checked),
            "diagonal_values": [
                [mask_hex(m, n), str(v)] for m, v in sorted(self.diagonal_values.items())
            ],
        }


def _check_points(points: Sequence[SlicePoint], params: TriangleParams) -> list[int]:
    masks = []
    for pt in points:
        if pt.n != params.n:
            raise ValueError(f"point dimension {pt.n} != {params.n}")
        if pt.weight != params.k:
            raise ValueError(f"point weight {pt.weight} != {params.k}")
        masks.append(pt.bits)
    if len(set(masks)) != len(masks):
        raise ValueError("points must be pairwise distinct")
    return masks


def verify_diagonal_on(
    points: Sequence[SlicePoint],
    params: TriangleParams,
    mode: str = "complete",
    samples: int = DEFAULT_SAMPLED_TRIPLES,
    seed: int = 0,
) -> DiagonalCertificate:
    """Certify that the tensor restricted to the given set is diagonal.

    Complete mode walks every ordered triple (via unordered multisets, since
    the coordinate factor is symmetric) and also re-checks that the set really
    is free of equilateral triples at squared side 2p.  Sampled mode checks
    all diagonal values plus `samples` seeded off-diagonal triples.  Raises
    DiagonalityError naming the offending triple on any violation.
    """
    masks = _check_points(points, params)
    m = len(masks)
    n, p = params.n, params.p
    s2 = params.side_squared

    diagonal_values: dict[int, int] = {}
    for xb in masks:
        h = _f_masks(xb, xb, xb, n, p)  # G(x,x) = 1
        if h == 0:
            raise DiagonalityError(
                "zero_diagonal",
                (xb,),
                0,
                f"diagonal value vanished at {mask_hex(xb, n)}",
            )
        diagonal_values[xb] = h

    off_checked = 0
    if mode == "complete":
        for i, j, l in combinations_with_replacement(range(m), 3):
            if i == j == l:
                continue
            a, b, c = masks[i], masks[j], masks[l]
            if i < j < l:
                dab = (a ^ b).bit_count()
                if dab == s2 and (b ^ c).bit_count() == s2 and (c ^ a).bit_count() == s2:
                    raise DiagonalityError(
                        "equilateral_triple",
                        (a, b, c),
                        s2,
                        "set contains an equilateral triple at squared side "
                        f"{s2}: {mask_hex(a, n)}, {mask_hex(b, n)}, {mask_hex(c, n)}",
                    )
            f = _f_masks(a, b, c, n, p)
            if f == 0:
                off_checked += 6 if i < j < l else 3
                continue
            for u, v, w in sorted(set(permutations((i, j, l)))):
                h = f * _g_masks(masks[u], masks[v], p) % p
                if h != 0:
                    raise DiagonalityError(
                        "offdiagonal_nonzero",
                        (masks[u], masks[v], masks[w]),
                        h,
                        f"tensor = {h} != 0 at off-diagonal triple "
                        f"({mask_hex(masks[u], n)}, {mask_hex(masks[v], n)}, "
                        f"{mask_hex(masks[w], n)})",
                    )
                off_checked += 1
        expected = m**3 - m
        if off_checked != expected:
            raise RuntimeError(
                f"internal inconsistency: checked {off_checked} != {expected} triples"
            )
        status = "complete"
    elif mode == "sampled":
        rng = random.Random(seed)
        if m > 1:
            while off_checked < samples:
                i = rng.randrange(m)
                j = rng.randrange(m)
                l = rng.randrange(m)
                if i == j == l:
                    continue
                h = _h_masks(masks[i], masks[j], masks[l], n, p)
                if h != 0:
                    raise DiagonalityError(
                        "offdiagonal_nonzero",
                        (masks[i], masks[j], masks[l]),
                        h,
                        f"tensor = {h} != 0 at sampled off-diagonal triple",
                    )
                off_checked += 1
        status = "sampled"
    else:
        raise ValueError(f"unknown mode {mode!r}")

    return DiagonalCertificate(
        params=params,
        set_size=m,
        diagonal_values=diagonal_values,
        off_diagonal_checked=off_checked,
        status=status,
    )

"""Symbolic multilinear expansion of the triangle tensor and slice decompositions.

Working in the quotient ring F_p[vars]/(v^2 - v), every polynomial identity
here holds pointwise on 0/1 assignments, so multiplication is an OR-merge of
exponent masks.  A monomial over the three variable blocks packs its exponent
masks into one integer key (ex | ey << n | ez << 2n), and the whole map lives
in sorted numpy arrays; collection is a sort-and-sum, and the pointwise truth
table of a map is a subset-sum transform of its coefficient vector.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from .bounds import count_low_weight
from .errors import ResourceLimitError
from .hamming import iter_slice_masks, mask_hex, random_slice_mask
from .tensors import _f_masks, _h_masks, is_prime

DEFAULT_MAX_N = 10
DEFAULT_MAX_P = 5
DEFAULT_TABLE_BYTES = 1 << 30
BLOCK_NAMES = ("X", "Y", "Z")


def eval_H_quotient(xb: int, yb: int, zb: int, n: int, p: int) -> int:
    """Pointwise tensor value extended to all of the 0/1 cube.

    Realizes the halved distance as multiplication by inverse(2) mod p (the
    one place modular inversion occurs), so odd distances are meaningful; on
    even distances this agrees with the integer-half evaluation.
    """
    f = _f_masks(xb, yb, zb, n, p)
    if f == 0:
        return 0
    inv2 = (p + 1) // 2
    d = (xb ^ yb).bit_count()
    g = (1 - pow(d * inv2 % p, p - 1, p)) % p
    return f * g % p


@dataclass(frozen=True)
class MultilinearMonomial:
    """One collected term: nonzero coefficient and a 0/1 exponent mask per block."""

    coeff: int
    ex: int
    ey: int
    ez: int

    def total_degree(self) -> int:
        return self.ex.bit_count() + self.ey.bit_count() + self.ez.bit_count()


def _pack(ex: int, ey: int, ez: int, n: int) -> int:
    return ex | (ey << n) | (ez << (2 * n))


def _unpack(key: int, n: int) -> tuple[int, int, int]:
    mask = (1 << n) - 1
    return key & mask, (key >> n) & mask, (key >> (2 * n)) & mask


def _collect(keys: np.ndarray, coeffs: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    if keys.size == 0:
        return keys, coeffs
    uniq, inv = np.unique(keys, return_inverse=True)
    acc = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(acc, inv, coeffs)
    acc %= p
    nz = acc != 0
    return uniq[nz], acc[nz]


def _poly_mul(k1, c1, k2, c2, p: int) -> tuple[np.ndarray, np.ndarray]:
    kk = (k1[:, None] | k2[None, :]).ravel()
    cc = (c1[:, None] * c2[None, :]).ravel() % p
    return _collect(kk, cc, p)


def _half_distance_map(n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    inv2 = (p + 1) // 2
    keys, coeffs = [], []
    for i in range(n):
        bx, by = 1 << i, 1 << (n + i)
        keys += [bx, by, bx | by]
        coeffs += [inv2, inv2, p - 1]  # (x_i + y_i)/2 - x_i y_i
    return np.asarray(keys, dtype=np.int64), np.asarray(coeffs, dtype=np.int64)


def _distance_factor_map(n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    # 1 - h^(p-1) by square-and-multiply with collection at every step
    hk, hc = _half_distance_map(n, p)
    rk = np.asarray([0], dtype=np.int64)
    rc = np.asarray([1], dtype=np.int64)
    e = p - 1
    bk, bc = hk, hc
    while e:
        if e & 1:
            rk, rc = _poly_mul(rk, rc, bk, bc, p)
        e >>= 1
        if e:
            bk, bc = _poly_mul(bk, bc, bk, bc, p)
    rc = (-rc) % p
    rk = np.concatenate([rk, np.asarray([0], dtype=np.int64)])
    rc = np.concatenate([rc, np.asarray([1], dtype=np.int64)])
    return _collect(rk, rc, p)


@dataclass(frozen=True)
class MonomialMap:
    """Collected multilinear form of the tensor: sorted packed keys, coefficients in [1, p-1]."""

    n: int
    p: int
    degree_bound: int
    keys: np.ndarray
    coeffs: np.ndarray

    def __len__(self) -> int:
        return int(self.keys.size)

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.keys)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if len(self) else 0

    def monomial(self, i: int) -> MultilinearMonomial:
        ex, ey, ez = _unpack(int(self.keys[i]), self.n)
        return MultilinearMonomial(coeff=int(self.coeffs[i]), ex=ex, ey=ey, ez=ez)

    def monomials(self) -> Iterator[MultilinearMonomial]:
        for i in range(len(self)):
            yield self.monomial(i)

    def evaluate(self, xb: int, yb: int, zb: int) -> int:
        """Direct pointwise evaluation (vector containment scan; fine for occasional use)."""
        point = _pack(xb, yb, zb, self.n)
        hit = (self.keys & ~np.int64(point)) == 0
        return int(self.coeffs[hit].sum() % self.p)

    def dense_table(self, max_bytes: int = DEFAULT_TABLE_BYTES) -> np.ndarray:
        """Truth table on the 3n-bit cube via an in-place subset-sum transform."""
        size = 1 << (3 * self.n)
        if size > max_bytes:
            raise ResourceLimitError(
                f"dense table needs {size} bytes, above the {max_bytes} budget"
            )
        table = np.zeros(size, dtype=np.int8)
        table[self.keys] = self.coeffs.astype(np.int8)
        for b in range(3 * self.n):
            step = 1 << b
            view = table.reshape(-1, 2 * step)
            view[:, step:] += view[:, :step]
            view[:, step:] %= self.p
        return table

    def to_json_obj(self, monomial_limit: int | None = None) -> dict:
        obj = {
            "n": self.n,
            "p": self.p,
            "degree_bound": self.degree_bound,
            "term_count": str(len(self)),
            "max_degree": str(self.max_degree()),
        }
        if monomial_limit is not None and len(self) <= monomial_limit:
            obj["monomials"] = [
                {
                    "ex": mask_hex(m.ex, self.n),
                    "ey": mask_hex(m.ey, self.n),
                    "ez": mask_hex(m.ez, self.n),
                    "coeff": str(m.coeff),
                }
                for m in self.monomials()
            ]
        return obj


def expand_H(n: int, p: int, max_n: int = DEFAULT_MAX_N, max_p: int = DEFAULT_MAX_P) -> MonomialMap:
    """Fully collected multilinear expansion of the tensor in 3n variables.

    Multiplies the distance factor by the n coordinate factors one at a time,
    collecting after every step so intermediate sizes track the final term
    count instead of the 4^n raw product.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p = {p} is not an odd prime")
    if n > max_n or p > max_p:
        raw = 4**n * (1 + 3 * n + 9 * math.comb(n, 2) * ((p - 1) // 2) ** 2)
        raise ResourceLimitError(
            f"expansion budget is n <= {max_n}, p <= {max_p}; (n={n}, p={p}) would "
            f"touch on the order of {raw:.2e} raw terms"
        )
    keys, coeffs = _distance_factor_map(n, p)
    for i in range(n):
        bx = np.int64(1 << i)
        by = np.int64(1 << (n + i))
        bz = np.int64(1 << (2 * n + i))
        kk = np.concatenate([keys | bx, keys | by, keys | bz, keys])
        cc = np.concatenate([coeffs, coeffs, coeffs, (-coeffs) % p])
        keys, coeffs = _collect(kk, cc, p)
    degree_bound = min(3 * n, n + 2 * (p - 1))
    out = MonomialMap(n=n, p=p, degree_bound=degree_bound, keys=keys, coeffs=coeffs)
    if out.max_degree() > degree_bound:
        raise RuntimeError(
            f"internal inconsistency: degree {out.max_degree()} exceeds bound {degree_bound}"
        )
    return out


@dataclass(frozen=True)
class ExpansionCheckReport:
    mode: str
    domain: str
    checked: int
    mismatches: tuple[tuple[int, int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _scope_triples(
    m: MonomialMap, sample: int | None, seed: int, k: int | None
) -> tuple[str, str, Iterator[tuple[int, int, int]]]:
    n = m.n
    if sample is None and k is not None:
        def every_slice() -> Iterator[tuple[int, int, int]]:
            masks = list(iter_slice_masks(n, k))
            for xb in masks:
                for yb in masks:
                    for zb in masks:
                        yield xb, yb, zb

        return "exhaustive", "slice", every_slice()
    if sample is None:
        def every() -> Iterator[tuple[int, int, int]]:
            mask = (1 << n) - 1
            for point in range(1 << (3 * n)):
                yield point & mask, (point >> n) & mask, point >> (2 * n)

        return "exhaustive", "cube", every()

    rng = random.Random(seed)

    def sampled() -> Iterator[tuple[int, int, int]]:
        for _ in range(sample):
            if k is None:
                yield (
                    rng.getrandbits(n),
                    rng.getrandbits(n),
                    rng.getrandbits(n),
                )
            else:
                yield (
                    random_slice_mask(n, k, rng),
                    random_slice_mask(n, k, rng),
                    random_slice_mask(n, k, rng),
                )

    return "sampled", "cube" if k is None else "slice", sampled()


def _check_against_evaluator(
    m: MonomialMap,
    values,
    sample: int | None,
    seed: int,
    k: int | None,
    max_mismatches: int = 5,
) -> ExpansionCheckReport:
    mode, domain, triples = _scope_triples(m, sample, seed, k)
    n, p = m.n, m.p
    checked = 0
    mismatches: list[tuple[int, int, int]] = []
    for xb, yb, zb in triples:
        want = eval_H_quotient(xb, yb, zb, n, p)
        if (xb ^ yb).bit_count() % 2 == 0 and want != _h_masks(xb, yb, zb, n, p):
            raise RuntimeError("quotient evaluation disagrees with the integer-half form")
        got = int(values[_pack(xb, yb, zb, n)])
        checked += 1
        if got != want:
            mismatches.append((xb, yb, zb))
            if len(mismatches) >= max_mismatches:
                break
    return ExpansionCheckReport(
        mode=mode, domain=domain, checked=checked, mismatches=tuple(mismatches)
    )


def verify_expansion(
    m: MonomialMap,
    sample: int | None = None,
    seed: int = 0,
    k: int | None = None,
    max_table_bytes: int = DEFAULT_TABLE_BYTES,
) -> ExpansionCheckReport:
    """Compare the expansion's truth table against pointwise tensor evaluation.

    sample=None walks a whole domain exhaustively: the weight-k slice cube
    when k is given, the full 3n-bit cube when it is not.  With a sample
    count, that many seeded triples are drawn from the same domain.
    """
    return _check_against_evaluator(m, m.dense_table(max_table_bytes), sample, seed, k)


@dataclass(frozen=True)
class SliceDecomposition:
    """Grouping of a monomial map by (lowest-weight block, exponent key).

    perm reorders monomial indices so each entry occupies the contiguous range
    entry_start[i]:entry_start[i+1]; entry keys all have weight at most the
    map's block_weight_cap, which is what certifies the rank ceiling.
    """

    map: MonomialMap
    perm: np.ndarray
    entry_block: np.ndarray
    entry_key: np.ndarray
    entry_start: np.ndarray

    @property
    def entry_count(self) -> int:
        return int(self.entry_block.size)

    def max_entry_key_weight(self) -> int:
        return int(np.bitwise_count(self.entry_key).max()) if self.entry_count else 0

    def covered_indices(self) -> np.ndarray:
        return self.perm[: int(self.entry_start[-1])] if self.entry_count else self.perm[:0]

    def entries(self) -> Iterator[tuple[str, int, int]]:
        """Yield (block, key mask, term count) per entry."""
        for i in range(self.entry_count):
            count = int(self.entry_start[i + 1] - self.entry_start[i])
            yield BLOCK_NAMES[int(self.entry_block[i])], int(self.entry_key[i]), count

    def drop_entry(self, i: int) -> "SliceDecomposition":
        """Copy with entry i removed (for exercising failure detection)."""
        keep = np.arange(self.entry_count) != i
        sizes = np.diff(self.entry_start)[keep]
        perm = np.concatenate(
            [
                self.perm[int(self.entry_start[j]) : int(self.entry_start[j + 1])]
                for j in range(self.entry_count)
                if j != i
            ]
        )
        starts = np.concatenate([[0], np.cumsum(sizes)])
        return replace(
            self,
            perm=perm,
            entry_block=self.entry_block[keep],
            entry_key=self.entry_key[keep],
            entry_start=starts,
        )

    def to_json_obj(self) -> dict:
        return {
            "entry_count": str(self.entry_count),
            "max_entry_key_weight": str(self.max_entry_key_weight()),
            "entries": [
                {"block": b, "key": mask_hex(key, self.map.n), "terms": str(c)}
                for b, key, c in self.entries()
            ],
        }


def build_slice_decomposition(m: MonomialMap) -> SliceDecomposition:
    """Assign every monomial to its minimum-weight block (ties X, then Y, then Z).

    The degree bound forces each minimum block weight to at most
    floor(degree_bound/3); a violation would contradict the expansion and
    raises instead of silently widening the ceiling.
    """
    mask = np.int64((1 << m.n) - 1)
    ex = m.keys & mask
    ey = (m.keys >> m.n) & mask
    ez = (m.keys >> (2 * m.n)) & mask
    wx = np.bitwise_count(ex)
    wy = np.bitwise_count(ey)
    wz = np.bitwise_count(ez)
    min_weight = np.minimum(np.minimum(wx, wy), wz)
    cap = m.degree_bound // 3
    if len(m) and int(min_weight.max()) > cap:
        raise RuntimeError(
            f"internal inconsistency: a monomial's minimum block weight exceeds {cap}"
        )
    block = np.where(wx == min_weight, 0, np.where(wy == min_weight, 1, 2)).astype(np.int8)
    key = np.where(block == 0, ex, np.where(block == 1, ey, ez))
    perm = np.lexsort((key, block))
    blocks_sorted = block[perm]
    keys_sorted = key[perm]
    if len(m):
        edge = (blocks_sorted[1:] != blocks_sorted[:-1]) | (keys_sorted[1:] != keys_sorted[:-1])
        starts = np.concatenate([[0], np.flatnonzero(edge) + 1, [len(m)]])
    else:
        starts = np.asarray([0], dtype=np.int64)
    first = starts[:-1]
    return SliceDecomposition(
        map=m,
        perm=perm,
        entry_block=blocks_sorted[first],
        entry_key=keys_sorted[first],
        entry_start=starts.astype(np.int64),
    )


@dataclass(frozen=True)
class SliceCountReport:
    entry_count: int
    ceiling: int

    @property
    def within_bound(self) -> bool:
        return self.entry_count <= self.ceiling


def slice_count(dec: SliceDecomposition) -> SliceCountReport:
    """Entry count next to the exact ceiling 3 * (weight-<=cap count)."""
    cap = dec.map.degree_bound // 3
    report = SliceCountReport(
        entry_count=dec.entry_count,
        ceiling=3 * count_low_weight(dec.map.n, cap),
    )
    if not report.within_bound:
        raise RuntimeError(
            f"internal inconsistency: {report.entry_count} entries exceed {report.ceiling}"
        )
    return report


@dataclass(frozen=True)
class DecompositionReport:
    partition_ok: bool
    pointwise: ExpansionCheckReport
    entry_count: int
    max_entry_key_weight: int

    @property
    def ok(self) -> bool:
        return self.partition_ok and self.pointwise.ok

    @property
    def witness(self) -> tuple[int, int, int] | None:
        return self.pointwise.mismatches[0] if self.pointwise.mismatches else None


def verify_decomposition(
    dec: SliceDecomposition,
    sample: int | None = None,
    seed: int = 0,
    k: int | None = None,
    max_table_bytes: int = DEFAULT_TABLE_BYTES,
) -> DecompositionReport:
    """Check that summing the entries reproduces the tensor pointwise.

    The evaluation is rebuilt from the entry ranges (not the original map), so
    a missing or corrupted entry shows up both in the partition check and as a
    concrete witness triple in the pointwise comparison.
    """
    m = dec.map
    covered = dec.covered_indices()
    partition_ok = covered.size == len(m) and bool(
        np.array_equal(np.sort(covered), np.arange(len(m)))
    )
    rebuilt = MonomialMap(
        n=m.n,
        p=m.p,
        degree_bound=m.degree_bound,
        keys=m.keys[covered],
        coeffs=m.coeffs[covered],
    )
    # rebuilt keys are unique (a subset of the map's), order does not matter
    pointwise = _check_against_evaluator(
        rebuilt, rebuilt.dense_table(max_table_bytes), sample, seed, k
    )
    return DecompositionReport(
        partition_ok=partition_ok,
        pointwise=pointwise,
        entry_count=dec.entry_count,
        max_entry_key_weight=dec.max_entry_key_weight(),
    )

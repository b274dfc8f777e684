"""Identity and invariant suites: exhaustive or sampled checks tying the
distance geometry, the profile identities, and the tensor evaluations together.

Every predicate checked here is invariant under permuting the three points, so
the exhaustive walks cover unordered multisets (with repeats) and still
certify the full ordered triple space; a dedicated batch double-checks the
permutation invariance itself.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import permutations

from .hamming import SlicePoint, enumerate_slice_masks, mask_profile, permute_mask
from .oracle import enumerate_triangles, greedy_triangle_free
from .tensors import (
    DiagonalCertificate,
    TriangleParams,
    _f_masks,
    _g_masks,
    verify_diagonal_on,
)

MAX_RECORDED_VIOLATIONS = 20
DEFAULT_SPOT_CHECKS = 500


@dataclass
class SuiteReport:
    name: str
    n: int
    k: int
    triples_checked: int = 0
    pairs_checked: int = 0
    checks: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def flag(self, message: str) -> None:
        if len(self.violations) < MAX_RECORDED_VIOLATIONS:
            self.violations.append(message)

    def to_json_obj(self) -> dict:
        return {
            "name": self.name,
            "triples_checked": str(self.triples_checked),
            "pairs_checked": str(self.pairs_checked),
            "checks": str(self.checks),
            "passed": self.passed,
            "violations": list(self.violations),
        }


def _multisets(m: int):
    for i in range(m):
        for j in range(i, m):
            for l in range(j, m):
                yield i, j, l


def _sampled_triples(m: int, count: int, seed: int):
    rng = random.Random(seed)
    for _ in range(count):
        yield rng.randrange(m), rng.randrange(m), rng.randrange(m)


def hamming_identity_suite(
    n: int,
    k: int,
    sample: int | None = None,
    seed: int = 0,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
) -> SuiteReport:
    """Distance and profile identities over the weight-k slice of {0,1}^n.

    Per triple: the profile counts partition the coordinates and weigh up to
    3k; the three pairwise distances sum to 2(a1 + a2); and when a1 = 0 the
    distances are all equal to 2(n - k - a0) with half-distance at most k/2.
    A seeded spot batch checks permutation invariance of the profile and the
    triangle inequality of the root distances.
    """
    report = SuiteReport(name="hamming_identities", n=n, k=k)
    masks = enumerate_slice_masks(n, k)
    m = len(masks)
    bc = int.bit_count
    k3 = 3 * k

    triples = _multisets(m) if sample is None else _sampled_triples(m, sample, seed)
    for i, j, l in triples:
        x, y, z = masks[i], masks[j], masks[l]
        t3 = x & y & z
        a3 = bc(t3)
        a1 = bc(x ^ y ^ z) - a3
        a2 = bc((x & y) | (y & z) | (z & x)) - a3
        a0 = n - a1 - a2 - a3
        dxy = bc(x ^ y)
        dyz = bc(y ^ z)
        dzx = bc(z ^ x)
        report.triples_checked += 1
        report.checks += 3
        if a0 < 0 or a1 + 2 * a2 + 3 * a3 != k3:
            report.flag(f"profile identity failed at ({x:#x},{y:#x},{z:#x})")
        if dxy + dyz + dzx != 2 * (a1 + a2):
            report.flag(f"distance-sum identity failed at ({x:#x},{y:#x},{z:#x})")
        if a1 == 0:
            report.checks += 1
            d = 2 * (n - k - a0)
            if not (dxy == dyz == dzx == d) or d > k:
                report.flag(f"a1=0 distance bound failed at ({x:#x},{y:#x},{z:#x})")

    rng = random.Random(seed + 1)
    for _ in range(min(spot_checks, m * m * m)):
        x, y, z = (masks[rng.randrange(m)] for _ in range(3))
        base = mask_profile(x, y, z, n)
        report.checks += 2
        if any(mask_profile(*perm, n) != base for perm in permutations((x, y, z))):
            report.flag(f"profile not symmetric at ({x:#x},{y:#x},{z:#x})")
        perm = list(range(n))
        rng.shuffle(perm)
        relabeled = mask_profile(
            permute_mask(x, perm, n), permute_mask(y, perm, n), permute_mask(z, perm, n), n
        )
        if relabeled != base:
            report.flag(f"profile not permutation-invariant at ({x:#x},{y:#x},{z:#x})")
        # sqrt(dxy) <= sqrt(dyz) + sqrt(dzx), squared to stay in integers
        a, b, c = bc(x ^ y), bc(y ^ z), bc(z ^ x)
        report.checks += 1
        if a > b + c and (a - b - c) ** 2 > 4 * b * c:
            report.flag(f"triangle inequality failed at ({x:#x},{y:#x},{z:#x})")
    return report


def tensor_identity_suite(
    params: TriangleParams,
    sample: int | None = None,
    seed: int = 0,
    spot_checks: int = DEFAULT_SPOT_CHECKS,
) -> SuiteReport:
    """Support identities of the tensor factors over the slice.

    Checks F != 0 iff a1 = 0 (and its distance-bound consequence), G != 0 iff
    p divides the half-distance (over all pairs), the closed-form diagonal
    value, that a nonzero product off the diagonal forces an equilateral
    triple at squared side 2p, and symmetry of F under argument permutations.
    """
    n, k, p = params.n, params.k, params.p
    report = SuiteReport(name="tensor_identities", n=n, k=k)
    masks = enumerate_slice_masks(n, k)
    m = len(masks)
    bc = int.bit_count
    s2 = params.side_squared

    diag_expected = (-1) ** (n - k) * pow(2, k, p) % p
    for x in masks:
        report.checks += 1
        if _f_masks(x, x, x, n, p) != diag_expected or diag_expected == 0:
            report.flag(f"diagonal value wrong at {x:#x}")

    if sample is None:
        pair_iter = ((i, j) for i in range(m) for j in range(i, m))
    else:
        pair_rng = random.Random(seed + 2)
        pair_iter = ((pair_rng.randrange(m), pair_rng.randrange(m)) for _ in range(sample))
    for i, j in pair_iter:
        x, y = masks[i], masks[j]
        half = bc(x ^ y) >> 1
        g = _g_masks(x, y, p)
        report.pairs_checked += 1
        report.checks += 1
        if (g != 0) != (half % p == 0):
            report.flag(f"distance factor support wrong at ({x:#x},{y:#x})")

    triples = _multisets(m) if sample is None else _sampled_triples(m, sample, seed)
    for i, j, l in triples:
        x, y, z = masks[i], masks[j], masks[l]
        t3 = x & y & z
        a3 = bc(t3)
        a1 = bc(x ^ y ^ z) - a3
        f = _f_masks(x, y, z, n, p)
        report.triples_checked += 1
        report.checks += 1
        if (f != 0) != (a1 == 0):
            report.flag(f"coordinate factor support wrong at ({x:#x},{y:#x},{z:#x})")
        if f != 0:
            dxy, dyz, dzx = bc(x ^ y), bc(y ^ z), bc(z ^ x)
            report.checks += 1
            if not (dxy == dyz == dzx and dxy <= k and dxy < 4 * p):
                report.flag(f"nonzero F without bounded equal distances at ({x:#x},{y:#x},{z:#x})")
            distinct = x != y and y != z and z != x
            for u, v, _w in permutations((x, y, z)):
                h = f * _g_masks(u, v, p) % p
                report.checks += 1
                if h != 0 and distinct and dxy != s2:
                    report.flag(f"nonzero product off an equilateral triple at ({x:#x},{y:#x},{z:#x})")
                if h != 0 and not distinct and not (x == y == z):
                    report.flag(f"nonzero product at repeated points ({x:#x},{y:#x},{z:#x})")

    rng = random.Random(seed + 3)
    for _ in range(min(spot_checks, m * m * m)):
        x, y, z = (masks[rng.randrange(m)] for _ in range(3))
        base = _f_masks(x, y, z, n, p)
        report.checks += 1
        if any(_f_masks(*perm, n, p) != base for perm in permutations((x, y, z))):
            report.flag(f"coordinate factor not symmetric at ({x:#x},{y:#x},{z:#x})")
    return report


@dataclass
class VerifyBundle:
    params: TriangleParams
    hamming: SuiteReport
    tensor: SuiteReport
    witness_size: int
    diagonal: DiagonalCertificate

    @property
    def passed(self) -> bool:
        return self.hamming.passed and self.tensor.passed


def run_verify(
    params: TriangleParams,
    sample: int | None = None,
    seed: int = 0,
    diagonal_mode: str | None = None,
    max_complete_witness: int = 300,
) -> VerifyBundle:
    """Run both identity suites plus diagonality on a greedy triangle-free witness.

    Raises DiagonalityError if the witness fails certification (which would
    mean an implementation bug, since the witness is grown triangle-free).
    """
    hamming_report = hamming_identity_suite(params.n, params.k, sample=sample, seed=seed)
    tensor_report = tensor_identity_suite(params, sample=sample, seed=seed)
    h = enumerate_triangles(params)
    witness = greedy_triangle_free(h, seed=seed)
    points = [SlicePoint(params.n, h.vertex_masks[i]) for i in witness]
    if diagonal_mode is None:
        diagonal_mode = "complete" if len(points) <= max_complete_witness else "sampled"
    certificate = verify_diagonal_on(points, params, mode=diagonal_mode, seed=seed)
    return VerifyBundle(
        params=params,
        hamming=hamming_report,
        tensor=tensor_report,
        witness_size=len(witness),
        diagonal=certificate,
    )

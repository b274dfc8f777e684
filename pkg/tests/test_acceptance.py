"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run `pytest tests/test_acceptance.py -v -rA -s` to see one line per criterion.
All tolerances are pinned in this module; nothing is deferred to calibration.
"""

import functools
import json
import math
import random
import subprocess
import sys
import time
from fractions import Fraction

from trislice.bounds import (
    asymptotic_constant,
    count_low_weight,
    growth_trend,
    max_binomial_term,
    optimal_t,
)
from trislice.expansion import build_slice_decomposition, expand_H, slice_count, verify_decomposition, verify_expansion
from trislice.hamming import SlicePoint
from trislice.oracle import enumerate_triangles, greedy_triangle_free, verify_triangle_free
from trislice.suites import hamming_identity_suite, tensor_identity_suite
from trislice.tensors import TriangleParams, verify_diagonal_on


def criterion(num: int, title: str):
    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"ACCEPTANCE FAIL: criterion {num} - {title}")
                raise
            print(f"ACCEPTANCE PASS: criterion {num} - {title}")

        return inner

    return wrap


def run_cli(*argv: str) -> tuple[int, bytes]:
    proc = subprocess.run(
        [sys.executable, "-m", "trislice", *argv], capture_output=True
    )
    return proc.returncode, proc.stdout


@criterion(1, "constant reproduction: c = 0.01446, stable to five digits, under 1 s")
def test_criterion_1_constant():
    start = time.perf_counter()
    five = asymptotic_constant(digits=5)
    elapsed = time.perf_counter() - start
    assert five.c_string() == "0.01446"
    assert elapsed < 1.0, f"constant took {elapsed:.3f}s"

    code, out = run_cli("constant", "--digits", "5")
    assert code == 0
    assert json.loads(out)["results"]["c"] == "0.01446"

    ten = asymptotic_constant(digits=10)
    assert ten.c_string()[:7] == "0.01446"  # first five decimal digits stable


@criterion(2, "distance-identity suite: exhaustive for n <= 10, all k <= n/2, zero violations")
def test_criterion_2_distance_identities():
    total = 0
    for n in range(1, 11):
        for k in range(0, n // 2 + 1):
            report = hamming_identity_suite(n, k)
            assert report.violations == [], f"(n={n}, k={k}): {report.violations[:3]}"
            total += report.triples_checked
    assert total > 4_000_000  # the multiset walk really covered the triple space


@criterion(3, "tensor suite: exhaustive for n <= 8, all valid (k, p), zero violations")
def test_criterion_3_tensor_identities():
    checked = 0
    for n in range(2, 9):
        for k in range(1, (n + 1) // 2 + 1):
            params = TriangleParams.for_slice(n, k)
            report = tensor_identity_suite(params)
            assert report.violations == [], f"(n={n}, k={k}): {report.violations[:3]}"
            checked += report.triples_checked + report.pairs_checked
    # multisets cover the ordered triple space six-to-one
    assert checked > 100_000


@criterion(4, "decomposition certification at (7,4,3) and (9,4,3), ceilings 192 and 768")
def test_criterion_4_decomposition():
    # exhaustive agreement at a small instance
    small = expand_H(5, 3)
    assert verify_expansion(small).ok

    for n, k, ceiling in [(7, 4, 192), (9, 4, 768)]:
        params = TriangleParams.for_slice(n, k)
        assert params.p == 3
        m = expand_H(params.n, params.p)
        assert m.max_degree() <= params.degree_bound

        slice_check = verify_expansion(m, sample=10_000, seed=1, k=k)
        assert slice_check.ok and slice_check.checked == 10_000
        cube_check = verify_expansion(m, sample=10_000, seed=2)
        assert cube_check.ok and cube_check.checked == 10_000

        dec = build_slice_decomposition(m)
        count = slice_count(dec)
        assert count.ceiling == ceiling
        assert count.entry_count <= ceiling

        report = verify_decomposition(dec, sample=10_000, seed=3, k=k)
        assert report.ok and report.partition_ok
        assert report.max_entry_key_weight <= params.block_weight_cap

        # certification chain: any triangle-free subset is capped by the
        # entry count itself, not just the binomial ceiling
        h = enumerate_triangles(params)
        witness = max(
            (greedy_triangle_free(h, seed=s) for s in range(8)), key=len
        )
        assert len(witness) <= count.entry_count


@criterion(5, "oracle consistency: 35 at (7,4), 15 at (6,2), verified witness at (9,4)")
def test_criterion_5_oracle():
    code, out = run_cli("search", "--n", "7", "--k", "4")
    cert = json.loads(out)
    assert code == 0
    assert cert["results"]["oracle"]["size"] == "35"
    assert cert["results"]["oracle"]["status"] == "exact"

    code, out = run_cli("search", "--n", "6", "--k", "2")
    cert = json.loads(out)
    assert code == 0
    assert cert["results"]["oracle"]["size"] == "15"
    assert cert["results"]["oracle"]["status"] == "exact"

    code, out = run_cli("search", "--n", "9", "--k", "4", "--nodes", "200000")
    cert = json.loads(out)
    assert code in (0, 3)
    oracle = cert["results"]["oracle"]
    assert oracle["status"] in ("exact", "lower_bound_only")
    assert cert["results"]["witness_triangle_free"] is True
    assert cert["results"]["diagonality"]["status"] == "complete"

    # independent re-verification of the emitted witness
    params = TriangleParams.for_slice(9, 4)
    witness_masks = [int(h, 16) for h in oracle["witness"]]
    assert len(witness_masks) == int(oracle["size"])
    assert verify_triangle_free(witness_masks, range(len(witness_masks)), 6) is None
    points = [SlicePoint(9, m) for m in witness_masks]
    cert2 = verify_diagonal_on(points, params, mode="complete")
    assert cert2.off_diagonal_checked == len(points) ** 3 - len(points)


@criterion(6, "bound-engine properties: gf dominance, optimal t, binomial sandwich")
def test_criterion_6_bound_properties():
    rng = random.Random(2024)

    # exact count <= generating-function bound on 1000 random (n, r, t)
    for _ in range(1000):
        n = rng.randrange(2, 200)
        r = rng.randrange(1, max(2, n // 2))
        t = Fraction(rng.randrange(1, 1000), 1000)
        assert (1 + t) ** n / t**r >= count_low_weight(n, r)

    # closed-form t* matches the grid argmin on a 1e-4 grid
    for _ in range(100):
        n = rng.randrange(3, 120)
        r = rng.randrange(1, (n + 1) // 2)
        if 2 * r >= n:
            continue
        t_star = optimal_t(n, r)
        log_bound = lambda t: n * math.log1p(t) - r * math.log(t)
        best = min(range(1, 10_000), key=lambda i: log_bound(i / 10_000))
        assert abs(best / 10_000 - float(t_star)) <= 1e-4 + 1e-12

    # strict binomial sandwich on 1000 random (n, x)
    for _ in range(1000):
        n = rng.randrange(1, 80)
        x = Fraction(rng.randrange(1, 1000), 1000)
        _, value = max_binomial_term(n, x)
        total = (1 + x) ** n
        assert total / (n + 1) < value < total


@criterion(7, "trend: roots increase inside (1, 1.01447) and k/n converges, under 30 s")
def test_criterion_7_trend():
    start = time.perf_counter()
    ns = [1000, 3162, 10000, 31623, 100000, 316228, 1000000]
    rows = growth_trend(ns)
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0, f"trend took {elapsed:.1f}s"

    roots = [row.ratio_root for row in rows]
    assert all(1.0 < root < 1.01447 for root in roots)
    assert all(a < b for a, b in zip(roots, roots[1:]))  # strictly increasing

    predicted = float(asymptotic_constant(digits=12).predicted_weight_fraction)
    assert abs(rows[-1].k_fraction - predicted) <= 1e-3


@criterion(8, "reproducibility: byte-identical JSON for every subcommand")
def test_criterion_8_reproducibility():
    invocations = [
        ("constant", "--digits", "7"),
        ("bound", "--n", "9", "--all-k"),
        ("verify", "--n", "6", "--k", "3", "--sample", "1000", "--seed", "5"),
        ("expand", "--n", "4", "--k", "2", "--check", "sample", "--check-samples", "2000"),
        ("search", "--n", "9", "--k", "4", "--nodes", "5000"),
        ("report", "--n-list", "7", "8", "9"),
    ]
    for argv in invocations:
        code1, out1 = run_cli(*argv)
        code2, out2 = run_cli(*argv)
        assert out1, f"no output for {argv}"
        assert (code1, out1) == (code2, out2), f"nondeterministic output for {argv}"
        json.loads(out1)  # emitted payload is valid JSON

"""Multilinear expansion, slice decomposition, and their verification reports."""

import random

import numpy as np
import pytest

from trislice.errors import ResourceLimitError
from trislice.expansion import (
    MonomialMap,
    _collect,
    _poly_mul,
    build_slice_decomposition,
    eval_H_quotient,
    expand_H,
    slice_count,
    verify_decomposition,
    verify_expansion,
)
from trislice.hamming import SlicePoint
from trislice.tensors import eval_H, _h_masks


def test_expand_n1_exhaustive():
    m = expand_H(1, 3)
    report = verify_expansion(m)
    assert report.ok
    assert report.checked == 8
    assert m.evaluate(1, 1, 1) == 2  # the diagonal value (3-1) * 1
    assert m.evaluate(1, 0, 0) == 0


def test_coordinate_factor_product_structure():
    # the pure coordinate factor: one choice from each 4-term factor, so the
    # raw n=2 product has 16 terms and they collect without collision
    p = 3
    keys = np.asarray([0], dtype=np.int64)
    coeffs = np.asarray([1], dtype=np.int64)
    raw = 1
    for i in range(2):
        fk = np.asarray([1 << i, 1 << (2 + i), 1 << (4 + i), 0], dtype=np.int64)
        fc = np.asarray([1, 1, 1, p - 1], dtype=np.int64)
        raw *= fk.size
        keys, coeffs = _poly_mul(keys, coeffs, fk, fc, p)
    assert raw == 16
    assert keys.size == 16


@pytest.mark.parametrize("n,p", [(2, 3), (3, 3), (2, 5)])
def test_expansion_matches_pointwise_exhaustive(n, p):
    m = expand_H(n, p)
    assert verify_expansion(m).ok
    # direct comparison against the evaluators, independent of the report path
    table = m.dense_table()
    mask = (1 << n) - 1
    for point in range(1 << (3 * n)):
        x, y, z = point & mask, (point >> n) & mask, point >> (2 * n)
        assert table[point] == eval_H_quotient(x, y, z, n, p)
        if (x ^ y).bit_count() % 2 == 0:
            assert table[point] == eval_H(SlicePoint(n, x), SlicePoint(n, y), SlicePoint(n, z), p)


def test_quotient_extension_matches_integer_half():
    rng = random.Random(11)
    for _ in range(500):
        n = rng.randrange(2, 10)
        x, y, z = (rng.getrandbits(n) for _ in range(3))
        if (x ^ y).bit_count() % 2:
            continue
        for p in (3, 5):
            assert eval_H_quotient(x, y, z, n, p) == _h_masks(x, y, z, n, p)


def test_max_degree_within_bound():
    m = expand_H(5, 3)
    assert m.degree_bound == 9
    assert m.max_degree() <= 9
    m2 = expand_H(2, 5)
    assert m2.degree_bound == 6
    assert m2.max_degree() <= 6


def test_budget_refusal():
    with pytest.raises(ResourceLimitError, match="raw terms"):
        expand_H(11, 3)
    with pytest.raises(ResourceLimitError):
        expand_H(3, 7)
    with pytest.raises(ValueError):
        expand_H(3, 4)


def test_decomposition_structure_small():
    m = expand_H(3, 3)
    dec = build_slice_decomposition(m)
    # constant monomial exists (the all-(-1) choice) and lands in block X
    assert int(dec.entry_block[0]) == 0 and int(dec.entry_key[0]) == 0
    cap = m.degree_bound // 3
    assert dec.max_entry_key_weight() <= cap
    count = slice_count(dec)
    assert count.entry_count == dec.entry_count
    assert count.within_bound
    # partition: every monomial in exactly one entry
    covered = dec.covered_indices()
    assert sorted(covered.tolist()) == list(range(len(m)))


def test_entry_count_examples():
    dec1 = build_slice_decomposition(expand_H(1, 3))
    assert slice_count(dec1).ceiling == 6  # 3 * (C(1,0) + C(1,1))
    assert slice_count(dec1).entry_count <= 6

    dec4 = build_slice_decomposition(expand_H(4, 3))
    assert slice_count(dec4).ceiling == 33
    assert slice_count(dec4).entry_count <= 33


def test_empty_map_decomposes_to_nothing():
    empty = MonomialMap(
        n=2,
        p=3,
        degree_bound=6,
        keys=np.asarray([], dtype=np.int64),
        coeffs=np.asarray([], dtype=np.int64),
    )
    dec = build_slice_decomposition(empty)
    assert dec.entry_count == 0
    assert slice_count(dec).entry_count == 0


def test_verify_decomposition_and_broken_copy():
    m = expand_H(2, 3)
    dec = build_slice_decomposition(m)
    report = verify_decomposition(dec)
    assert report.ok
    assert report.partition_ok
    assert report.pointwise.checked == 64
    assert report.max_entry_key_weight <= m.degree_bound // 3

    broken = dec.drop_entry(dec.entry_count - 1)
    bad = verify_decomposition(broken)
    assert not bad.ok
    assert not bad.partition_ok
    assert bad.witness is not None  # a concrete mismatch triple


def test_verify_decomposition_sampled_slice():
    m = expand_H(5, 3)
    dec = build_slice_decomposition(m)
    report = verify_decomposition(dec, sample=2000, seed=1, k=2)
    assert report.ok
    assert report.pointwise.domain == "slice"
    assert report.pointwise.checked == 2000


def test_verify_decomposition_exhaustive_over_slice():
    m = expand_H(7, 3)
    dec = build_slice_decomposition(m)
    report = verify_decomposition(dec, k=4)  # every triple of the (7,4) slice
    assert report.ok
    assert report.pointwise.mode == "exhaustive"
    assert report.pointwise.domain == "slice"
    assert report.pointwise.checked == 35**3


def test_collect_merges_and_drops_zeros():
    keys = np.asarray([5, 5, 7, 7, 9], dtype=np.int64)
    coeffs = np.asarray([1, 2, 1, 1, 2], dtype=np.int64)
    out_k, out_c = _collect(keys, coeffs, 3)
    assert out_k.tolist() == [7, 9]  # key 5 collects to 1+2 = 0 mod 3 and vanishes
    assert out_c.tolist() == [2, 2]


def test_monomial_accessors():
    m = expand_H(2, 3)
    mono = m.monomial(0)
    assert mono.coeff in (1, 2)
    assert mono.total_degree() <= m.degree_bound
    obj = m.to_json_obj(monomial_limit=10_000)
    assert obj["term_count"] == str(len(m))
    assert len(obj["monomials"]) == len(m)

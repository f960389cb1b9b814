from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpfastmm.fastmm import FastMMConfig, OpCounter, fast_mul_rect_check
from mpfastmm.opmodel import (
    COMPLEXITY_SIZES,
    count_fast,
    count_simple,
    ratio_table,
    table_csv,
    table_text,
)

# Relative-complexity table as published (n_min = 32).  Its "Add & Sub" and
# "Mul" headings are swapped relative to the quantities: the first column of
# each pair is the multiplication ratio.
PUBLISHED = {
    255: (0.678, 0.781, 0.678, 0.764),
    256: (0.670, 0.772, 0.670, 0.755),
    257: (0.674, 0.775, 0.674, 0.758),
    511: (0.590, 0.688, 0.590, 0.672),
    512: (0.586, 0.684, 0.586, 0.668),
    513: (0.589, 0.686, 0.589, 0.670),
    1023: (0.514, 0.605, 0.514, 0.590),
    1024: (0.513, 0.603, 0.513, 0.588),
    1025: (0.514, 0.604, 0.514, 0.589),
    2047: (0.449, 0.531, 0.449, 0.517),
    2048: (0.449, 0.530, 0.449, 0.516),
    2049: (0.450, 0.531, 0.450, 0.517),
}


def test_count_simple():
    assert count_simple(1, 1, 1) == OpCounter(1, 0)
    assert count_simple(2, 2, 2) == OpCounter(8, 4)
    assert count_simple(512, 512, 512) == OpCounter(134217728, 133955584)
    assert count_simple(2, 2, 2, from_zero=True) == OpCounter(8, 8)


def test_count_fast_examples():
    c = count_fast("strassen", 512, 512, 512, 32)
    assert c.mul == 7**4 * 32**3 == 78675968
    assert round(c.mul / 512**3, 3) == 0.586
    assert Fraction(count_fast("strassen", 2048, 2048, 2048, 32).mul, 2048**3) == Fraction(7, 8) ** 6
    c255 = count_fast("strassen", 255, 255, 255, 32)
    assert c255.mul == 7**3 * 32**3
    assert round(c255.mul / 255**3, 4) == 0.6778
    assert count_fast("strassen", 2, 2, 2, 1) == OpCounter(7, 18)
    assert count_fast("winograd", 2, 2, 2, 1) == OpCounter(7, 15)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 300), st.integers(1, 300), st.integers(1, 300), st.sampled_from(["strassen", "winograd"]))
def test_large_threshold_is_simple(m, l, n, algo):
    assert count_fast(algo, m, l, n, max(m, l, n)) == count_simple(m, l, n)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 3000), st.integers(1, 3000), st.integers(1, 3000), st.integers(1, 64), st.sampled_from(["mixed", "pad"]))
def test_strassen_minus_winograd(m, l, n, n_min, policy):
    # one (m/2)(l/2) + (l/2)(n/2) + (m/2)(n/2) block per recursion node
    s = count_fast("strassen", m, l, n, n_min, policy)
    w = count_fast("winograd", m, l, n, n_min, policy)
    expected = 0
    nodes = 1
    for step in fast_mul_rect_check(m, l, n, FastMMConfig("strassen", n_min, policy)):
        if step.base:
            break
        hm, hl, hn = (d // 2 for d in step.adjusted)
        expected += nodes * (hm * hl + hl * hn + hm * hn)
        nodes *= 7
    assert s.mul == w.mul
    assert s.addsub - w.addsub == expected
    if expected:
        assert w.addsub < s.addsub


def test_ratio_table_examples():
    rows = {r.m: r for r in ratio_table([32, 256, 1024], 32)}
    assert rows[32].strassen_mul_ratio == rows[32].winograd_addsub_ratio == 1
    assert round(float(rows[256].strassen_mul_ratio), 3) == 0.670
    assert round(float(rows[1024].strassen_mul_ratio), 3) == 0.513
    for r in rows.values():
        assert r.strassen_mul_ratio == r.winograd_mul_ratio
        assert isinstance(r.strassen_addsub_ratio, Fraction)


def test_ratio_table_empty():
    with pytest.raises(ValueError):
        ratio_table([], 32)


def test_published_table_reproduced_exactly():
    rows = ratio_table(COMPLEXITY_SIZES, 32, from_zero=True)
    for r in rows:
        got = tuple(
            round(float(x), 3)
            for x in (r.strassen_mul_ratio, r.strassen_addsub_ratio, r.winograd_mul_ratio, r.winograd_addsub_ratio)
        )
        assert got == PUBLISHED[r.m], r.m


def test_pad_policy_odd_sizes_differ():
    # padding every odd size overshoots the published 513 entry
    r = ratio_table([513], 32, odd_policy="pad")[0]
    assert round(float(r.strassen_mul_ratio), 3) == 0.612


def test_table_formats():
    rows = ratio_table([255, 256], 32)
    text = table_text(rows, 32)
    assert "Strassen" in text and "Winograd" in text and "n_min = 32" in text
    assert "255 x 255" in text and "0.678" in text
    csv_text = table_csv(rows, 32).splitlines()
    assert csv_text[0].startswith("m,l,n,n_min,")
    assert len(csv_text) == 3

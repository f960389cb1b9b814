import random

import numpy as np
import pytest

from mpfastmm.densemat import (
    BlockingScheme,
    MPMatrix,
    bit_equal,
    block_mul,
    dumps,
    from_rows,
    identity,
    load,
    loads,
    mat_addsub,
    mat_from_fn,
    max_rel_error_mat,
    one_norm,
    save,
    simple_mul,
    simple_mul_loops,
    zeros,
)
from mpfastmm.errors import DimensionError, UndefinedMetricError
from mpfastmm.matgen import gen_lotkin, gen_random
from mpfastmm.precision import PrecisionContext

from conftest import int_matrix


def test_from_fn_identity_and_zero(ctx128):
    eye = mat_from_fn(3, 3, ctx128, lambda i, j: int(i == j))
    assert bit_equal(eye, identity(3, ctx128))
    z = mat_from_fn(2, 4, ctx128, lambda i, j: 0)
    assert all(x == 0 for x in z.data.flat)
    assert all(x.precision == 128 for x in z.data.flat)


def test_from_fn_one_based(ctx128):
    r5 = ctx128.sqrt(ctx128.round(5))
    a = mat_from_fn(2, 2, ctx128, lambda i, j: ctx128.mul(r5, i + j - 1))
    assert a[1, 1] == r5
    assert a[1, 2] == ctx128.mul(r5, 2) == a[2, 1]
    assert a[2, 2] == ctx128.mul(r5, 3)


def test_zero_dimension(ctx128):
    with pytest.raises(DimensionError):
        mat_from_fn(0, 3, ctx128, lambda i, j: 1)
    with pytest.raises(DimensionError):
        zeros(2, 0, ctx128)


def test_view_aliases_parent(ctx128):
    a = from_rows([[1, 2, 3], [4, 5, 6]], ctx128)
    v = a.view(1, 2, 2, 2)
    assert v.tolist() == [[2, 3], [5, 6]]
    with pytest.raises(DimensionError):
        a.view(2, 2, 2, 2)


def test_addsub(ctx128):
    a = from_rows([[1, 2], [3, 4]], ctx128)
    b = from_rows([[5, 6], [7, 8]], ctx128)
    assert mat_addsub("add", a, b).tolist() == [[6, 8], [10, 12]]
    assert bit_equal(mat_addsub("add", a, zeros(2, 2, ctx128)), a)
    assert all(x == 0 for x in mat_addsub("sub", a, a).data.flat)
    with pytest.raises(DimensionError):
        mat_addsub("add", a, zeros(2, 3, ctx128))
    with pytest.raises(DimensionError):
        mat_addsub("add", a, zeros(2, 2, PrecisionContext(64)))


def test_simple_mul_examples(ctx128):
    a = from_rows([[1, 2], [3, 4]], ctx128)
    b = from_rows([[5, 6], [7, 8]], ctx128)
    assert simple_mul(a, b, ctx128).tolist() == [[19, 22], [43, 50]]
    assert simple_mul(from_rows([[2]], ctx128), from_rows([[3]], ctx128), ctx128).tolist() == [[6]]
    r = gen_random(3, 4, 5, ctx128)
    assert bit_equal(simple_mul(identity(3, ctx128), r, ctx128), r)
    with pytest.raises(DimensionError):
        simple_mul(a, zeros(3, 2, ctx128), ctx128)


@pytest.mark.parametrize("shape", [(1, 1, 1), (3, 7, 2), (9, 5, 11), (16, 16, 16)])
def test_simple_mul_matches_explicit_loops(ctx128, shape):
    # non-integer data, so every rounding is visible
    m, l, n = shape
    a = gen_random(m, l, 11, ctx128)
    b = gen_random(l, n, 12, ctx128)
    assert bit_equal(simple_mul(a, b, ctx128), simple_mul_loops(a, b, ctx128))


def test_blocking_scheme():
    g = BlockingScheme.for_dims(65, 32, 1, 32)
    assert (g.M, g.L, g.N) == (3, 1, 1)
    for count, extent in ((g.M, 65), (g.L, 32), (g.N, 1)):
        assert (count - 1) * g.n_min < extent <= count * g.n_min


def test_block_single_tile_is_simple(ctx128):
    a = gen_random(7, 9, 1, ctx128)
    b = gen_random(9, 5, 2, ctx128)
    assert bit_equal(block_mul(a, b, 9, ctx128), simple_mul(a, b, ctx128))


def test_block_differs_only_by_grouping(ctx128):
    a = gen_random(10, 40, 3, ctx128)
    b = gen_random(40, 6, 4, ctx128)
    c1, c2 = block_mul(a, b, 8, ctx128), simple_mul(a, b, ctx128)
    err = max_rel_error_mat(c1, c2).max
    assert err < 2**-120


def test_block_integer_exact_random_shapes(ctx256):
    rng = random.Random(7)
    for _ in range(100):
        m, l, n = (rng.randint(1, 80) for _ in range(3))
        a = int_matrix(rng, m, l, ctx256, 2**20)
        b = int_matrix(rng, l, n, ctx256, 2**20)
        n_min = rng.randint(1, 40)
        assert bit_equal(block_mul(a, b, n_min, ctx256), simple_mul(a, b, ctx256))


def test_block_integer_exact_at_64_bits():
    ctx = PrecisionContext(64)
    rng = random.Random(8)
    a = int_matrix(rng, 9, 13, ctx, 2**20)
    b = int_matrix(rng, 13, 4, ctx, 2**20)
    assert bit_equal(block_mul(a, b, 3, ctx), simple_mul(a, b, ctx))


def test_one_norm(ctx128):
    assert one_norm(identity(4, ctx128)) == 1
    assert one_norm(zeros(3, 3, ctx128)) == 0
    assert one_norm(gen_lotkin(3, ctx128)) == ctx128.round(ctx128.div(11, 6))
    assert one_norm(from_rows([[1, -5], [-2, 1]], ctx128)) == 6


def test_one_norm_submultiplicative(ctx128):
    wide = PrecisionContext(256)
    for seed in range(5):
        a = gen_random(12, 8, seed, ctx128).to_precision(wide)
        b = gen_random(8, 10, seed + 100, ctx128).to_precision(wide)
        lhs = one_norm(simple_mul(a, b, wide))
        rhs = wide.mul(one_norm(a), one_norm(b))
        assert lhs <= wide.mul(rhs, 1 + 2.0**-120)


def test_max_rel_error(ctx128):
    a = gen_random(4, 4, 1, ctx128)
    same = max_rel_error_mat(a, a)
    assert same.max == 0 and same.min == 0
    ones = mat_from_fn(2, 2, ctx128, lambda i, j: 1)
    pert = ones.copy()
    pert.data[0, 1] = ctx128.round(1 + 2.0**-20)
    e = max_rel_error_mat(pert, ones)
    assert e.max == 2.0**-20 and e.min == 0 and e.skipped == 0


def test_max_rel_error_skips_zero_reference(ctx128):
    ref = from_rows([[0, 2]], ctx128)
    got = from_rows([[1, 3]], ctx128)
    e = max_rel_error_mat(got, ref)
    assert e.skipped == 1 and e.max == 0.5
    with pytest.raises(UndefinedMetricError):
        max_rel_error_mat(got, zeros(1, 2, ctx128))


def test_text_format_roundtrip(tmp_path, ctx128):
    a = gen_random(3, 5, 9, ctx128)
    text = dumps(a)
    assert text.splitlines()[0] == "mpmat 3 5 128"
    assert all(len(line.split(" ")) == 5 for line in text.splitlines()[1:])
    assert bit_equal(loads(text), a)
    save(a, tmp_path / "a.mpmat")
    assert bit_equal(load(tmp_path / "a.mpmat"), a)


def test_text_format_rejects_bad_input():
    with pytest.raises(ValueError):
        loads("matrix 1 1 64\n0x1p+0\n")
    with pytest.raises(ValueError):
        loads("mpmat 2 1 64\n0x1p+0\n")
    with pytest.raises(ValueError):
        loads("mpmat 1 2 64\n0x1p+0\n")


def test_mpmatrix_rejects_non_object():
    with pytest.raises(TypeError):
        MPMatrix(np.zeros((2, 2)), 64)

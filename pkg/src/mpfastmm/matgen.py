"""Deterministic test matrices, linear systems and the benchmark-product oracle."""

from __future__ import annotations

import numpy as np
from gmpy2 import mpz

from .densemat import MPMatrix, mat_from_fn
from .errors import DimensionError
from .precision import PrecisionContext

_MASK64 = (1 << 64) - 1
_MULT = 2685821657736338717
_SEED_ZERO_REMAP = 0x9E3779B97F4A7C15


class Prng64:
    """64-bit xorshift generator with a multiplicative output scramble.

    Pinned bit-for-bit so random matrices are reproducible anywhere.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        seed &= _MASK64
        self.state = seed or _SEED_ZERO_REMAP

    def next64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * _MULT) & _MASK64

    def next53(self) -> int:
        """Top 53 bits of the next output."""
        return self.next64() >> 11

    def uniform(self) -> float:
        """Next value in [0, 1) as a double (exact)."""
        return self.next53() / 2.0**53


def gen_bench_pair(m: int, l: int, n: int, ctx: PrecisionContext) -> tuple[MPMatrix, MPMatrix]:
    """A (m x l) with a_ij = sqrt5 (i+j-1) and B (l x n) with b_ij = sqrt3 (l-i+1).

    The roots are rounded once to ``ctx``; each entry is then one rounded
    product of that root with an exact integer.
    """
    if min(m, l, n) < 1:
        raise DimensionError("dimensions must be positive")
    r5 = ctx.sqrt(ctx.round(5))
    r3 = ctx.sqrt(ctx.round(3))
    a = mat_from_fn(m, l, ctx, lambda i, j: ctx.mul(r5, i + j - 1))
    b = mat_from_fn(l, n, ctx, lambda i, j: ctx.mul(r3, l - i + 1))
    return a, b


def bench_row_sum(i: int, l: int) -> int:
    """sum_{k=1..l} (i+k-1)(l-k+1), in closed form."""
    # substitute t = l-k+1: sum_t (i+l-t) t
    return (i + l) * l * (l + 1) // 2 - l * (l + 1) * (2 * l + 1) // 6


def bench_oracle_entry(i: int, l: int, ctx_hi: PrecisionContext):
    """Exact-product reference for row ``i`` of the benchmark product.

    c_ij does not depend on j.  The integer factor is exact; only sqrt(15)
    and the final product are rounded (at ``ctx_hi``).
    """
    if i < 1 or l < 1:
        raise DimensionError("indices must be positive")
    return ctx_hi.mul(ctx_hi.sqrt(ctx_hi.round(15)), mpz(bench_row_sum(i, l)))


def bench_oracle(m: int, l: int, n: int, ctx_hi: PrecisionContext) -> MPMatrix:
    data = np.empty((m, n), dtype=object)
    for i in range(m):
        data[i, :] = bench_oracle_entry(i + 1, l, ctx_hi)
    return MPMatrix(data, ctx_hi.bits)


def gen_random(nrows: int, ncols: int, seed: int, ctx: PrecisionContext) -> MPMatrix:
    """Entries 2u - 1 with u the generator's 53-bit uniforms, filled row by row."""
    rng = Prng64(seed)

    def entry(i, j):
        k = rng.next53()
        # (2k - 2^53) / 2^53, exact before the single rounding
        return ctx._gctx.mul_2exp(ctx.round(2 * k - (1 << 53)), -53)

    return mat_from_fn(nrows, ncols, ctx, entry)


def gen_lotkin(n: int, ctx: PrecisionContext) -> MPMatrix:
    """First row ones, a_ij = 1/(i+j-1) below it."""
    if n < 1:
        raise DimensionError("n must be positive")
    one = ctx.one()
    return mat_from_fn(n, n, ctx, lambda i, j: one if i == 1 else ctx.div(one, i + j - 1))


def gen_linear_system(a: MPMatrix, ctx: PrecisionContext) -> tuple[np.ndarray, np.ndarray]:
    """True solution x = (0, 1, ..., n-1) and b = A x evaluated at ``ctx``."""
    if a.m != a.n:
        raise DimensionError(f"square matrix required, got {a.shape}")
    x = np.empty(a.n, dtype=object)
    for i in range(a.n):
        x[i] = ctx.round(i)
    with ctx.active():
        b = a.data @ x
    return x, b

"""Pivot-free LU factorization, column-wise and blocked.

L is unit lower triangular (Doolittle) and is stored with U in one packed
matrix.  The blocked variant factors a K x K corner, solves for the U12 and
L21 panels, and pushes the Schur complement update A22 - L21 U12 through a
selectable multiplication kernel, which is where the fast products pay off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .densemat import MPMatrix, identity, one_norm
from .errors import DimensionError, SingularPivotError, UndefinedMetricError
from .fastmm import KERNELS, OpCounter, multiply
from .precision import PrecisionContext, scalar_rel_error


@dataclass
class LUFactors:
    packed: MPMatrix

    @property
    def n(self) -> int:
        return self.packed.n

    @property
    def bits(self) -> int:
        return self.packed.bits

    def lower(self) -> MPMatrix:
        """Unit lower triangular factor as a full matrix."""
        ctx = self.packed.ctx
        L = self.packed.data.copy()
        L[np.triu_indices(self.n)] = ctx.zero()
        np.fill_diagonal(L, ctx.one())
        return MPMatrix(L, self.bits)

    def upper(self) -> MPMatrix:
        ctx = self.packed.ctx
        U = self.packed.data.copy()
        U[np.tril_indices(self.n, -1)] = ctx.zero()
        return MPMatrix(U, self.bits)


@dataclass(frozen=True)
class BlockLUConfig:
    """Panel width ``K`` and the kernel used for the Schur complement update.

    ``K=None`` (or any K >= n) means plain column-wise LU.
    """

    K: int | None = None
    multiply: str = "winograd"
    n_min: int = 32
    odd_policy: str = "mixed"

    def __post_init__(self):
        if self.K is not None and self.K < 1:
            raise ValueError("K must be >= 1")
        if self.multiply not in KERNELS:
            raise ValueError(f"multiply must be one of {KERNELS}, got {self.multiply!r}")

    @classmethod
    def from_alpha(cls, alpha: int, n_min: int = 32, multiply: str = "winograd", **kw) -> "BlockLUConfig":
        return cls(K=alpha * n_min, multiply=multiply, n_min=n_min, **kw)

    @property
    def alpha(self) -> float | None:
        return None if self.K is None else self.K / self.n_min


def _square(a: MPMatrix) -> None:
    if a.m != a.n:
        raise DimensionError(f"square matrix required, got {a.shape}")


def _eliminate(W: np.ndarray, lo: int, hi: int, ncols: int | None = None, offset: int = 0) -> None:
    """In-place Doolittle sweep on rows/cols lo..hi-1 of ``W``.

    Only columns < ``ncols`` take part in the trailing update (default: all).
    Call inside an active precision context.
    """
    ncols = W.shape[1] if ncols is None else ncols
    for k in range(lo, hi):
        piv = W[k, k]
        if piv == 0:
            raise SingularPivotError(offset + k + 1)
        W[k + 1 : hi, k] = W[k + 1 : hi, k] / piv
        if k + 1 < hi:
            W[k + 1 : hi, k + 1 : ncols] = W[k + 1 : hi, k + 1 : ncols] - np.multiply.outer(
                W[k + 1 : hi, k], W[k, k + 1 : ncols]
            )


def lu_columnwise(a: MPMatrix) -> LUFactors:
    """Right-looking elimination without pivoting, k loop outermost."""
    _square(a)
    W = a.data.copy()
    with a.ctx.active():
        _eliminate(W, 0, a.n)
    return LUFactors(MPMatrix(W, a.bits))


def trsm_unit_lower(l11: MPMatrix, a12: MPMatrix, ctx: PrecisionContext) -> MPMatrix:
    """Solve L11 U12 = A12 for U12 by forward substitution (unit diagonal)."""
    K = l11.m
    if l11.n != K or a12.m != K:
        raise DimensionError(f"shapes {l11.shape} and {a12.shape} do not fit")
    L, U = l11.data, a12.data.copy()
    with ctx.active():
        for k in range(K - 1):
            U[k + 1 :, :] = U[k + 1 :, :] - np.multiply.outer(L[k + 1 :, k], U[k, :])
    return MPMatrix(U, ctx.bits)


def trsm_upper_right(a21: MPMatrix, u11: MPMatrix, ctx: PrecisionContext) -> MPMatrix:
    """Solve L21 U11 = A21 for L21, one column of L21 at a time."""
    K = u11.m
    if u11.n != K or a21.n != K:
        raise DimensionError(f"shapes {a21.shape} and {u11.shape} do not fit")
    U, L = u11.data, a21.data.copy()
    with ctx.active():
        for k in range(K):
            piv = U[k, k]
            if piv == 0:
                raise SingularPivotError(k + 1)
            L[:, k] = L[:, k] / piv
            if k + 1 < K:
                L[:, k + 1 :] = L[:, k + 1 :] - np.multiply.outer(L[:, k], U[k, k + 1 :])
    return MPMatrix(L, ctx.bits)


def lu_blocked(a: MPMatrix, cfg: BlockLUConfig, ctx: PrecisionContext, counter: OpCounter | None = None) -> LUFactors:
    """Blocked right-looking LU with the Schur update done by ``cfg.multiply``.

    The last panel (at most K wide) is finished column-wise.  If ``counter``
    is given, the operations of the Schur products are added to it.
    """
    _square(a)
    if a.bits != ctx.bits:
        a = a.to_precision(ctx)
    n = a.n
    K = n if cfg.K is None else cfg.K
    W = a.data.copy()
    p = 0
    while n - p > K:
        q = p + K
        with ctx.active():
            _eliminate(W[p:q, p:q], 0, K, offset=p)
        corner = MPMatrix(W[p:q, p:q], ctx.bits)
        u12 = trsm_unit_lower(corner, MPMatrix(W[p:q, q:], ctx.bits), ctx)
        l21 = trsm_upper_right(MPMatrix(W[q:, p:q], ctx.bits), corner, ctx)
        W[p:q, q:] = u12.data
        W[q:, p:q] = l21.data
        prod, ops = multiply(cfg.multiply, l21, u12, cfg.n_min, ctx, cfg.odd_policy)
        if counter is not None:
            counter += ops
        with ctx.active():
            W[q:, q:] = W[q:, q:] - prod.data
        p = q
    with ctx.active():
        _eliminate(W[p:, p:], 0, n - p, offset=p)
    return LUFactors(MPMatrix(W, ctx.bits))


def factor(a: MPMatrix, cfg: BlockLUConfig, ctx: PrecisionContext) -> LUFactors:
    if cfg.K is None or cfg.K >= a.n:
        return lu_columnwise(a) if a.bits == ctx.bits else lu_columnwise(a.to_precision(ctx))
    return lu_blocked(a, cfg, ctx)


def lu_solve(f: LUFactors, b: np.ndarray, ctx: PrecisionContext) -> np.ndarray:
    """Forward then back substitution; ``b`` may be a vector or an n x k block."""
    W = f.packed.data
    n = f.n
    y = np.array(b, dtype=object, copy=True)
    if y.shape[0] != n:
        raise DimensionError(f"right-hand side has {y.shape[0]} rows, expected {n}")
    with ctx.active():
        for k in range(n - 1):
            y[k + 1 :] = y[k + 1 :] - np.multiply.outer(W[k + 1 :, k], y[k])
        for k in range(n - 1, -1, -1):
            piv = W[k, k]
            if piv == 0:
                raise SingularPivotError(k + 1)
            y[k] = y[k] / piv
            if k:
                y[:k] = y[:k] - np.multiply.outer(W[:k, k], y[k])
    return y


def solve(a: MPMatrix, b: np.ndarray, cfg: BlockLUConfig, ctx: PrecisionContext) -> np.ndarray:
    """Solve A x = b without pivoting."""
    _square(a)
    return lu_solve(factor(a, cfg, ctx), b, ctx)


def inverse(a: MPMatrix, ctx: PrecisionContext) -> MPMatrix:
    f = factor(a.to_precision(ctx), BlockLUConfig(), ctx)
    return MPMatrix(lu_solve(f, identity(a.n, ctx).data, ctx), ctx.bits)


def default_cond_bits(bits: int) -> int:
    return 2 * bits + 64


def cond_one(a: MPMatrix, ctx_hi: PrecisionContext | None = None):
    """1-norm condition number via an explicit inverse at elevated precision."""
    _square(a)
    ctx_hi = ctx_hi or PrecisionContext(default_cond_bits(a.bits))
    ahi = a.to_precision(ctx_hi)
    inv = inverse(ahi, ctx_hi)
    return ctx_hi.mul(one_norm(ahi), one_norm(inv))


class SolutionError(NamedTuple):
    max_rel: object
    zero_abs: object | None  # largest |xhat_i| where xtrue_i == 0; None if no such i


def max_rel_error_solution(xhat, xtrue) -> SolutionError:
    """Largest componentwise relative error over the nonzero true components."""
    if len(xhat) != len(xtrue):
        raise DimensionError(f"length mismatch {len(xhat)} vs {len(xtrue)}")
    worst = None
    zero_abs = None
    for xh, xt in zip(xhat, xtrue):
        if xt == 0:
            e = PrecisionContext(xh.precision)._gctx.abs(xh)
            zero_abs = e if zero_abs is None or e > zero_abs else zero_abs
            continue
        e = scalar_rel_error(xh, xt)
        if worst is None or e > worst:
            worst = e
    if worst is None:
        raise UndefinedMetricError("true solution is identically zero")
    return SolutionError(worst, zero_abs)

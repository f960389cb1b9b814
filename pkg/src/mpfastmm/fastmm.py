"""Recursive Strassen and Winograd-variant products with dynamic padding.

Recursion continues while every dimension exceeds ``n_min``.  At each level
an odd dimension is made even in one of two ways:

* padding: append a zero row/column, strip it from the result afterwards;
* peeling: set the last row/column aside, recurse on the even core, and
  add its contribution back with simple inner products.

The default ``"mixed"`` policy moves each odd dimension to whichever even
neighbour is a multiple of four (pad when d = 3 mod 4, peel when d = 1
mod 4), so the halved size stays even one level further down.  ``"pad"``
always pads.  Base cases use the simple kernel.

The returned :class:`OpCounter` tallies scalar operations as they are
issued, padded zeros included, so it can be compared one-for-one against the
closed-form recurrences in :mod:`mpfastmm.opmodel`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .densemat import MPMatrix, block_mul, simple_mul
from .errors import DimensionError
from .precision import PrecisionContext

ALGORITHMS = ("strassen", "winograd")
KERNELS = ("simple", "block", "strassen", "winograd")
ODD_POLICIES = ("mixed", "pad")


def odd_step(d: int, policy: str) -> int:
    """+1 to pad, -1 to peel, 0 when ``d`` is already even."""
    if d % 2 == 0:
        return 0
    if policy == "pad":
        return 1
    return 1 if d % 4 == 3 else -1


@dataclass(frozen=True)
class FastMMConfig:
    algorithm: str = "winograd"
    n_min: int = 32
    odd_policy: str = "mixed"
    base_kernel: str = field(default="simple", init=False)

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.odd_policy not in ODD_POLICIES:
            raise ValueError(f"odd_policy must be one of {ODD_POLICIES}, got {self.odd_policy!r}")
        if self.n_min < 1:
            raise ValueError("n_min must be >= 1")


@dataclass
class OpCounter:
    mul: int = 0
    addsub: int = 0

    def __add__(self, other: "OpCounter") -> "OpCounter":
        return OpCounter(self.mul + other.mul, self.addsub + other.addsub)

    def __iadd__(self, other: "OpCounter") -> "OpCounter":
        self.mul += other.mul
        self.addsub += other.addsub
        return self

    def scaled(self, k: int) -> "OpCounter":
        return OpCounter(k * self.mul, k * self.addsub)


@dataclass
class StrassenWorkspace:
    P1: np.ndarray
    P2: np.ndarray
    P3: np.ndarray
    P4: np.ndarray
    P5: np.ndarray
    P6: np.ndarray
    P7: np.ndarray


@dataclass
class WinogradWorkspace:
    S: list  # S1..S8
    M: list  # M1..M7
    T1: np.ndarray
    T2: np.ndarray


Quads = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


class _Ops:
    """Counting add/sub/mul over object arrays; call inside an active context."""

    def __init__(self, counter: OpCounter, mul: Callable[[np.ndarray, np.ndarray], np.ndarray]):
        self.counter = counter
        self.mul = mul

    def add(self, x, y):
        self.counter.addsub += x.size
        return x + y

    def sub(self, x, y):
        self.counter.addsub += x.size
        return x - y


class _ScalarOps:
    """Same interface on bare scalars, for 2x2x2 nodes whose children are 1x1."""

    def __init__(self, counter: OpCounter):
        self.counter = counter

    def add(self, x, y):
        self.counter.addsub += 1
        return x + y

    def sub(self, x, y):
        self.counter.addsub += 1
        return x - y

    def mul(self, x, y):
        self.counter.mul += 1
        return x * y


def strassen_step(a: Quads, b: Quads, ops: _Ops) -> tuple[Quads, StrassenWorkspace]:
    a11, a12, a21, a22 = a
    b11, b12, b21, b22 = b
    add, sub, mul = ops.add, ops.sub, ops.mul
    p1 = mul(add(a11, a22), add(b11, b22))
    p2 = mul(add(a21, a22), b11)
    p3 = mul(a11, sub(b12, b22))
    p4 = mul(a22, sub(b21, b11))
    p5 = mul(add(a11, a12), b22)
    p6 = mul(sub(a21, a11), add(b11, b12))
    p7 = mul(sub(a12, a22), add(b21, b22))
    c11 = add(sub(add(p1, p4), p5), p7)
    c12 = add(p3, p5)
    c21 = add(p2, p4)
    c22 = add(sub(add(p1, p3), p2), p6)
    return (c11, c12, c21, c22), StrassenWorkspace(p1, p2, p3, p4, p5, p6, p7)


def winograd_step(a: Quads, b: Quads, ops: _Ops) -> tuple[Quads, WinogradWorkspace]:
    a11, a12, a21, a22 = a
    b11, b12, b21, b22 = b
    add, sub, mul = ops.add, ops.sub, ops.mul
    s1 = add(a21, a22)
    s2 = sub(s1, a11)
    s3 = sub(a11, a21)
    s4 = sub(a12, s2)
    s5 = sub(b12, b11)
    s6 = sub(b22, s5)
    s7 = sub(b22, b12)
    s8 = sub(s6, b21)
    m1 = mul(s2, s6)
    m2 = mul(a11, b11)
    m3 = mul(a12, b21)
    m4 = mul(s3, s7)
    m5 = mul(s1, s5)
    m6 = mul(s4, b22)
    m7 = mul(a22, s8)
    t1 = add(m1, m2)
    t2 = add(t1, m4)
    c11 = add(m2, m3)
    c12 = add(add(t1, m5), m6)
    c21 = sub(t2, m7)
    c22 = add(t2, m5)
    ws = WinogradWorkspace([s1, s2, s3, s4, s5, s6, s7, s8], [m1, m2, m3, m4, m5, m6, m7], t1, t2)
    return (c11, c12, c21, c22), ws


_STEPS = {"strassen": strassen_step, "winograd": winograd_step}


def _pad_array(x: np.ndarray, zero) -> np.ndarray:
    r, c = x.shape
    if r % 2 == 0 and c % 2 == 0:
        return x
    out = np.empty((r + r % 2, c + c % 2), dtype=object)
    out.fill(zero)
    out[:r, :c] = x
    return out


def _quads(x: np.ndarray) -> Quads:
    h, w = x.shape[0] // 2, x.shape[1] // 2
    return x[:h, :w], x[:h, w:], x[h:, :w], x[h:, w:]


def pad_even(a: MPMatrix) -> MPMatrix:
    """Append a zero row and/or column to make both dimensions even."""
    data = _pad_array(a.data, a.ctx.zero())
    return a if data is a.data else MPMatrix(data, a.bits)


def _dot_count(counter: OpCounter, rows: int, l: int, cols: int) -> None:
    counter.mul += rows * l * cols
    counter.addsub += rows * cols * (l - 1)


def _recurse(A: np.ndarray, B: np.ndarray, step, cfg: FastMMConfig, zero, counter: OpCounter) -> np.ndarray:
    m, l = A.shape
    n = B.shape[1]
    if min(m, l, n) <= cfg.n_min:
        _dot_count(counter, m, l, n)
        return A @ B
    if m == l == n == 2:
        # n_min == 1 here; 1x1 children are single products, no numpy needed
        (c11, c12, c21, c22), _ = step(
            (A[0, 0], A[0, 1], A[1, 0], A[1, 1]), (B[0, 0], B[0, 1], B[1, 0], B[1, 1]), _ScalarOps(counter)
        )
        C = np.empty((2, 2), dtype=object)
        C[0, 0], C[0, 1], C[1, 0], C[1, 1] = c11, c12, c21, c22
        return C
    sm, sl, sn = (odd_step(d, cfg.odd_policy) for d in (m, l, n))
    mc, lc, nc = m - (sm < 0), l - (sl < 0), n - (sn < 0)
    Ap = _pad_array(A[:mc, :lc], zero)
    Bp = _pad_array(B[:lc, :nc], zero)
    ops = _Ops(counter, lambda x, y: _recurse(x, y, step, cfg, zero, counter))
    (c11, c12, c21, c22), _ = step(_quads(Ap), _quads(Bp), ops)
    hm, hn = c11.shape
    C = np.empty((max(2 * hm, m), max(2 * hn, n)), dtype=object)
    C[:hm, :hn] = c11
    C[:hm, hn : 2 * hn] = c12
    C[hm : 2 * hm, :hn] = c21
    C[hm : 2 * hm, hn : 2 * hn] = c22
    if sl < 0:
        # rank-1 contribution of the peeled inner index
        core = C[:mc, :nc]
        C[:mc, :nc] = core + np.multiply.outer(A[:mc, lc], B[lc, :nc])
        counter.mul += mc * nc
        counter.addsub += mc * nc
    if sn < 0:
        C[:mc, nc] = A[:mc, :] @ B[:, nc]
        _dot_count(counter, mc, l, 1)
    if sm < 0:
        C[mc, :n] = A[mc, :] @ B
        _dot_count(counter, 1, l, n)
    return C[:m, :n] if C.shape != (m, n) else C


def fast_mul(a: MPMatrix, b: MPMatrix, cfg: FastMMConfig, ctx: PrecisionContext) -> tuple[MPMatrix, OpCounter]:
    """Strassen or Winograd-variant product of ``a`` and ``b`` at ``ctx``.

    Returns the product together with the exact number of scalar
    multiplications and additions/subtractions performed.
    """
    if a.n != b.m:
        raise DimensionError(f"inner dimensions differ: {a.shape} x {b.shape}")
    counter = OpCounter()
    with ctx.active():
        data = _recurse(a.data, b.data, _STEPS[cfg.algorithm], cfg, ctx.zero(), counter)
    if not data.flags.c_contiguous:
        data = np.ascontiguousarray(data)
    return MPMatrix(data, ctx.bits), counter


def one_level(a: MPMatrix, b: MPMatrix, algorithm: str, ctx: PrecisionContext):
    """Single recursion level with simple-kernel subproducts, exposing the workspace.

    Operands must already have even dimensions.  Used to inspect the
    intermediates (P1..P7 or S, M, T) of small worked examples.
    """
    if a.n != b.m:
        raise DimensionError(f"inner dimensions differ: {a.shape} x {b.shape}")
    if any(d % 2 for d in (a.m, a.n, b.n)):
        raise DimensionError("one_level needs even dimensions")
    counter = OpCounter()

    def base(x, y):
        counter.mul += x.shape[0] * x.shape[1] * y.shape[1]
        counter.addsub += x.shape[0] * y.shape[1] * (x.shape[1] - 1)
        return x @ y

    with ctx.active():
        (c11, c12, c21, c22), ws = _STEPS[algorithm](_quads(a.data), _quads(b.data), _Ops(counter, base))
        C = np.block([[c11, c12], [c21, c22]])
    return MPMatrix(C, ctx.bits), ws, counter


class TraceStep(NamedTuple):
    level: int
    dims: tuple[int, int, int]
    adjusted: tuple[int, int, int]  # after padding (+1) or peeling (-1)
    base: bool


def fast_mul_rect_check(m: int, l: int, n: int, cfg: FastMMConfig) -> list[TraceStep]:
    """Split/pad/peel decisions taken by :func:`fast_mul` on an (m, l, n) product.

    All seven subproducts at a level share one shape, so the trace is a
    single path from the top level down to the base case.
    """
    if min(m, l, n) < 1:
        raise DimensionError("dimensions must be positive")
    out = []
    level = 0
    while True:
        if min(m, l, n) <= cfg.n_min:
            out.append(TraceStep(level, (m, l, n), (m, l, n), True))
            return out
        adj = tuple(d + odd_step(d, cfg.odd_policy) for d in (m, l, n))
        out.append(TraceStep(level, (m, l, n), adj, False))
        m, l, n = (d // 2 for d in adj)
        level += 1


def count_simple_ops(m: int, l: int, n: int) -> OpCounter:
    return OpCounter(m * l * n, m * n * (l - 1))


def multiply(
    kernel: str, a: MPMatrix, b: MPMatrix, n_min: int, ctx: PrecisionContext, odd_policy: str = "mixed"
) -> tuple[MPMatrix, OpCounter]:
    """Dispatch to one of the four kernels by name."""
    if kernel == "simple":
        return simple_mul(a, b, ctx), count_simple_ops(a.m, a.n, b.n)
    if kernel == "block":
        return block_mul(a, b, n_min, ctx), count_simple_ops(a.m, a.n, b.n)
    if kernel in ALGORITHMS:
        return fast_mul(a, b, FastMMConfig(kernel, n_min, odd_policy), ctx)
    raise ValueError(f"unknown kernel {kernel!r}; expected one of {KERNELS}")

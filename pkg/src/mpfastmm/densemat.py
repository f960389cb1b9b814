"""Dense arbitrary-precision matrices and the two classical products.

Elements live in a 2-D numpy ``object`` array of ``mpfr`` values.  numpy's
object-dtype ``matmul`` evaluates each dot product as
``((a1*b1 + a2*b2) + a3*b3) + ...`` through the Python number protocol, so
every product and partial sum is rounded under the active gmpy2 context.
That gives the left-to-right accumulation order we want without a Python
triple loop.  :func:`simple_mul_loops` is the slow explicit version kept as
an independent reference.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np

from .errors import DimensionError, UndefinedMetricError
from .precision import PrecisionContext, from_text, scalar_rel_error, to_text


class MPMatrix:
    """Dense m x n matrix whose elements all carry ``bits`` mantissa bits.

    ``data`` is a numpy object array; it may be a view into another
    matrix's storage (see :meth:`view`).
    """

    __slots__ = ("data", "bits")

    def __init__(self, data: np.ndarray, bits: int):
        if data.ndim != 2 or data.dtype != object:
            raise TypeError("MPMatrix needs a 2-D object array")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise DimensionError(f"matrix dimensions must be positive, got {data.shape}")
        self.data = data
        self.bits = bits

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def ctx(self) -> PrecisionContext:
        return PrecisionContext(self.bits)

    def __getitem__(self, ij):
        """1-based element access: ``A[i, j]``."""
        i, j = ij
        if not (1 <= i <= self.m and 1 <= j <= self.n):
            raise IndexError(f"({i}, {j}) outside {self.m}x{self.n}")
        return self.data[i - 1, j - 1]

    def view(self, i0: int, j0: int, h: int, w: int) -> "MPMatrix":
        """Aliasing h x w window whose top-left corner is element (i0, j0), 1-based."""
        if i0 < 1 or j0 < 1 or i0 - 1 + h > self.m or j0 - 1 + w > self.n:
            raise DimensionError(f"view ({i0},{j0},{h},{w}) exceeds {self.m}x{self.n}")
        return MPMatrix(self.data[i0 - 1 : i0 - 1 + h, j0 - 1 : j0 - 1 + w], self.bits)

    def copy(self) -> "MPMatrix":
        return MPMatrix(self.data.copy(), self.bits)

    def to_precision(self, ctx: PrecisionContext) -> "MPMatrix":
        return MPMatrix(_map(ctx.round, self.data), ctx.bits)

    def tolist(self) -> list[list]:
        return self.data.tolist()

    def __repr__(self) -> str:
        return f"MPMatrix({self.m}x{self.n}, bits={self.bits})"


def _map(f, arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
    for k in range(flat_in.size):
        flat_out[k] = f(flat_in[k])
    return out


def object_array(rows) -> np.ndarray:
    """Object array from nested sequences without numpy unpacking the elements."""
    rows = [list(r) for r in rows]
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, r in enumerate(rows):
        out[i, :] = r
    return out


def zeros(m: int, n: int, ctx: PrecisionContext) -> MPMatrix:
    if m < 1 or n < 1:
        raise DimensionError(f"matrix dimensions must be positive, got {(m, n)}")
    data = np.empty((m, n), dtype=object)
    data.fill(ctx.zero())
    return MPMatrix(data, ctx.bits)


def identity(n: int, ctx: PrecisionContext) -> MPMatrix:
    a = zeros(n, n, ctx)
    one = ctx.one()
    for i in range(n):
        a.data[i, i] = one
    return a


def mat_from_fn(m: int, n: int, ctx: PrecisionContext, f: Callable[[int, int], object]) -> MPMatrix:
    """Matrix with element (i, j) = f(i, j) rounded to ``ctx``; i, j are 1-based."""
    if m < 1 or n < 1:
        raise DimensionError(f"matrix dimensions must be positive, got {(m, n)}")
    data = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            data[i, j] = ctx.round(f(i + 1, j + 1))
    return MPMatrix(data, ctx.bits)


def from_rows(rows, ctx: PrecisionContext) -> MPMatrix:
    rows = [list(r) for r in rows]
    return mat_from_fn(len(rows), len(rows[0]), ctx, lambda i, j: rows[i - 1][j - 1])


def bit_equal(a: MPMatrix, b: MPMatrix) -> bool:
    """Same shape, same precision, and every element has the same bit pattern."""
    if a.shape != b.shape or a.bits != b.bits:
        return False
    fa, fb = a.data.reshape(-1), b.data.reshape(-1)
    for x, y in zip(fa, fb):
        if x.precision != y.precision or to_text(x) != to_text(y):
            return False
    return True


def _check_same(a: MPMatrix, b: MPMatrix) -> None:
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.bits != b.bits:
        raise DimensionError(f"precision mismatch {a.bits} vs {b.bits}")


def mat_addsub(op: str, a: MPMatrix, b: MPMatrix) -> MPMatrix:
    """Elementwise ``a + b`` or ``a - b``, each entry rounded at the operands' precision."""
    _check_same(a, b)
    with a.ctx.active():
        if op == "add":
            data = a.data + b.data
        elif op == "sub":
            data = a.data - b.data
        else:
            raise ValueError(f"op must be 'add' or 'sub', got {op!r}")
    return MPMatrix(data, a.bits)


def _check_inner(a: MPMatrix, b: MPMatrix) -> None:
    if a.n != b.m:
        raise DimensionError(f"inner dimensions differ: {a.shape} x {b.shape}")


def simple_mul(a: MPMatrix, b: MPMatrix, ctx: PrecisionContext) -> MPMatrix:
    """Inner-product product, c_ij = sum_k a_ik b_kj, accumulated left to right."""
    _check_inner(a, b)
    with ctx.active():
        data = a.data @ b.data
    return MPMatrix(data, ctx.bits)


def simple_mul_loops(a: MPMatrix, b: MPMatrix, ctx: PrecisionContext) -> MPMatrix:
    """Explicit three-loop product; slow, used to cross-check :func:`simple_mul`."""
    _check_inner(a, b)
    m, l, n = a.m, a.n, b.n
    out = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            s = ctx.mul(a.data[i, 0], b.data[0, j])
            for k in range(1, l):
                s = ctx.add(s, ctx.mul(a.data[i, k], b.data[k, j]))
            out[i, j] = s
    return MPMatrix(out, ctx.bits)


@dataclass(frozen=True)
class BlockingScheme:
    """Block grid for an (m x l) by (l x n) product with block edge ``n_min``."""

    n_min: int
    M: int
    L: int
    N: int

    @classmethod
    def for_dims(cls, m: int, l: int, n: int, n_min: int) -> "BlockingScheme":
        if n_min < 1:
            raise ValueError("n_min must be >= 1")
        return cls(n_min, -(-m // n_min), -(-l // n_min), -(-n // n_min))

    def spans(self, extent: int, count: int) -> list[slice]:
        return [slice(k * self.n_min, min((k + 1) * self.n_min, extent)) for k in range(count)]


def block_mul(a: MPMatrix, b: MPMatrix, n_min: int, ctx: PrecisionContext) -> MPMatrix:
    """Tiled product C_ij = sum_k A_ik B_kj over an n_min grid.

    Edge tiles are ragged.  Tile products use the simple kernel and the sum
    over k runs left to right, so with a single tile this is exactly
    :func:`simple_mul`.
    """
    _check_inner(a, b)
    m, l, n = a.m, a.n, b.n
    grid = BlockingScheme.for_dims(m, l, n, n_min)
    rows, inner, cols = grid.spans(m, grid.M), grid.spans(l, grid.L), grid.spans(n, grid.N)
    A, B = a.data, b.data
    out = np.empty((m, n), dtype=object)
    with ctx.active():
        for ri in rows:
            for cj in cols:
                acc = A[ri, inner[0]] @ B[inner[0], cj]
                for kk in inner[1:]:
                    acc = acc + A[ri, kk] @ B[kk, cj]
                out[ri, cj] = acc
    return MPMatrix(out, ctx.bits)


def one_norm(a: MPMatrix):
    """Maximum absolute column sum, rounded at ``a``'s precision."""
    ctx = a.ctx
    best = ctx.zero()
    with ctx.active():
        for j in range(a.n):
            s = ctx.zero()
            for x in a.data[:, j]:
                s = ctx.add(s, abs(x))
            if s > best:
                best = s
    return best


class ErrorSummary(NamedTuple):
    max: object
    min: object
    skipped: int


def max_rel_error_mat(ahat: MPMatrix, aref: MPMatrix) -> ErrorSummary:
    """Largest and smallest entrywise relative error of ``ahat`` against ``aref``.

    Entries whose reference is exactly zero are skipped and counted.
    Errors are evaluated at the reference precision.
    """
    if ahat.shape != aref.shape:
        raise DimensionError(f"shape mismatch {ahat.shape} vs {aref.shape}")
    hi = lo = None
    skipped = 0
    for x, r in zip(ahat.data.reshape(-1), aref.data.reshape(-1)):
        if r == 0:
            skipped += 1
            continue
        e = scalar_rel_error(x, r)
        if hi is None or e > hi:
            hi = e
        if lo is None or e < lo:
            lo = e
    if hi is None:
        raise UndefinedMetricError("all reference entries are zero")
    return ErrorSummary(hi, lo, skipped)


# text format ----------------------------------------------------------------

def dumps(a: MPMatrix) -> str:
    lines = [f"mpmat {a.m} {a.n} {a.bits}"]
    for i in range(a.m):
        lines.append(" ".join(to_text(x) for x in a.data[i]))
    return "\n".join(lines) + "\n"


def loads(text: str) -> MPMatrix:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty matrix file")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "mpmat":
        raise ValueError(f"bad header {lines[0]!r}")
    m, n, bits = (int(t) for t in head[1:])
    ctx = PrecisionContext(bits)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != m:
        raise ValueError(f"expected {m} rows, found {len(body)}")
    data = np.empty((m, n), dtype=object)
    for i, ln in enumerate(body):
        toks = ln.split(" ")
        if len(toks) != n:
            raise ValueError(f"row {i + 1}: expected {n} entries, found {len(toks)}")
        for j, t in enumerate(toks):
            data[i, j] = from_text(t, ctx)
    return MPMatrix(data, bits)


def save(a: MPMatrix, path) -> None:
    Path(path).write_text(dumps(a))


def load(path) -> MPMatrix:
    return loads(Path(path).read_text())


"""Closed-form operation counts and the relative-complexity table.

The recurrences use the same odd-size rule (pad or peel) and the same
base-case test as :mod:`mpfastmm.fastmm`, so for any shape they agree
exactly with the instrumented counter.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .fastmm import OpCounter, odd_step

# (A-side, B-side, C-side) half-size block additions per recursion node
ADDSUB_TERMS = {"strassen": (5, 5, 8), "winograd": (4, 4, 7)}

COMPLEXITY_SIZES = [255, 256, 257, 511, 512, 513, 1023, 1024, 1025, 2047, 2048, 2049]


def count_simple(m: int, l: int, n: int, from_zero: bool = False) -> OpCounter:
    """Operations of the inner-product algorithm.

    Each entry takes l multiplications and l - 1 additions.  With
    ``from_zero`` the sum is taken to start from an explicit 0, adding one
    more addition per entry (the bookkeeping used by the published table).
    """
    if min(m, l, n) < 1:
        raise ValueError("dimensions must be positive")
    return OpCounter(m * l * n, m * n * (l - 1 + from_zero))


def count_fast(
    algo: str, m: int, l: int, n: int, n_min: int, odd_policy: str = "mixed", from_zero: bool = False
) -> OpCounter:
    """Operations of the Strassen/Winograd recursion on an (m, l, n) product."""
    if min(m, l, n) < 1 or n_min < 1:
        raise ValueError("dimensions and n_min must be positive")
    ka, kb, kc = ADDSUB_TERMS[algo]
    # All seven children at a level share one shape, so the recursion
    # unrolls into a single path with a growing multiplicity.
    scale = 1
    total = OpCounter()
    while min(m, l, n) > n_min:
        sm, sl, sn = (odd_step(d, odd_policy) for d in (m, l, n))
        mc, lc, nc = m - (sm < 0), l - (sl < 0), n - (sn < 0)
        border = OpCounter()
        if sl < 0:
            border += OpCounter(mc * nc, mc * nc)
        if sn < 0:
            border += count_simple(mc, l, 1, from_zero)
        if sm < 0:
            border += count_simple(1, l, n, from_zero)
        hm, hl, hn = (mc + (sm > 0)) // 2, (lc + (sl > 0)) // 2, (nc + (sn > 0)) // 2
        total += border.scaled(scale)
        total.addsub += scale * (ka * hm * hl + kb * hl * hn + kc * hm * hn)
        scale *= 7
        m, l, n = hm, hl, hn
    return total + count_simple(m, l, n, from_zero).scaled(scale)


@dataclass(frozen=True)
class ComplexityRow:
    m: int
    l: int
    n: int
    strassen_mul_ratio: Fraction
    strassen_addsub_ratio: Fraction
    winograd_mul_ratio: Fraction
    winograd_addsub_ratio: Fraction


def _ratio(num: int, den: int) -> Fraction:
    # l == 1 gives no additions at all in either algorithm
    return Fraction(num, den) if den else Fraction(1)


def ratio_table(sizes, n_min: int, odd_policy: str = "mixed", from_zero: bool = False) -> list[ComplexityRow]:
    """Fast-to-simple operation ratios, kept as exact fractions.

    ``sizes`` holds ints (square) or (m, l, n) tuples.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("empty size list")
    rows = []
    for s in sizes:
        m, l, n = (s, s, s) if isinstance(s, int) else tuple(s)
        base = count_simple(m, l, n, from_zero)
        st = count_fast("strassen", m, l, n, n_min, odd_policy, from_zero)
        wi = count_fast("winograd", m, l, n, n_min, odd_policy, from_zero)
        rows.append(
            ComplexityRow(
                m, l, n,
                _ratio(st.mul, base.mul), _ratio(st.addsub, base.addsub),
                _ratio(wi.mul, base.mul), _ratio(wi.addsub, base.addsub),
            )
        )
    return rows


_FIELDS = ("strassen_addsub_ratio", "strassen_mul_ratio", "winograd_addsub_ratio", "winograd_mul_ratio")


def table_csv(rows: list[ComplexityRow], n_min: int) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "l", "n", "n_min", *_FIELDS])
    for r in rows:
        w.writerow([r.m, r.l, r.n, n_min, *(f"{float(getattr(r, f)):.3f}" for f in _FIELDS)])
    return buf.getvalue()


def table_text(rows: list[ComplexityRow], n_min: int) -> str:
    """Aligned text laid out like the classic relative-complexity table."""
    head1 = f"{'':>14} | {'Strassen':^17} | {'Winograd':^17}"
    head2 = f"{f'n_min = {n_min}':>14} | {'Add & Sub':>9} {'Mul':>7} | {'Add & Sub':>9} {'Mul':>7}"
    rule = "-" * len(head2)
    lines = [rule, head1, rule, head2, rule]
    for r in rows:
        label = f"{r.m} x {r.n}" if r.l == r.m else f"{r.m} x {r.l} x {r.n}"
        vals = [f"{float(getattr(r, f)):.3f}" for f in _FIELDS]
        lines.append(f"{label:>14} | {vals[0]:>9} {vals[1]:>7} | {vals[2]:>9} {vals[3]:>7}")
    lines.append(rule)
    return "\n".join(lines) + "\n"

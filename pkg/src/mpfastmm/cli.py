"""Benchmark command line: ``mpfastmm {matmul,lu,opcount,gen}``.

Every experiment appends rows of a fixed-column CSV (see ``CSV_FIELDS``);
without ``--csv`` the rows go to stdout.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import os
import re
import sys
import time
from dataclasses import dataclass

from . import blocklu, densemat, fastmm, matgen, opmodel
from .errors import SingularPivotError
from .precision import MAX_BITS, MIN_BITS, PrecisionContext, to_decimal


@dataclass
class BenchRecord:
    command: str
    algorithm: str
    m: int | None = None
    l: int | None = None
    n: int | None = None
    bits: int | None = None
    n_min: int | None = None
    K: int | None = None
    alpha: int | None = None
    seed: int | None = None
    wall_seconds: str | None = None
    max_rel_error: str | None = None
    min_rel_error: str | None = None
    mul_count: int | None = None
    addsub_count: int | None = None


CSV_FIELDS = [f.name for f in dataclasses.fields(BenchRecord)]


def write_records(records: list[BenchRecord], path: str | None) -> None:
    """Append ``records``; the header goes out only when the file is new or empty."""
    rows = [{k: ("" if v is None else v) for k, v in dataclasses.asdict(r).items()} for r in records]
    if path is None:
        w = csv.DictWriter(sys.stdout, CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        return
    fresh = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        w = csv.DictWriter(fh, CSV_FIELDS, lineterminator="\n")
        if fresh:
            w.writeheader()
        w.writerows(rows)


def _fmt_err(x, verbose: bool) -> str:
    return to_decimal(x, 0 if verbose else 3)


def _seconds(t0: float) -> str:
    return f"{time.monotonic() - t0:.3f}"


# argument types -------------------------------------------------------------

def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _bits(text: str) -> int:
    v = int(text)
    if not MIN_BITS <= v <= MAX_BITS:
        raise argparse.ArgumentTypeError(f"bits must lie in [{MIN_BITS}, {MAX_BITS}]")
    return v


def _int_range(text: str) -> list[int]:
    m = re.fullmatch(r"(\d+)\.\.(\d+)", text.strip())
    if m:
        lo, hi = int(m[1]), int(m[2])
        if lo < 1 or hi < lo:
            raise argparse.ArgumentTypeError(f"bad range {text}")
        return list(range(lo, hi + 1))
    try:
        vals = [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text}") from None
    if any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("values must be positive")
    return vals


def pow2_band(lo: int, hi: int) -> list[int]:
    """2^k - 1, 2^k, 2^k + 1 for every k whose triple touches [lo, hi]."""
    out = []
    k = 1
    while (1 << k) - 1 <= hi:
        out.extend(s for s in ((1 << k) - 1, 1 << k, (1 << k) + 1) if lo <= s <= hi)
        k += 1
    return list(dict.fromkeys(out))  # 3 = 2^1 + 1 = 2^2 - 1


def parse_sizes(text: str) -> list:
    """Comma list of ``N`` (square), ``MxLxN`` shapes, or ``A..B`` power-of-two bands."""
    sizes: list = []
    for tok in text.split(","):
        tok = tok.strip().lower()
        if not tok:
            continue
        if ".." in tok:
            lo, _, hi = tok.partition("..")
            try:
                sizes.extend(pow2_band(int(lo), int(hi)))
            except ValueError:
                raise argparse.ArgumentTypeError(f"bad size range {tok!r}") from None
        elif "x" in tok:
            parts = tok.split("x")
            if len(parts) != 3:
                raise argparse.ArgumentTypeError(f"shape must be MxLxN, got {tok!r}")
            sizes.append(tuple(_positive(p) for p in parts))
        else:
            sizes.append(_positive(tok))
    if not sizes:
        raise argparse.ArgumentTypeError("no sizes given")
    return sizes


# commands -------------------------------------------------------------------

def cmd_matmul(args) -> int:
    m = args.m or args.n
    l = args.l or args.n
    n = args.n
    ctx = PrecisionContext(args.bits)
    ref_ctx = PrecisionContext(min(MAX_BITS, args.bits * args.ref_bits_multiplier))
    algos = list(fastmm.KERNELS) if args.algo == "all" else [args.algo]
    a, b = matgen.gen_bench_pair(m, l, n, ctx)
    ref = matgen.bench_oracle(m, l, n, ref_ctx)
    records = []
    for algo in algos:
        t0 = time.monotonic()
        c, count = fastmm.multiply(algo, a, b, args.nmin, ctx, args.odd_policy)
        wall = _seconds(t0)
        err = densemat.max_rel_error_mat(c, ref)
        records.append(
            BenchRecord(
                "matmul", algo, m, l, n, args.bits, args.nmin, wall_seconds=wall,
                max_rel_error=_fmt_err(err.max, args.verbose), min_rel_error=_fmt_err(err.min, args.verbose),
                mul_count=count.mul, addsub_count=count.addsub,
            )
        )
    write_records(records, args.csv)
    return 0


def cmd_lu(args) -> int:
    n = args.n
    ctx = PrecisionContext(args.bits)
    if args.matrix == "random":
        a = matgen.gen_random(n, n, args.seed, ctx)
        seed = args.seed
    else:
        a = matgen.gen_lotkin(n, ctx)
        seed = None
    x_true, rhs = matgen.gen_linear_system(a, ctx)

    runs = [("columnwise", None)] + [(args.kernel, alpha) for alpha in args.alpha_sweep]
    records = []
    status = 0
    for name, alpha in runs:
        K = None if alpha is None else alpha * args.nmin
        cfg = blocklu.BlockLUConfig(K=K, multiply=args.kernel, n_min=args.nmin, odd_policy=args.odd_policy)
        counter = fastmm.OpCounter()
        rec = BenchRecord("lu", name, n, n, n, args.bits, args.nmin, K, alpha, seed)
        t0 = time.monotonic()
        try:
            if K is None:
                f = blocklu.lu_columnwise(a)
            else:
                f = blocklu.lu_blocked(a, cfg, ctx, counter=counter)
            x = blocklu.lu_solve(f, rhs, ctx)
        except SingularPivotError:
            rec.wall_seconds = _seconds(t0)
            rec.max_rel_error = "SINGULAR"
            status = 1
        else:
            rec.wall_seconds = _seconds(t0)
            rec.max_rel_error = _fmt_err(blocklu.max_rel_error_solution(x, x_true).max_rel, args.verbose)
            if K is not None:
                rec.mul_count, rec.addsub_count = counter.mul, counter.addsub
        records.append(rec)
    write_records(records, args.csv)
    return status


def cmd_opcount(args) -> int:
    rows = opmodel.ratio_table(args.sizes, args.nmin, args.odd_policy, args.from_zero)
    if args.format == "table":
        sys.stdout.write(opmodel.table_text(rows, args.nmin))
    else:
        sys.stdout.write(opmodel.table_csv(rows, args.nmin))
    return 0


def cmd_gen(args) -> int:
    ctx = PrecisionContext(args.bits)
    n = args.n
    m = args.m or n
    l = args.l or n
    if args.kind == "bench-a":
        mat = matgen.gen_bench_pair(m, l, 1, ctx)[0]
    elif args.kind == "bench-b":
        mat = matgen.gen_bench_pair(1, l, n, ctx)[1]
    elif args.kind == "random":
        mat = matgen.gen_random(m, n, args.seed, ctx)
    else:
        mat = matgen.gen_lotkin(n, ctx)
    try:
        densemat.save(mat, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpfastmm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, bits_default):
        sp.add_argument("--bits", type=_bits, default=bits_default, help="mantissa length in bits")
        sp.add_argument("--nmin", type=_positive, default=32, help="recursion threshold / block edge")
        sp.add_argument("--odd-policy", choices=fastmm.ODD_POLICIES, default="mixed")

    mm = sub.add_parser("matmul", help="benchmark-matrix products against the closed-form oracle")
    mm.add_argument("--algo", choices=[*fastmm.KERNELS, "all"], default="all")
    mm.add_argument("--m", type=_positive)
    mm.add_argument("--l", type=_positive)
    mm.add_argument("--n", type=_positive, default=256)
    common(mm, 128)
    mm.add_argument("--ref-bits-multiplier", type=_positive, default=2)
    mm.add_argument("--csv")
    mm.add_argument("--verbose", action="store_true", help="full-precision error columns")
    mm.set_defaults(func=cmd_matmul)

    lu = sub.add_parser("lu", help="column-wise vs blocked LU over a K = alpha * n_min sweep")
    lu.add_argument("--matrix", choices=["random", "lotkin"], default="random")
    lu.add_argument("--n", type=_positive, default=128)
    common(lu, 256)
    lu.add_argument("--kernel", choices=fastmm.KERNELS, default="winograd")
    lu.add_argument("--alpha-sweep", type=_int_range, default=list(range(1, 11)))
    lu.add_argument("--seed", type=int, default=1)
    lu.add_argument("--csv")
    lu.add_argument("--verbose", action="store_true")
    lu.set_defaults(func=cmd_lu)

    oc = sub.add_parser("opcount", help="relative operation counts of the fast algorithms")
    oc.add_argument("--sizes", type=parse_sizes, default=list(opmodel.COMPLEXITY_SIZES))
    oc.add_argument("--nmin", type=_positive, default=32)
    oc.add_argument("--odd-policy", choices=fastmm.ODD_POLICIES, default="mixed")
    oc.add_argument("--from-zero", action="store_true", help="count sums as starting from an explicit 0")
    oc.add_argument("--format", choices=["csv", "table"], default="table")
    oc.set_defaults(func=cmd_opcount)

    gn = sub.add_parser("gen", help="write a generated matrix in the mpmat text format")
    gn.add_argument("--kind", choices=["bench-a", "bench-b", "random", "lotkin"], required=True)
    gn.add_argument("--m", type=_positive)
    gn.add_argument("--l", type=_positive)
    gn.add_argument("--n", type=_positive, default=4)
    gn.add_argument("--bits", type=_bits, default=128)
    gn.add_argument("--seed", type=int, default=1)
    gn.add_argument("--out", required=True)
    gn.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

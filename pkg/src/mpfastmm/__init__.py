"""Arbitrary-precision matrix multiplication: Simple, Block, Strassen and
Winograd's variant, with operation counting and pivot-free blocked LU."""

from .blocklu import BlockLUConfig, LUFactors, cond_one, lu_blocked, lu_columnwise, solve
from .densemat import MPMatrix, block_mul, mat_from_fn, one_norm, simple_mul
from .errors import (
    DimensionError,
    HexFloatParseError,
    SingularOperationError,
    SingularPivotError,
    UndefinedMetricError,
)
from .fastmm import FastMMConfig, OpCounter, fast_mul, multiply
from .matgen import gen_bench_pair, gen_lotkin, gen_random
from .precision import PrecisionContext

__all__ = [
    "BlockLUConfig",
    "DimensionError",
    "FastMMConfig",
    "HexFloatParseError",
    "LUFactors",
    "MPMatrix",
    "OpCounter",
    "PrecisionContext",
    "SingularOperationError",
    "SingularPivotError",
    "UndefinedMetricError",
    "block_mul",
    "cond_one",
    "fast_mul",
    "gen_bench_pair",
    "gen_lotkin",
    "gen_random",
    "lu_blocked",
    "lu_columnwise",
    "mat_from_fn",
    "multiply",
    "one_norm",
    "simple_mul",
    "solve",
]

__version__ = "0.1.0"

"""Precision contexts and correctly rounded scalar arithmetic.

Scalars are ``gmpy2.mpfr`` values (MPFR underneath), so every operation is
correctly rounded.  A :class:`PrecisionContext` fixes the destination
mantissa length; rounding is always round-to-nearest, ties-to-even.
"""

from __future__ import annotations

import string
from fractions import Fraction
from dataclasses import dataclass, field
from typing import Any

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import HexFloatParseError, SingularOperationError, UndefinedMetricError

MIN_BITS = 2
MAX_BITS = 2**20

MPScalar = Any  # gmpy2.mpfr; the C type is not usable in annotations
_MPFR = type(mpfr(0))


@dataclass(frozen=True)
class PrecisionContext:
    """Mantissa length (in bits) of every scalar produced under this context."""

    bits: int
    _gctx: Any = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if isinstance(self.bits, bool) or not isinstance(self.bits, int):
            raise TypeError(f"bits must be an int, got {self.bits!r}")
        if not MIN_BITS <= self.bits <= MAX_BITS:
            raise ValueError(f"bits must lie in [{MIN_BITS}, {MAX_BITS}], got {self.bits}")
        gctx = gmpy2.context(
            precision=self.bits,
            round=gmpy2.RoundToNearest,
            trap_divzero=True,
            trap_invalid=True,
        )
        object.__setattr__(self, "_gctx", gctx)

    @property
    def rounding(self) -> str:
        return "nearest-even"

    def active(self):
        """Context manager making this precision current for operator syntax.

        Needed for numpy object-array arithmetic, which dispatches through
        ``+``/``*`` and therefore uses gmpy2's thread-local context.  A fresh
        copy is entered each time so nesting is safe.
        """
        return self._gctx.copy()

    # scalar construction --------------------------------------------------

    def round(self, x) -> MPScalar:
        """``x`` rounded once to this context.

        Accepts int/mpz, float, Fraction/mpq, decimal or hex strings, and
        mpfr of any precision.
        """
        if isinstance(x, str):
            return mpfr(x, self.bits)
        if isinstance(x, float):
            x = mpfr(x, 53)
        elif isinstance(x, (Fraction, type(mpq()))):
            return self._gctx.div(_exact(x.numerator), _exact(x.denominator))
        elif not isinstance(x, _MPFR):
            x = _exact(x)
        return self._gctx.plus(x)

    def zero(self) -> MPScalar:
        return mpfr(0, self.bits)

    def one(self) -> MPScalar:
        return mpfr(1, self.bits)

    # arithmetic -----------------------------------------------------------

    def add(self, a, b) -> MPScalar:
        return self._gctx.add(a, b)

    def sub(self, a, b) -> MPScalar:
        return self._gctx.sub(a, b)

    def mul(self, a, b) -> MPScalar:
        return self._gctx.mul(a, b)

    def div(self, a, b) -> MPScalar:
        if b == 0:
            raise SingularOperationError("singular scalar operation: division by zero")
        return self._gctx.div(a, b)

    def sqrt(self, a) -> MPScalar:
        if a < 0:
            raise ValueError(f"sqrt of negative value {a}")
        return self._gctx.sqrt(a)

    def ulp(self, x) -> MPScalar:
        """Unit in the last place of ``x`` at this precision (exact power of two)."""
        x = self.round(x)
        if x == 0:
            raise ValueError("ulp of zero is not defined here")
        e, _ = gmpy2.frexp(x)
        return self._gctx.mul_2exp(mpfr(1, 2), e - self.bits)


def _exact(x) -> MPScalar:
    """Exact mpfr for an integer-like value (precision grows to fit)."""
    z = mpz(x)
    return mpfr(z, max(z.bit_length(), 2))


_OPS = {"add": "add", "sub": "sub", "mul": "mul", "div": "div"}


def scalar_arith(op: str, a, b, ctx: PrecisionContext) -> MPScalar:
    """Apply ``op`` in {add, sub, mul, div}, correctly rounded to ``ctx``."""
    try:
        name = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    if not (gmpy2.is_finite(a) and gmpy2.is_finite(b)):
        raise ValueError("operands must be finite")
    return getattr(ctx, name)(a, b)


def scalar_sqrt(a, ctx: PrecisionContext) -> MPScalar:
    return ctx.sqrt(a)


def scalar_rel_error(approx, reference) -> MPScalar:
    """|approx - reference| / |reference| at the reference's precision."""
    if reference == 0:
        raise UndefinedMetricError("relative error against a zero reference")
    g = gmpy2.context(precision=reference.precision, round=gmpy2.RoundToNearest)
    return g.div(g.abs(g.sub(approx, reference)), g.abs(reference))


# text codec -----------------------------------------------------------------

_HEX = set(string.hexdigits)


def to_text(x) -> str:
    """Bit-exact hexadecimal text, e.g. ``0x1.8p+1`` for 3."""
    if gmpy2.is_nan(x):
        return "nan"
    sign = "-" if gmpy2.is_signed(x) else ""
    if gmpy2.is_infinite(x):
        return sign + "inf"
    if x == 0:
        return sign + "0x0p+0"
    mant, exp = x.as_mantissa_exp()
    mant = abs(mant)
    tz = gmpy2.bit_scan1(mant)
    mant >>= tz
    exp += tz
    nbits = mant.bit_length()
    exp += nbits - 1
    frac_bits = nbits - 1
    frac = mant - (mpz(1) << frac_bits)
    if frac_bits == 0:
        body = "1"
    else:
        ndig = -(-frac_bits // 4)
        frac <<= 4 * ndig - frac_bits
        body = "1." + format(int(frac), "x").rjust(ndig, "0")
    return f"{sign}0x{body}p{exp:+d}"


def from_text(text: str, ctx: PrecisionContext) -> MPScalar:
    """Parse a hex-float literal, rounding once to ``ctx``."""
    s = text.strip()
    offset = len(text) - len(text.lstrip())
    pos = 0
    neg = False
    if pos < len(s) and s[pos] in "+-":
        neg = s[pos] == "-"
        pos += 1
    rest = s[pos:].lower()
    if rest in ("inf", "nan"):
        v = mpfr(rest, ctx.bits)
        return ctx._gctx.minus(v) if neg else v
    if not s[pos : pos + 2].lower() == "0x":
        raise HexFloatParseError(text, offset + pos, "expected '0x'")
    pos += 2
    int_digits = ""
    while pos < len(s) and s[pos] in _HEX:
        int_digits += s[pos]
        pos += 1
    frac_digits = ""
    if pos < len(s) and s[pos] == ".":
        pos += 1
        while pos < len(s) and s[pos] in _HEX:
            frac_digits += s[pos]
            pos += 1
    if not int_digits and not frac_digits:
        raise HexFloatParseError(text, offset + pos, "expected hex digit")
    if pos >= len(s) or s[pos] not in "pP":
        raise HexFloatParseError(text, offset + pos, "expected 'p'")
    pos += 1
    exp_start = pos
    if pos < len(s) and s[pos] in "+-":
        pos += 1
    if pos >= len(s) or not s[pos].isdigit():
        raise HexFloatParseError(text, offset + pos, "expected decimal exponent")
    while pos < len(s) and s[pos].isdigit():
        pos += 1
    if pos != len(s):
        raise HexFloatParseError(text, offset + pos, "unexpected character")
    sig = mpz(int_digits + frac_digits, 16)
    exp = int(s[exp_start:]) - 4 * len(frac_digits)
    if neg:
        sig = -sig
    if sig == 0:
        v = mpfr(0, ctx.bits)
        return ctx._gctx.minus(v) if neg else v
    # one rounding: integer significand -> ctx, then an exact power-of-two scale
    return ctx._gctx.mul_2exp(ctx.round(sig), exp)


def to_decimal(x, digits: int = 3) -> str:
    """Scientific decimal string with ``digits`` significant digits (0: all)."""
    if gmpy2.is_nan(x) or gmpy2.is_infinite(x):
        return to_text(x)
    if x == 0:
        return "0"
    m, e, _ = x.digits(10, digits)
    sign = ""
    if m.startswith("-"):
        sign, m = "-", m[1:]
    lead = m[0] + ("." + m[1:] if len(m) > 1 else "")
    return f"{sign}{lead}e{e - 1:+03d}"


def log10(x) -> float:
    """log10 of a positive scalar as a float; fine far outside double range."""
    return float(gmpy2.log10(x))

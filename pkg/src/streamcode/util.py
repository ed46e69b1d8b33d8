"""Small numeric helpers shared across the package.

The whole pipeline keeps time and bit accounting in exact rationals so that
repeated runs (and runs on different platforms) produce byte-identical output.
The one quantity that is not naturally rational, -log2 of a quantized
probability, is used as a fixed-point rational computed by an integer-only
algorithm below.
"""

from __future__ import annotations

import os
import random
from fractions import Fraction
from functools import lru_cache

# Fixed-point layout for log2 values: 48 fractional bits, computed with a
# wide guard so truncation error stays below 2^-40 of a bit.
LOG2_FRACTION_BITS = 48
_GUARD = 112
_ONE = 1 << _GUARD
_TWO = _ONE << 1


@lru_cache(maxsize=1 << 16)
def log2_fixed(n: int) -> int:
    """floor-ish(2^48 * log2(n)) for integer n >= 1, exact for powers of two.

    Uses the shift-and-square binary logarithm: bring n into [1, 2) as a
    fixed-point value, then square it repeatedly; each squaring either stays in
    [1, 2) (next bit 0) or lands in [2, 4) and is halved (next bit 1). Integer
    arithmetic only, so the result is identical on every platform. The returned
    value never exceeds the true log2 by more than 2^-40 * 2^48 and is exact
    when n is a power of two.
    """
    if n < 1:
        raise ValueError(f"log2_fixed needs n >= 1, got {n}")
    ipart = n.bit_length() - 1
    if n == (1 << ipart):
        return ipart << LOG2_FRACTION_BITS
    y = (n << _GUARD) >> ipart  # n / 2^ipart in [1, 2), _GUARD fractional bits
    frac = 0
    for _ in range(LOG2_FRACTION_BITS):
        y = (y * y) >> _GUARD
        frac <<= 1
        if y >= _TWO:
            y >>= 1
            frac |= 1
    return (ipart << LOG2_FRACTION_BITS) | frac


def neg_log2_ratio(freq: int, precision: int) -> Fraction:
    """-log2(freq / 2^precision) as an exact Fraction (fixed-point rational)."""
    if freq <= 0:
        raise ValueError(f"frequency must be positive, got {freq}")
    num = (precision << LOG2_FRACTION_BITS) - log2_fixed(freq)
    return Fraction(num, 1 << LOG2_FRACTION_BITS)


def ceil_neg_log2_ratio(freq: int, precision: int) -> int:
    """ceil(-log2(freq / 2^precision)) computed exactly.

    Exact because dyadic ratios hit the power-of-two fast path in log2_fixed,
    and non-dyadic -log2 values sit much farther from integers (>= ~2^-25 for
    precision <= 24) than the 2^-40 approximation error.
    """
    num = (precision << LOG2_FRACTION_BITS) - log2_fixed(freq)
    return -((-num) >> LOG2_FRACTION_BITS)


def parse_fraction(text: str) -> Fraction:
    """Exact Fraction from a decimal string like '0.95' or '20'."""
    return Fraction(text)


def format_seconds(x: Fraction | float) -> str:
    """Fixed 9-decimal rendering used everywhere time lands in text output."""
    return f"{float(x):.9f}"


def format_quantity(x: Fraction | float) -> str:
    """Fixed 6-decimal rendering for rates/bit averages in CSV output."""
    return f"{float(x):.6f}"


SEED_ENV_VAR = "STREAMCODE_SEED"


def seeded_rng(seed: int | None = None) -> random.Random:
    """RNG for synthetic test streams; STREAMCODE_SEED overrides the default."""
    if seed is None:
        seed = int(os.environ.get(SEED_ENV_VAR, "0"))
    return random.Random(seed)

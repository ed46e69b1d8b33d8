"""Streaming binary arithmetic coder with decode-time instrumentation.

Integer implementation with a configurable register width P (64 default, 32
supported). Carry propagation uses the pending-bits technique: while the
interval sits inside the middle half it is rescaled without emitting, and the
deferred bits come out as complements of the next resolved bit. Termination
rescales once more and emits one resolved bit plus the complements, i.e.
pending + 2 disambiguating bits; the decoder zero-pads past the end.

The decoder counts every bit it pulls into its register. The count at the
moment token n is identified (capped at the number of bits that actually
exist) is recorded per token; the channel uses it to find which transmitted
bit makes token n decodable.
"""

from __future__ import annotations

from bisect import bisect_right
from fractions import Fraction

from ..errors import ZeroFrequencyError
from ..predictor import QuantizedPmf

DEFAULT_CODE_BITS = 64
SUPPORTED_CODE_BITS = (32, 64)


class ArithmeticEncoder:
    def __init__(self, code_bits: int = DEFAULT_CODE_BITS):
        if code_bits not in SUPPORTED_CODE_BITS:
            raise ValueError(f"code_bits must be one of {SUPPORTED_CODE_BITS}")
        self.code_bits = code_bits
        self.full = (1 << code_bits) - 1
        self.half = 1 << (code_bits - 1)
        self.quarter = 1 << (code_bits - 2)
        self.low = 0
        self.high = self.full
        self.pending = 0
        self.bits: list[int] = []
        self.emit_times: list[Fraction] = []
        self._finished = False

    def _emit(self, bit: int, when: Fraction) -> None:
        self.bits.append(bit)
        self.emit_times.append(when)
        flip = 1 - bit
        for _ in range(self.pending):
            self.bits.append(flip)
            self.emit_times.append(when)
        self.pending = 0

    def _renorm(self, when: Fraction) -> None:
        while True:
            if self.high < self.half:
                self._emit(0, when)
            elif self.low >= self.half:
                self._emit(1, when)
                self.low -= self.half
                self.high -= self.half
            elif self.low >= self.quarter and self.high < self.half + self.quarter:
                self.pending += 1
                self.low -= self.quarter
                self.high -= self.quarter
            else:
                return
            self.low <<= 1
            self.high = (self.high << 1) | 1

    def encode(self, pmf: QuantizedPmf, token: int, when: Fraction) -> None:
        if self._finished:
            raise RuntimeError("encoder already finished")
        if pmf.precision > self.code_bits - 2:
            raise ValueError(
                f"pmf precision {pmf.precision} too wide for a "
                f"{self.code_bits}-bit register"
            )
        cum = pmf.cum()
        lo, hi = cum[token], cum[token + 1]
        if lo == hi:
            raise ZeroFrequencyError(token, len(self.bits))
        span = self.high - self.low + 1
        total = pmf.total
        self.high = self.low + (span * hi) // total - 1
        self.low = self.low + (span * lo) // total
        self._renorm(when)

    def finish(self, when: Fraction) -> None:
        """Emit pending + 2 bits that pin a value inside the final interval."""
        if self._finished:
            return
        self.pending += 1
        if self.low < self.quarter:
            self._emit(0, when)
        else:
            self._emit(1, when)
        self._finished = True

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)


class ArithmeticDecoder:
    """Mirror of the encoder; reads zero bits past the end of the payload."""

    def __init__(self, bits: str, code_bits: int = DEFAULT_CODE_BITS):
        if code_bits not in SUPPORTED_CODE_BITS:
            raise ValueError(f"code_bits must be one of {SUPPORTED_CODE_BITS}")
        self.code_bits = code_bits
        self.full = (1 << code_bits) - 1
        self.half = 1 << (code_bits - 1)
        self.quarter = 1 << (code_bits - 2)
        self.bits = bits
        self.consumed = 0  # raw reads, padding included
        self.low = 0
        self.high = self.full
        self.value = 0
        for _ in range(code_bits):
            self.value = (self.value << 1) | self._read()

    def _read(self) -> int:
        b = 0
        if self.consumed < len(self.bits):
            b = 1 if self.bits[self.consumed] == "1" else 0
        self.consumed += 1
        return b

    def bits_needed(self) -> int:
        """Index of the last real payload bit required so far (1-based)."""
        return min(self.consumed, len(self.bits))

    def decode(self, pmf: QuantizedPmf) -> tuple[int, int]:
        """Identify the next token; returns (token, bits_needed at that moment)."""
        needed = self.bits_needed()
        total = pmf.total
        cum = pmf.cum()
        span = self.high - self.low + 1
        scaled = ((self.value - self.low + 1) * total - 1) // span
        token = bisect_right(cum, scaled) - 1
        lo, hi = cum[token], cum[token + 1]
        self.high = self.low + (span * hi) // total - 1
        self.low = self.low + (span * lo) // total
        while True:
            if self.high < self.half:
                pass
            elif self.low >= self.half:
                self.low -= self.half
                self.high -= self.half
                self.value -= self.half
            elif self.low >= self.quarter and self.high < self.half + self.quarter:
                self.low -= self.quarter
                self.high -= self.quarter
                self.value -= self.quarter
            else:
                return token, needed
            self.low <<= 1
            self.high = (self.high << 1) | 1
            self.value = (self.value << 1) | self._read()


def encode_stream(
    pmfs, tokens, times=None, code_bits: int = DEFAULT_CODE_BITS
) -> ArithmeticEncoder:
    """Encode a whole token sequence; times default to 0 (accounting only)."""
    enc = ArithmeticEncoder(code_bits)
    t = Fraction(0)
    for i, (pmf, tok) in enumerate(zip(pmfs, tokens)):
        if times is not None:
            t = times[i]
        enc.encode(pmf, tok, t)
    enc.finish(t)
    return enc


def decode_stream(
    bits: str, pmfs, count: int, code_bits: int = DEFAULT_CODE_BITS
) -> tuple[list[int], list[int]]:
    """Decode `count` tokens; returns (tokens, per-token bits-needed indices)."""
    dec = ArithmeticDecoder(bits, code_bits)
    out, needed = [], []
    it = iter(pmfs)
    for _ in range(count):
        tok, beta = dec.decode(next(it))
        out.append(tok)
        needed.append(beta)
    return out, needed

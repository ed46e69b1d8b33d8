"""Block rANS: 32-bit state, 16-bit renormalization, K tokens per block.

The encoder buffers K tokens with their recorded PMFs and encodes them in
reverse, so the decoder emits them forward. The state lives in [2^16, 2^32)
between symbols; before each encode step the state is shifted out in 16-bit
words until x < freq << (32 - F), which is exactly what keeps the post-step
state inside the range. A block's payload is its renormalization words in the
order the decoder reads them (most recently emitted first) followed by the
final 32-bit state, so payload length is 32 + 16 * words and never below 32.

A block enters the channel queue only when its last token has arrived; that
buffering is the (K-1) * E[chars] / char_rate delay floor.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from ..errors import BitstreamError, ZeroFrequencyError
from ..predictor import QuantizedPmf

STATE_BITS = 32
RENORM_BITS = 16
STATE_LOW = 1 << (STATE_BITS - RENORM_BITS)
WORD_MASK = (1 << RENORM_BITS) - 1
MAX_PRECISION = STATE_BITS - RENORM_BITS  # freq precision must fit renorm step


@dataclass(frozen=True)
class RansBlock:
    first_index: int
    tokens: tuple[int, ...]
    words: tuple[int, ...]  # decoder read order
    state: int
    enqueue_time: Fraction

    @property
    def bit_count(self) -> int:
        return STATE_BITS + RENORM_BITS * len(self.words)

    def bitstring(self) -> str:
        parts = [format(w, f"0{RENORM_BITS}b") for w in self.words]
        parts.append(format(self.state, f"0{STATE_BITS}b"))
        return "".join(parts)


def encode_block(
    tokens,
    pmfs,
    first_index: int = 0,
    enqueue_time: Fraction = Fraction(0),
) -> RansBlock:
    tokens = list(tokens)
    pmfs = list(pmfs)
    if len(tokens) != len(pmfs):
        raise ValueError("one PMF per token required")
    if not tokens:
        raise ValueError("empty block")
    x = STATE_LOW
    emitted: list[int] = []
    for pos in range(len(tokens) - 1, -1, -1):
        tok, pmf = tokens[pos], pmfs[pos]
        if pmf.precision > MAX_PRECISION:
            raise ValueError(
                f"pmf precision {pmf.precision} exceeds {MAX_PRECISION}"
            )
        f = pmf.freqs[tok]
        if f == 0:
            raise ZeroFrequencyError(tok, first_index + pos)
        cap = f << (STATE_BITS - pmf.precision)
        while x >= cap:
            emitted.append(x & WORD_MASK)
            x >>= RENORM_BITS
        x = ((x // f) << pmf.precision) + pmf.cum()[tok] + (x % f)
    return RansBlock(
        first_index, tuple(tokens), tuple(reversed(emitted)), x, enqueue_time
    )


class PmfSequence:
    """Gives a fixed PMF list the predictor protocol (next_pmf / update)."""

    def __init__(self, pmfs):
        self._pmfs = list(pmfs)
        self._at = 0

    def next_pmf(self) -> QuantizedPmf:
        return self._pmfs[self._at]

    def update(self, token: int) -> None:
        self._at += 1


def decode_block(words, state: int, model, count: int) -> list[int]:
    """Decode `count` tokens from a block payload.

    `model` follows the predictor protocol and must reproduce the PMFs the
    encoder recorded; decoding runs forward, so adaptive models stay in sync
    token by token. Raises BitstreamError on underrun, leftover words, or a
    final state that does not return to the initial constant.
    """
    if not (STATE_LOW <= state < (1 << STATE_BITS)):
        raise BitstreamError(f"state {state:#x} outside the legal range")
    x = state
    wi = 0
    out: list[int] = []
    for i in range(count):
        pmf = model.next_pmf()
        mask = pmf.total - 1
        slot = x & mask
        cum = pmf.cum()
        tok = bisect_right(cum, slot) - 1
        f = pmf.freqs[tok]
        x = f * (x >> pmf.precision) + slot - cum[tok]
        while x < STATE_LOW:
            if wi >= len(words):
                raise BitstreamError("payload ran out of renormalization words", i)
            x = (x << RENORM_BITS) | words[wi]
            wi += 1
        out.append(tok)
        model.update(tok)
    if x != STATE_LOW:
        raise BitstreamError(f"final state {x:#x} does not close the block")
    if wi != len(words):
        raise BitstreamError(f"{len(words) - wi} payload words left unread")
    return out


def split_blocks(n_tokens: int, block_tokens: int) -> list[tuple[int, int]]:
    """(start, length) spans; the final block may be shorter."""
    if block_tokens < 1:
        raise ValueError("block size must be >= 1")
    return [
        (s, min(block_tokens, n_tokens - s))
        for s in range(0, n_tokens, block_tokens)
    ]


def buffering_floor(
    block_tokens: int, mean_chars_per_token, char_rate
) -> Fraction:
    """Mean wait of a block's first token for the block to fill: (K-1)*E[B]/rate."""
    return (
        Fraction(block_tokens - 1)
        * Fraction(mean_chars_per_token)
        / Fraction(char_rate)
    )

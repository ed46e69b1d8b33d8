"""Deterministic synthetic trace construction for fixtures and tests.

The generated trace is built so the interesting averages come out exact:

  * char counts cycle (4,3,5,4,2,6,4,4) -> mean 4.0 chars/token whenever the
    length is a multiple of 8;
  * the realized token's probability cycles 2^-4, 2^-5, 2^-6, 2^-5 -> mean
    ideal cost exactly 5.0 bits/token whenever the length is a multiple of 4
    (dyadic probabilities quantize to themselves, so quantization adds zero);
  * every PMF lists the realized token plus three dyadic distractors and
    spreads a 0.25 tail over the rest of the 256-id vocabulary.

So for n divisible by 8: 5.0 bits/token over 4.0 chars/token = 1.25 bits/char
and the matched channel rate at 20 cps is exactly 25 bps.
"""

from __future__ import annotations

from fractions import Fraction

from .corpus import TokenStream
from .predictor import (
    TraceHeader,
    TraceRecord,
    TraceReplayPredictor,
    stream_from_trace,
)

VOCAB = 256
CHAR_CYCLE = (4, 3, 5, 4, 2, 6, 4, 4)  # mean 4.0
EXP_CYCLE = (4, 5, 6, 5)  # realized prob 2^-e, mean cost 5.0 bits
_POOL = "the quick brown fox jumps over the lazy dog "


def synthetic_header() -> TraceHeader:
    return TraceHeader(VOCAB, "external", "synthetic-cycle-v1")


def synthetic_records(n: int) -> list[TraceRecord]:
    records = []
    for i in range(n):
        e = EXP_CYCLE[i % len(EXP_CYCLE)]
        q = 1.0 / (1 << e)
        r = (11 + 73 * i) % VOCAB
        d1, d2, d3 = (r + 37) % VOCAB, (r + 91) % VOCAB, (r + 149) % VOCAB
        rest = 0.125 - q  # 1 - tail(0.25) - q - 1/2 - 1/8, dyadic and positive
        entries = ((r, q), (d1, 0.5), (d2, 0.125), (d3, rest))
        records.append(
            TraceRecord(i, r, entries, 0.25, CHAR_CYCLE[i % len(CHAR_CYCLE)])
        )
    return records


def synthetic_text(records) -> str:
    out = []
    at = 0
    for r in records:
        piece = ""
        need = r.char_count
        while need:
            take = min(need, len(_POOL) - at)
            piece += _POOL[at : at + take]
            at = (at + take) % len(_POOL)
            need -= take
        out.append(piece)
    return "".join(out)


def synthetic_stream(
    n: int, char_rate: Fraction = Fraction(20)
) -> tuple[TokenStream, TraceReplayPredictor]:
    """In-memory stream + fresh replay predictor over the same records."""
    records = synthetic_records(n)
    text = synthetic_text(records)
    stream = stream_from_trace(synthetic_header(), records, char_rate, text)
    return stream, TraceReplayPredictor(records, VOCAB)

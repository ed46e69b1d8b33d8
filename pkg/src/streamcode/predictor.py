"""Sequential probability models and their fixed-point quantization.

Every model emits, for each position, a PMF quantized to integer frequencies
summing to exactly 2^precision. That quantized table is the single probability
substrate shared by all coders and by the Shannon baseline, so quantization
never shows up as a confound between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .corpus import TokenEvent, TokenStream
from .errors import TraceFormatError, ZeroFrequencyError
from .util import neg_log2_ratio

DEFAULT_PRECISION = 14
MIN_PRECISION = 1
MAX_PRECISION = 24


class QuantizedPmf:
    """Integer frequencies over token ids 0..V-1 summing to exactly 2^precision."""

    __slots__ = ("freqs", "precision", "_cum")

    def __init__(self, freqs, precision: int):
        if not (MIN_PRECISION <= precision <= MAX_PRECISION):
            raise ValueError(f"precision must be in [1, 24], got {precision}")
        freqs = tuple(freqs)
        total = 1 << precision
        s = 0
        for f in freqs:
            if f < 0:
                raise ValueError("negative frequency")
            s += f
        if s != total:
            raise ValueError(f"frequencies sum to {s}, expected {total}")
        self.freqs = freqs
        self.precision = precision
        self._cum = None

    @property
    def total(self) -> int:
        return 1 << self.precision

    @property
    def vocab_size(self) -> int:
        return len(self.freqs)

    def cum(self) -> list[int]:
        """Cumulative table c[0..V], c[i] = sum of freqs below symbol i."""
        if self._cum is None:
            c = [0] * (len(self.freqs) + 1)
            run = 0
            for i, f in enumerate(self.freqs):
                run += f
                c[i + 1] = run
            self._cum = c
        return self._cum

    def __eq__(self, other):
        return (
            isinstance(other, QuantizedPmf)
            and self.precision == other.precision
            and self.freqs == other.freqs
        )

    def __hash__(self):
        return hash((self.freqs, self.precision))

    def __repr__(self):
        return f"QuantizedPmf(V={len(self.freqs)}, F={self.precision})"


def quantize(probs, precision: int = DEFAULT_PRECISION) -> QuantizedPmf:
    """Largest-remainder apportionment of `probs` into 2^precision counts.

    Ties in remainder go to the lower token id. Two repair passes keep the
    contract airtight against float-sum edge cases: an over-allocation trim
    (smallest remainders give back first) and a minimum-1 lift so every symbol
    with nonzero probability keeps a nonzero frequency, funded by the largest
    frequencies.
    """
    probs = list(probs)
    total = 1 << precision
    nonzero = sum(1 for p in probs if p > 0)
    if nonzero == 0:
        raise ValueError("PMF has no positive mass")
    if nonzero > total:
        raise ValueError(
            f"{nonzero} positive-probability symbols cannot each get a "
            f"frequency >= 1 out of 2^{precision}"
        )
    ssum = math.fsum(probs)
    if not math.isclose(ssum, 1.0, rel_tol=0, abs_tol=1e-6):
        raise ValueError(f"probabilities sum to {ssum}, expected 1")
    if any(p < 0 for p in probs):
        raise ValueError("negative probability")

    ideals = [p * total for p in probs]
    freqs = [math.floor(x) for x in ideals]
    rem = [x - f for x, f in zip(ideals, freqs)]
    deficit = total - sum(freqs)
    if deficit > 0:
        order = sorted(range(len(probs)), key=lambda i: (-rem[i], i))
        for i in order[:deficit]:
            freqs[i] += 1
    elif deficit < 0:
        order = sorted(range(len(probs)), key=lambda i: (rem[i], -i))
        take = -deficit
        for i in order:
            if take == 0:
                break
            if freqs[i] >= 2:
                freqs[i] -= 1
                take -= 1
        if take:
            raise ValueError("could not repair over-allocation")

    # Lift any positive-probability symbol stranded at zero.
    poor = [i for i, p in enumerate(probs) if p > 0 and freqs[i] == 0]
    for i in poor:
        donor = max(range(len(freqs)), key=lambda j: (freqs[j], -j))
        if freqs[donor] < 2:
            raise ValueError("not enough mass to give every symbol a count")
        freqs[donor] -= 1
        freqs[i] = 1
    return QuantizedPmf(freqs, precision)


def dequantize(pmf: QuantizedPmf) -> list[float]:
    """Dyadic probabilities freq/2^precision (exact as floats for F <= 24)."""
    total = float(pmf.total)
    return [f / total for f in pmf.freqs]


# ---------------------------------------------------------------------------
# Predictors. Each exposes next_pmf() for the current position and
# update(token) once the token is realized; calls strictly alternate.
# ---------------------------------------------------------------------------


class UniformPredictor:
    """Fixed uniform model; quantization spreads the residue to low ids."""

    def __init__(self, vocab_size: int, precision: int = DEFAULT_PRECISION):
        self.vocab_size = vocab_size
        p = 1.0 / vocab_size
        self._pmf = quantize([p] * vocab_size, precision)

    def next_pmf(self) -> QuantizedPmf:
        return self._pmf

    def update(self, token: int) -> None:
        pass


class NgramPredictor:
    """Adaptive n-gram model with additive smoothing and context backoff.

    order=1 is the adaptive unigram. For order k, the context is the last k-1
    tokens; an unseen context backs off to the (k-1)-gram estimate, down to the
    unigram whose additive delta covers the cold start. Counts update online
    with each realized token, so encoder and decoder stay in lockstep.
    """

    def __init__(
        self,
        vocab_size: int,
        order: int = 1,
        delta: float = 1.0,
        precision: int = DEFAULT_PRECISION,
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if not delta > 0:
            raise ValueError(f"delta must be positive, got {delta}")
        self.vocab_size = vocab_size
        self.order = order
        self.delta = delta
        self.precision = precision
        # counts[j] maps a length-j context tuple to {token: count}
        self._counts: list[dict[tuple, dict[int, int]]] = [
            {} for _ in range(order)
        ]
        self._totals: list[dict[tuple, int]] = [{} for _ in range(order)]
        self._history: list[int] = []

    def _context(self, length: int) -> tuple:
        if length == 0:
            return ()
        return tuple(self._history[-length:]) if len(self._history) >= length else None

    def next_pmf(self) -> QuantizedPmf:
        V = self.vocab_size
        d = self.delta
        for clen in range(self.order - 1, -1, -1):
            ctx = self._context(clen)
            if ctx is None:
                continue
            tot = self._totals[clen].get(ctx, 0)
            if tot > 0 or clen == 0:
                seen = self._counts[clen].get(ctx, {})
                denom = tot + d * V
                probs = [d / denom] * V
                for tok, c in seen.items():
                    probs[tok] = (c + d) / denom
                return quantize(probs, self.precision)
        raise AssertionError("unreachable: empty context is always usable")

    def update(self, token: int) -> None:
        if not (0 <= token < self.vocab_size):
            raise ValueError(f"token {token} outside vocabulary {self.vocab_size}")
        for clen in range(self.order):
            ctx = self._context(clen)
            if ctx is None:
                continue
            bucket = self._counts[clen].setdefault(ctx, {})
            bucket[token] = bucket.get(token, 0) + 1
            self._totals[clen][ctx] = self._totals[clen].get(ctx, 0) + 1
        self._history.append(token)
        if len(self._history) > self.order:
            del self._history[0]


# ---------------------------------------------------------------------------
# Trace files: externally computed per-position PMFs.
#
# Line format (tab-separated):
#   position TAB token_id TAB k TAB id:prob[ id:prob]*  TAB tail_mass [TAB chars=N]
# preceded by one header line of key=value pairs carrying at least
# vocab_size, tokenizer and model. The optional chars field carries the
# token's character count so a stream (and its clock) can be rebuilt without
# the external tokenizer.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceHeader:
    vocab_size: int
    tokenizer: str
    model: str


@dataclass(frozen=True)
class TraceRecord:
    position: int
    token: int
    entries: tuple[tuple[int, float], ...]
    tail_mass: float
    char_count: int | None = None


def write_trace(path: str | Path, header: TraceHeader, records) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(
            f"vocab_size={header.vocab_size}\ttokenizer={header.tokenizer}"
            f"\tmodel={header.model}\n"
        )
        for r in records:
            pairs = " ".join(f"{i}:{p:.12g}" for i, p in r.entries)
            line = f"{r.position}\t{r.token}\t{len(r.entries)}\t{pairs}\t{r.tail_mass:.12g}"
            if r.char_count is not None:
                line += f"\tchars={r.char_count}"
            fh.write(line + "\n")


def read_trace(path: str | Path) -> tuple[TraceHeader, list[TraceRecord]]:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceFormatError("empty trace file", 1)
    meta = {}
    for part in lines[0].split("\t"):
        if "=" not in part:
            raise TraceFormatError(f"bad header field {part!r}", 1)
        k, v = part.split("=", 1)
        meta[k] = v
    try:
        header = TraceHeader(
            int(meta["vocab_size"]), meta["tokenizer"], meta["model"]
        )
    except KeyError as e:
        raise TraceFormatError(f"header missing {e.args[0]}", 1) from None

    records = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) not in (5, 6):
            raise TraceFormatError(
                f"expected 5 or 6 tab-separated fields, got {len(fields)}", ln
            )
        pos, tok, k = int(fields[0]), int(fields[1]), int(fields[2])
        entries = []
        if fields[3]:
            for pair in fields[3].split(" "):
                ids, ps = pair.split(":")
                entries.append((int(ids), float(ps)))
        if len(entries) != k:
            raise TraceFormatError(
                f"record claims {k} entries but carries {len(entries)}", ln
            )
        tail = float(fields[4])
        chars = None
        if len(fields) == 6:
            if not fields[5].startswith("chars="):
                raise TraceFormatError(f"bad extra field {fields[5]!r}", ln)
            chars = int(fields[5][len("chars="):])
            if chars <= 0:
                raise TraceFormatError("chars must be positive", ln)
        if pos != len(records):
            raise TraceFormatError("positions must be consecutive from 0", ln)
        if not (0 <= tok < header.vocab_size):
            raise TraceFormatError(
                f"token {tok} outside vocab_size={header.vocab_size}", ln
            )
        if tok not in {i for i, _ in entries}:
            raise TraceFormatError(
                f"realized token {tok} missing from its own entry list", ln
            )
        for i, p in entries:
            if not (0 <= i < header.vocab_size):
                raise TraceFormatError(f"entry id {i} outside vocabulary", ln)
            if not (0.0 < p <= 1.0):
                raise TraceFormatError(f"entry probability {p} out of range", ln)
        if tail < 0:
            raise TraceFormatError(f"negative tail mass {tail}", ln)
        records.append(TraceRecord(pos, tok, tuple(entries), tail, chars))
    return header, records


class TraceReplayPredictor:
    """Replays per-position PMFs from a trace, tail spread over unlisted ids."""

    def __init__(
        self,
        records: list[TraceRecord],
        vocab_size: int,
        precision: int = DEFAULT_PRECISION,
    ):
        self.records = records
        self.vocab_size = vocab_size
        self.precision = precision
        self._pos = 0

    def next_pmf(self) -> QuantizedPmf:
        if self._pos >= len(self.records):
            raise IndexError(
                f"trace exhausted: {len(self.records)} positions, "
                f"position {self._pos} requested"
            )
        r = self.records[self._pos]
        V = self.vocab_size
        listed = dict(r.entries)
        unlisted = V - len(listed)
        tail_each = r.tail_mass / unlisted if unlisted else 0.0
        probs = [tail_each] * V
        for i, p in listed.items():
            probs[i] = p
        return quantize(probs, self.precision)

    def update(self, token: int) -> None:
        r = self.records[self._pos]
        if token != r.token:
            raise ValueError(
                f"stream token {token} at position {self._pos} does not match "
                f"trace token {r.token}"
            )
        self._pos += 1


def stream_from_trace(
    header: TraceHeader,
    records: list[TraceRecord],
    char_rate: Fraction,
    text: str | None = None,
) -> TokenStream:
    """Build a TokenStream from a 6-field trace (records carry char counts).

    If `text` is given, surfaces are consecutive slices of it with the traced
    lengths, so detokenize() reproduces the text exactly.
    """
    if any(r.char_count is None for r in records):
        raise TraceFormatError(
            "trace records carry no chars field; tokenize the source text "
            "locally and use the trace as a predictor instead",
            2,
        )
    surfaces = None
    if text is not None:
        total = sum(r.char_count for r in records)
        if total != len(text):
            raise ValueError(
                f"trace char counts sum to {total} but text has {len(text)} chars"
            )
        out, at = [], 0
        for r in records:
            out.append(text[at : at + r.char_count])
            at += r.char_count
        surfaces = tuple(out)
    events = []
    cum = 0
    for i, r in enumerate(records):
        cum += r.char_count
        events.append(TokenEvent(i, r.token, r.char_count, Fraction(cum) / char_rate))
    return TokenStream(
        tuple(events),
        char_rate,
        header.vocab_size,
        f"trace:{header.tokenizer}",
        event_surfaces=surfaces,
    )


def make_predictor(
    kind: str,
    vocab_size: int,
    precision: int = DEFAULT_PRECISION,
    order: int = 2,
    delta: float = 1.0,
    trace_records: list[TraceRecord] | None = None,
):
    """Factory used by the sweep and the CLI; `kind` names the model family."""
    if kind == "uniform":
        return UniformPredictor(vocab_size, precision)
    if kind == "unigram":
        return NgramPredictor(vocab_size, 1, delta, precision)
    if kind == "ngram":
        return NgramPredictor(vocab_size, order, delta, precision)
    if kind == "trace":
        if trace_records is None:
            raise ValueError("trace predictor needs trace records")
        return TraceReplayPredictor(trace_records, vocab_size, precision)
    raise ValueError(f"unknown predictor {kind!r}")


def cross_entropy(
    stream: TokenStream, predictor
) -> tuple[Fraction, Fraction]:
    """Mean realized code cost under the quantized model.

    Returns (bits per token, bits per character), both exact rationals. A
    realized token with zero quantized frequency is a hard diagnostic: its
    cost would be infinite.
    """
    total = Fraction(0)
    for ev in stream.events:
        pmf = predictor.next_pmf()
        f = pmf.freqs[ev.token]
        if f == 0:
            raise ZeroFrequencyError(ev.token, ev.index)
        total += neg_log2_ratio(f, pmf.precision)
        predictor.update(ev.token)
    n = len(stream.events)
    if n == 0:
        raise ValueError("empty stream")
    return total / n, total / stream.total_chars

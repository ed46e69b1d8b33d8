"""Text ingestion: tokenization and the deterministic arrival clock.

A corpus run is a sequence of token events. Each event carries the character
count of its surface text, and the synthetic clock places event i at

    arrival_time(i) = (sum of char counts up to and including i) / char_rate

so a fixed characters-per-second rate drives the whole simulation. All times
are exact Fractions; there is no accumulation drift.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import TokenizationError

DEFAULT_CHAR_RATE = Fraction(20)  # characters per second
CHAR_VOCAB_SIZE = 256

_WORD_RE = re.compile(r"\s*\S+")


@dataclass(frozen=True)
class TokenEvent:
    index: int
    token: int
    char_count: int
    arrival_time: Fraction


@dataclass(frozen=True)
class TokenStream:
    """Token events plus whatever is needed to reverse the segmentation.

    For the built-in word tokenizer, `vocab` maps ids back to surfaces. Streams
    built from trace files carry per-event surfaces instead (their id space
    belongs to an external tokenizer). Char streams need neither: the id is the
    codepoint.
    """

    events: tuple[TokenEvent, ...]
    char_rate: Fraction
    vocab_size: int
    tokenizer: str
    char_convention: str = "unicode"
    vocab: tuple[str, ...] | None = None
    event_surfaces: tuple[str, ...] | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.events)

    def tokens(self) -> list[int]:
        return [e.token for e in self.events]

    @property
    def total_chars(self) -> int:
        return sum(e.char_count for e in self.events)

    @property
    def mean_chars_per_token(self) -> Fraction:
        if not self.events:
            raise ValueError("empty stream has no mean token length")
        return Fraction(self.total_chars, len(self.events))

    @property
    def duration(self) -> Fraction:
        return self.events[-1].arrival_time if self.events else Fraction(0)

    def has_surfaces(self) -> bool:
        return (
            self.tokenizer == "char"
            or self.vocab is not None
            or self.event_surfaces is not None
        )

    def surface(self, i: int) -> str:
        if self.event_surfaces is not None:
            return self.event_surfaces[i]
        if self.vocab is not None:
            return self.vocab[self.events[i].token]
        if self.tokenizer == "char":
            return chr(self.events[i].token)
        raise ValueError("stream carries no surface text")

    def surface_bytes(self, i: int) -> bytes:
        enc = "latin-1" if self.char_convention == "bytes" else "utf-8"
        return self.surface(i).encode(enc)

    def detokenize(self) -> str:
        return "".join(self.surface(i) for i in range(len(self.events)))

    def detokenize_bytes(self) -> bytes:
        text = self.detokenize()
        if self.char_convention == "bytes":
            return text.encode("latin-1")
        return text.encode("utf-8")


def _decode(data: str | bytes) -> tuple[str, str]:
    """Return (text, char_convention). Invalid UTF-8 falls back to bytes,
    carried as latin-1 so every byte maps to one character."""
    if isinstance(data, str):
        return data, "unicode"
    try:
        return data.decode("utf-8"), "unicode"
    except UnicodeDecodeError:
        return data.decode("latin-1"), "bytes"


def _events_from_counts(
    tokens: list[int], counts: list[int], char_rate: Fraction
) -> tuple[TokenEvent, ...]:
    events = []
    cum = 0
    for i, (tok, c) in enumerate(zip(tokens, counts)):
        cum += c
        events.append(TokenEvent(i, tok, c, Fraction(cum, 1) / char_rate))
    return tuple(events)


def tokenize(
    data: str | bytes,
    tokenizer: str = "char",
    char_rate: Fraction = DEFAULT_CHAR_RATE,
    vocab_size: int = CHAR_VOCAB_SIZE,
) -> TokenStream:
    if char_rate <= 0:
        raise ValueError(f"char_rate must be positive, got {char_rate}")
    text, convention = _decode(data)

    if tokenizer == "char":
        tokens = []
        for pos, ch in enumerate(text):
            cp = ord(ch)
            if cp >= vocab_size:
                raise TokenizationError(
                    f"character {ch!r} (codepoint {cp}) does not fit the "
                    f"char tokenizer's vocabulary of {vocab_size}",
                    pos,
                )
            tokens.append(cp)
        counts = [1] * len(tokens)
        events = _events_from_counts(tokens, counts, char_rate)
        return TokenStream(
            events, char_rate, vocab_size, "char", char_convention=convention
        )

    if tokenizer == "word":
        pieces = _WORD_RE.findall(text)
        consumed = sum(len(p) for p in pieces)
        if consumed < len(text):  # trailing whitespace keeps its own event
            pieces.append(text[consumed:])
        ids: dict[str, int] = {}
        tokens = []
        for p in pieces:
            if p not in ids:
                ids[p] = len(ids)
            tokens.append(ids[p])
        counts = [len(p) for p in pieces]
        events = _events_from_counts(tokens, counts, char_rate)
        return TokenStream(
            events,
            char_rate,
            max(len(ids), 1),
            "word",
            char_convention=convention,
            vocab=tuple(ids),
        )

    raise ValueError(f"unknown tokenizer {tokenizer!r} (expected 'char' or 'word')")


def token_rate(stream: TokenStream) -> Fraction:
    """Long-run tokens per second: char_rate / mean chars per token."""
    return stream.char_rate / stream.mean_chars_per_token

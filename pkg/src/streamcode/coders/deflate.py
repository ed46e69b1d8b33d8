"""DEFLATE baseline: one sync flush per token, raw stream semantics.

This coder bypasses the predictor entirely; it compresses the token's surface
bytes with zlib and charges whatever the compressor emits between flushes.
Every flush appends an empty stored block (5 bytes), which is the >= 40 bits
per token framing floor the other coders are compared against. Only DEFLATE
payload bytes are counted; there is no zlib/gzip wrapper.
"""

from __future__ import annotations

import zlib

from .scalar import CodedUnit

DEFAULT_LEVEL = 6  # zlib's own default; recorded in run metadata
_RAW_WBITS = -15


class SyncFlushCoder:
    def __init__(self, level: int = DEFAULT_LEVEL):
        self.level = level
        self._comp = zlib.compressobj(level, zlib.DEFLATED, _RAW_WBITS)
        self.chunks: list[bytes] = []

    def encode_token(self, surface: bytes) -> bytes:
        """Compress one token's bytes and flush; returns the emitted chunk."""
        out = self._comp.compress(surface) + self._comp.flush(zlib.Z_SYNC_FLUSH)
        self.chunks.append(out)
        return out

    def payload(self) -> bytes:
        return b"".join(self.chunks)


def encode_stream(stream, level: int = DEFAULT_LEVEL) -> list[CodedUnit]:
    """Per-token coded units for a surface-bearing token stream."""
    if not stream.has_surfaces():
        raise ValueError("deflate needs token surface text")
    coder = SyncFlushCoder(level)
    units = []
    for i, ev in enumerate(stream.events):
        chunk = coder.encode_token(stream.surface_bytes(i))
        units.append(CodedUnit(i, 8 * len(chunk), ev.arrival_time))
    return units


def verify_prefix_decodable(chunks: list[bytes], surfaces: list[bytes]) -> None:
    """Feed chunks one at a time; after each, the decompressed prefix must
    equal the corresponding surface prefix (this is what sync flush buys)."""
    decomp = zlib.decompressobj(_RAW_WBITS)
    got = b""
    want = b""
    for chunk, surface in zip(chunks, surfaces):
        got += decomp.decompress(chunk)
        want += surface
        if got != want:
            raise AssertionError(
                f"prefix mismatch after {len(want)} bytes of surface text"
            )


def framing_floor_bits() -> int:
    """Bits a sync flush emits with nothing pending (empty stored block)."""
    comp = zlib.compressobj(DEFAULT_LEVEL, zlib.DEFLATED, _RAW_WBITS)
    return 8 * len(comp.flush(zlib.Z_SYNC_FLUSH))

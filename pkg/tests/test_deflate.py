"""Sync-flush DEFLATE baseline: framing floor, prefix decodability."""

import zlib
from fractions import Fraction

import pytest

from streamcode.corpus import tokenize
from streamcode.coders.deflate import (
    SyncFlushCoder,
    encode_stream,
    framing_floor_bits,
    verify_prefix_decodable,
)
from streamcode.synthetic import synthetic_header, synthetic_records
from streamcode.predictor import stream_from_trace


def test_framing_floor_is_forty_bits():
    assert framing_floor_bits() == 40
    # independent check of what an empty sync flush looks like on the wire:
    # an empty stored block, byte aligned: LEN=0x0000, NLEN=0xffff
    comp = zlib.compressobj(6, zlib.DEFLATED, -15)
    assert comp.flush(zlib.Z_SYNC_FLUSH) == b"\x00\x00\x00\xff\xff"


def test_every_token_pays_at_least_the_floor(moby_path):
    text = moby_path.read_text()
    for tok in ("char", "word"):
        stream = tokenize(text, tok, Fraction(20))
        units = encode_stream(stream)
        assert len(units) == len(stream.events)
        for u in units:
            assert u.bit_count >= 40
            assert u.bit_count % 8 == 0


def test_prefix_decodable_on_fixture_text(pride_path):
    text = pride_path.read_text()
    stream = tokenize(text, "char", Fraction(20))
    coder = SyncFlushCoder()
    surfaces = [stream.surface_bytes(i) for i in range(len(stream.events))]
    for surf in surfaces:
        coder.encode_token(surf)
    verify_prefix_decodable(coder.chunks, surfaces)

    decomp = zlib.decompressobj(-15)
    assert decomp.decompress(coder.payload()) == text.encode("utf-8")


def test_prefix_mismatch_is_detected():
    coder = SyncFlushCoder()
    chunks = [coder.encode_token(s) for s in (b"abc", b"def")]
    with pytest.raises(AssertionError, match="prefix mismatch"):
        verify_prefix_decodable(chunks, [b"abc", b"xyz"])


def test_latin1_convention_roundtrips():
    # invalid UTF-8 input falls back to byte semantics; the coder must
    # reproduce the original bytes, not a UTF-8 re-encoding
    raw = b"\xff\xfe caf\xe9 \x80\x81"
    stream = tokenize(raw, "char", Fraction(20))
    assert stream.char_convention == "bytes"
    coder = SyncFlushCoder()
    for i in range(len(stream.events)):
        coder.encode_token(stream.surface_bytes(i))
    decomp = zlib.decompressobj(-15)
    assert decomp.decompress(coder.payload()) == raw


def test_payload_is_deterministic(moby_path):
    text = moby_path.read_text()[:500]
    stream = tokenize(text, "char", Fraction(20))
    payloads = []
    for _ in range(2):
        units = encode_stream(stream, level=6)
        payloads.append(tuple(u.bit_count for u in units))
    assert payloads[0] == payloads[1]


def test_rejects_streams_without_surfaces():
    records = synthetic_records(16)
    stream = stream_from_trace(synthetic_header(), records, Fraction(20))
    assert not stream.has_surfaces()
    with pytest.raises(ValueError, match="surface"):
        encode_stream(stream)

"""PMF quantization, the model families, and trace files."""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from streamcode.corpus import tokenize
from streamcode.errors import TraceFormatError, ZeroFrequencyError
from streamcode.predictor import (
    NgramPredictor,
    QuantizedPmf,
    TraceHeader,
    TraceRecord,
    TraceReplayPredictor,
    UniformPredictor,
    cross_entropy,
    dequantize,
    make_predictor,
    quantize,
    read_trace,
    stream_from_trace,
    write_trace,
)

# -- quantization -----------------------------------------------------------


def test_quantize_frozen_cases():
    assert quantize([0.5, 0.5], 4).freqs == (8, 8)
    assert quantize([0.7, 0.2, 0.1], 4).freqs == (11, 3, 2)
    assert quantize([1 / 256] * 256, 14).freqs == (64,) * 256
    assert quantize([0.45, 0.30, 0.25], 14).freqs == (7373, 4915, 4096)


def test_quantize_is_l1_optimal_small():
    """Exhaustive check: no other valid frequency vector is closer in L1."""
    total = 16
    cases = [
        (0.7, 0.2, 0.1),
        (0.34, 0.33, 0.33),
        (0.5, 0.3, 0.2),
        (0.62, 0.21, 0.17),
    ]
    for probs in cases:
        got = quantize(probs, 4).freqs
        ideal = [p * total for p in probs]
        err = sum(abs(f - x) for f, x in zip(got, ideal))
        best = min(
            sum(abs(f - x) for f, x in zip(fs, ideal))
            for fs in (
                (a, b, total - a - b)
                for a in range(1, total)
                for b in range(1, total - a)
            )
        )
        assert err == pytest.approx(best, abs=1e-12), probs


def test_quantize_preserves_dyadic():
    probs = [0.5, 0.25, 0.125, 0.0625, 0.0625]
    assert quantize(probs, 8).freqs == (128, 64, 32, 16, 16)


def test_quantize_zero_stays_zero_and_positive_stays_positive():
    pmf = quantize([0.5, 0.0, 0.5], 6)
    assert pmf.freqs[1] == 0
    tiny = quantize([0.999, 0.001], 4)  # 0.001*16 floors to 0: lift to 1
    assert tiny.freqs == (15, 1)


def test_quantize_input_validation():
    with pytest.raises(ValueError):
        quantize([0.6, 0.6], 8)  # sum != 1
    with pytest.raises(ValueError):
        quantize([1.2, -0.2], 8)
    with pytest.raises(ValueError):
        quantize([0.0, 0.0], 8)
    with pytest.raises(ValueError):
        quantize([1 / 64] * 64, 4)  # 64 positives cannot fit in 2^4 counts


def test_quantized_pmf_validation():
    with pytest.raises(ValueError):
        QuantizedPmf((8, 7), 4)
    with pytest.raises(ValueError):
        QuantizedPmf((-1, 17), 4)
    with pytest.raises(ValueError):
        QuantizedPmf((1,), 0)
    with pytest.raises(ValueError):
        QuantizedPmf((1 << 25,), 25)


def test_pmf_cum_and_eq():
    pmf = QuantizedPmf((3, 0, 13), 4)
    assert pmf.cum() == [0, 3, 3, 16]
    assert pmf == QuantizedPmf((3, 0, 13), 4)
    assert pmf != QuantizedPmf((3, 13, 0), 4)
    assert hash(pmf) == hash(QuantizedPmf((3, 0, 13), 4))


@given(
    st.lists(st.floats(0.001, 1.0), min_size=2, max_size=12),
    st.integers(6, 16),
)
def test_quantize_properties(weights, precision):
    s = sum(weights)
    probs = [w / s for w in weights]
    pmf = quantize(probs, precision)
    assert sum(pmf.freqs) == 1 << precision
    assert all(f >= 1 for f in pmf.freqs)  # every prob here is positive
    back = dequantize(pmf)
    assert quantize(back, precision).freqs == pmf.freqs  # idempotent fixpoint


# -- predictors -------------------------------------------------------------


def test_uniform_predictor():
    p = UniformPredictor(256, 14)
    assert p.next_pmf().freqs == (64,) * 256
    p.update(5)  # no-op
    assert p.next_pmf().freqs == (64,) * 256


def test_unigram_counts():
    p = NgramPredictor(2, 1, 1.0, 8)
    for _ in range(3):
        p.next_pmf()
        p.update(0)
    # counts (3, 0) with delta=1 -> probabilities (4/5, 1/5)
    assert p.next_pmf().freqs == (205, 51)


def test_ngram_backoff_then_context():
    p = NgramPredictor(2, 2, 1.0, 4)
    for t in (0, 1):
        p.next_pmf()
        p.update(t)
    # context (1,) unseen: falls back to the unigram counts (1, 1)
    assert p.next_pmf().freqs == quantize([0.5, 0.5], 4).freqs
    p.update(0)
    # context (0,) now has one observation of token 1
    assert p.next_pmf().freqs == quantize([1 / 3, 2 / 3], 4).freqs


def test_ngram_validation():
    with pytest.raises(ValueError):
        NgramPredictor(2, 0)
    with pytest.raises(ValueError):
        NgramPredictor(2, 1, 0.0)
    p = NgramPredictor(4, 1)
    with pytest.raises(ValueError):
        p.update(4)


def test_make_predictor():
    assert isinstance(make_predictor("uniform", 8), UniformPredictor)
    assert make_predictor("unigram", 8).order == 1
    assert make_predictor("ngram", 8, order=3).order == 3
    with pytest.raises(ValueError):
        make_predictor("trace", 8)
    with pytest.raises(ValueError):
        make_predictor("oracle", 8)


def test_encoder_decoder_lockstep_same_pmfs():
    """Two instances fed the same tokens produce identical PMF sequences."""
    a = NgramPredictor(16, 2, 0.5, 10)
    b = NgramPredictor(16, 2, 0.5, 10)
    toks = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3]
    for t in toks:
        assert a.next_pmf() == b.next_pmf()
        a.update(t)
        b.update(t)


# -- traces -----------------------------------------------------------------


def _tiny_records():
    return [
        TraceRecord(0, 3, ((3, 0.5), (2, 0.25)), 0.25, 4),
        TraceRecord(1, 0, ((0, 0.125), (1, 0.5)), 0.375, 2),
    ]


def test_trace_replay_tail_spread():
    pred = TraceReplayPredictor(_tiny_records(), 4, 8)
    # 0.25 tail over ids {0, 1}: 0.125 each -> (32, 32, 64, 128) at F=8
    assert pred.next_pmf().freqs == (32, 32, 64, 128)
    pred.update(3)
    assert pred.next_pmf().freqs == (32, 128, 48, 48)
    pred.update(0)
    with pytest.raises(IndexError):
        pred.next_pmf()


def test_trace_replay_rejects_wrong_token():
    pred = TraceReplayPredictor(_tiny_records(), 4, 8)
    pred.next_pmf()
    with pytest.raises(ValueError):
        pred.update(2)


def test_trace_roundtrip(tmp_path):
    path = tmp_path / "t.trace"
    header = TraceHeader(4, "external", "tiny")
    write_trace(path, header, _tiny_records())
    got_header, got_records = read_trace(path)
    assert got_header == header
    assert got_records == _tiny_records()


def test_trace_format_errors(tmp_path):
    path = tmp_path / "bad.trace"

    def check(content, fragment):
        path.write_text(content)
        with pytest.raises(TraceFormatError) as exc:
            read_trace(path)
        assert fragment in str(exc.value)

    head = "vocab_size=4\ttokenizer=t\tmodel=m\n"
    check("", "empty")
    check("vocab_size=4\tbroken\n", "bad header field")
    check("tokenizer=t\tmodel=m\n0\t0\t1\t0:1.0\t0\n", "missing vocab_size")
    check(head + "0\t0\t1\t0:1.0\n", "5 or 6 tab-separated fields")
    check(head + "1\t0\t1\t0:1.0\t0\n", "consecutive")
    check(head + "0\t2\t1\t0:1.0\t0\n", "missing from its own entry list")
    check(head + "0\t0\t2\t0:1.0\t0\n", "claims 2 entries")
    check(head + "0\t0\t1\t0:1.5\t0\n", "out of range")
    check(head + "0\t9\t1\t9:0.5\t0.5\n", "outside vocab_size")
    check(head + "0\t0\t1\t0:0.5\t-0.5\n", "negative tail")
    check(head + "0\t0\t1\t0:0.5\t0.5\tchars=0\n", "chars must be positive")
    check(head + "0\t0\t1\t0:0.5\t0.5\twidth=3\n", "bad extra field")


def test_stream_from_trace_surfaces():
    header = TraceHeader(4, "external", "tiny")
    stream = stream_from_trace(header, _tiny_records(), Fraction(2), "abcdef")
    assert [stream.surface(i) for i in range(2)] == ["abcd", "ef"]
    assert stream.detokenize() == "abcdef"
    assert [e.arrival_time for e in stream.events] == [Fraction(2), Fraction(3)]
    with pytest.raises(ValueError):
        stream_from_trace(header, _tiny_records(), Fraction(2), "abc")
    bare = [TraceRecord(0, 0, ((0, 1.0),), 0.0)]
    with pytest.raises(TraceFormatError):
        stream_from_trace(header, bare, Fraction(2))


# -- cross entropy ----------------------------------------------------------


def test_cross_entropy_uniform_is_log_vocab():
    stream = tokenize("any text at all")
    bpt, bpc = cross_entropy(stream, UniformPredictor(256, 14))
    assert bpt == Fraction(8)
    assert bpc == Fraction(8)  # char tokens: one char each


def test_cross_entropy_zero_frequency_is_fatal():
    class Stub:
        def next_pmf(self):
            return QuantizedPmf((16, 0), 4)

        def update(self, token):
            pass

    stream = tokenize("\x01")  # token id 1 has zero frequency above
    with pytest.raises(ZeroFrequencyError):
        cross_entropy(stream, Stub())


def test_cross_entropy_counts_chars():
    header = TraceHeader(4, "external", "tiny")
    stream = stream_from_trace(header, _tiny_records(), Fraction(20))
    pred = TraceReplayPredictor(_tiny_records(), 4, 8)
    bpt, bpc = cross_entropy(stream, pred)
    assert bpt == (Fraction(1) + Fraction(3)) / 2  # -log2 0.5, -log2 0.125
    assert bpc == Fraction(4, 6)

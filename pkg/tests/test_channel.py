"""FIFO bit channel: exit clock, waiting recursion, decode-time semantics."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from streamcode.channel import (
    ChannelTrace,
    ac_delays,
    lindley_delays,
    max_delay,
    mean_delay,
    rans_delays,
    serve_bits,
    serve_units,
)
from streamcode.coders.rans import RansBlock

F = Fraction


def test_single_unit_exit():
    trace = serve_units([(F(1, 5), 4)], F(10))
    assert trace.exit_times == (F(1, 5) + F(4, 10),)
    assert trace.rate == F(10)


def test_idle_then_busy():
    # unit 2 arrives while unit 1 is still draining, so it queues
    trace = serve_units([(F(1, 5), 4), (F(2, 5), 6)], F(10))
    assert trace.exit_times == (F(3, 5), F(6, 5))


def test_idle_gap_resets_clock():
    trace = serve_units([(F(0), 10), (F(5), 10)], F(10))
    assert trace.exit_times == (F(1), F(6))


def test_zero_bit_unit_is_instant():
    trace = serve_units([(F(1), 0), (F(1), 8)], F(4))
    assert trace.exit_times == (F(1), F(3))


def test_serve_units_validation():
    with pytest.raises(ValueError, match="nondecreasing"):
        serve_units([(F(2), 1), (F(1), 1)], F(10))
    with pytest.raises(ValueError, match="negative"):
        serve_units([(F(0), -3)], F(10))
    with pytest.raises(ValueError, match="rate"):
        serve_units([(F(0), 1)], F(0))
    with pytest.raises(ValueError, match="rate"):
        serve_bits([F(0)], F(-1))


def test_lindley_hand_case():
    # bits (4, 6), arrivals (0.2, 0.4), C = 10  =>  delays (0.4, 0.8)
    recs = lindley_delays([F(1, 5), F(2, 5)], [4, 6], F(10))
    assert [r.delay for r in recs] == [F(2, 5), F(4, 5)]
    assert [r.decode_time for r in recs] == [F(3, 5), F(6, 5)]
    assert all(r.decode_time == r.arrival + r.delay for r in recs)


def test_lindley_matches_exit_clock_randomized():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(1, 40)
        arrivals = []
        t = F(0)
        for _ in range(n):
            t += F(rng.randint(0, 30), 10)
            arrivals.append(t)
        bits = [rng.randint(0, 200) for _ in range(n)]
        rate = F(rng.randint(1, 400), rng.randint(1, 7))
        recs = lindley_delays(arrivals, bits, rate)
        trace = serve_units(zip(arrivals, bits), rate)
        assert tuple(r.decode_time for r in recs) == trace.exit_times


def test_ac_decode_is_exit_or_arrival():
    # three bits emitted at t=0, served at 1 bit/s: exits (1, 2, 3)
    trace = serve_bits([F(0), F(0), F(0)], F(1))
    recs = ac_delays([F(0), F(10)], trace, [2, 3])
    assert recs[0].decode_time == F(2)  # waits for bit 2
    assert recs[1].decode_time == F(10)  # bit 3 long gone; arrival dominates
    assert recs[1].delay == F(0)


def test_ac_beta_capped_at_payload_length():
    trace = serve_bits([F(0)], F(1))
    recs = ac_delays([F(0)], trace, [5])  # decoder read zero-padding
    assert recs[0].decode_time == F(1)


def test_ac_beta_must_be_positive():
    trace = serve_bits([F(0)], F(1))
    with pytest.raises(ValueError, match="at least one bit"):
        ac_delays([F(0)], trace, [0])


def test_rans_block_semantics():
    blocks = [
        RansBlock(0, (0, 1), (0x1234,), 0x10000, F(1)),
        RansBlock(2, (0,), (), 0x10000, F(2)),
    ]
    arrivals = [F(1, 2), F(1), F(2)]
    recs = rans_delays(blocks, arrivals, F(48))
    # block 1: 48 bits enqueued at t=1, exits at 2; both tokens decode then
    assert recs[0].decode_time == recs[1].decode_time == F(2)
    assert recs[0].delay == F(3, 2)
    assert recs[1].delay == F(1)
    # block 2: 32 bits at t=2, exits 2/3 s later
    assert recs[2].decode_time == F(2) + F(32, 48)
    # K=1 blocks reduce to the scalar waiting recursion with 32-bit units
    one = [RansBlock(i, (0,), (), 0x10000, a) for i, a in enumerate(arrivals)]
    recs_blk = rans_delays(one, arrivals, F(48))
    recs_lin = lindley_delays(arrivals, [32] * 3, F(48))
    assert [r.decode_time for r in recs_blk] == [r.decode_time for r in recs_lin]


def test_mean_and_max_delay():
    recs = lindley_delays([F(0), F(1, 2)], [10, 10], F(10))
    assert [r.delay for r in recs] == [F(1), F(3, 2)]
    assert mean_delay(recs) == F(5, 4)
    assert max_delay(recs) == F(3, 2)
    with pytest.raises(ValueError, match="no delay records"):
        mean_delay([])


@settings(max_examples=60)
@given(
    st.lists(
        st.tuples(st.integers(0, 50), st.integers(0, 64)), min_size=1, max_size=30
    ),
    st.fractions(min_value=F(1, 4), max_value=F(100)),
)
def test_exit_times_monotone_and_rate_scaled(steps, rate):
    t = F(0)
    units = []
    for gap, bits in steps:
        t += F(gap, 7)
        units.append((t, bits))
    trace = serve_units(units, rate)
    assert all(b <= a for a, b in zip(trace.exit_times[1:], trace.exit_times))
    # serving the same units twice as fast halves every queueing term
    fast = serve_units(units, rate * 2)
    for (a, _), e1, e2 in zip(units, trace.exit_times, fast.exit_times):
        assert e2 - a <= e1 - a

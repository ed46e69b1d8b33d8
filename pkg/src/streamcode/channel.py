"""Constant-rate FIFO bit channel and per-token decodability delays.

Bits leave the channel in arrival order at a fixed rate C. For unit j holding
b_j bits enqueued at a_j, the last bit exits at

    e_j = max(e_{j-1}, a_j) + b_j / C        (e_0 = 0)

which is the per-bit recursion collapsed over a unit whose bits share one
enqueue instant. For per-token scalar coders this is equivalent to the waiting
recursion D(n) = max(0, t_exit(n-1) - t_arr(n)) + b_n / C; both forms are
implemented and tested against each other. All arithmetic is exact rationals,
so the queue is deterministic and overload merely grows the backlog (it is
flagged, never truncated).

Decode-time semantics by coder family:
  scalar  token n decodes when its own last bit exits.
  ac      token n decodes when the specific bit the decoder needed exits (or
          at arrival, if that bit already left earlier).
  rans    every token in a block decodes when the block's last bit exits; the
          block is enqueued only once its final token has arrived.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class DelayRecord:
    index: int
    arrival: Fraction
    decode_time: Fraction
    delay: Fraction


@dataclass(frozen=True)
class ChannelTrace:
    rate: Fraction
    exit_times: tuple[Fraction, ...]


def _check_rate(rate: Fraction) -> Fraction:
    rate = Fraction(rate)
    if rate <= 0:
        raise ValueError(f"channel rate must be positive, got {rate}")
    return rate


def serve_units(units, rate) -> ChannelTrace:
    """Exit time of the last bit of each (enqueue_time, bit_count) unit."""
    rate = _check_rate(rate)
    clock = Fraction(0)
    prev_arrival = None
    exits = []
    for arrival, bits in units:
        if prev_arrival is not None and arrival < prev_arrival:
            raise ValueError("units must be enqueued in nondecreasing time order")
        prev_arrival = arrival
        if bits < 0:
            raise ValueError("negative bit count")
        start = clock if clock > arrival else arrival
        clock = start + Fraction(bits) / rate
        exits.append(clock)
    return ChannelTrace(rate, tuple(exits))


def serve_bits(emit_times, rate) -> ChannelTrace:
    """Per-bit exit times for individually timestamped bits (AC payloads)."""
    return serve_units(((t, 1) for t in emit_times), rate)


def lindley_delays(arrivals, bit_counts, rate) -> list[DelayRecord]:
    """Per-token delays via the waiting recursion; decode = arrival + delay."""
    rate = _check_rate(rate)
    records = []
    prev_exit = Fraction(0)
    for i, (a, b) in enumerate(zip(arrivals, bit_counts)):
        wait = prev_exit - a
        if wait < 0:
            wait = Fraction(0)
        d = wait + Fraction(b) / rate
        prev_exit = a + d
        records.append(DelayRecord(i, a, prev_exit, d))
    return records


def ac_delays(arrivals, bit_trace: ChannelTrace, bits_needed) -> list[DelayRecord]:
    """Token n decodes at max(exit of its needed bit, its own arrival)."""
    exits = bit_trace.exit_times
    records = []
    for i, (a, beta) in enumerate(zip(arrivals, bits_needed)):
        if beta < 1:
            raise ValueError(f"token {i} needs at least one bit, got {beta}")
        idx = min(beta, len(exits)) - 1
        t = exits[idx]
        decode = t if t > a else a
        records.append(DelayRecord(i, a, decode, decode - a))
    return records


def rans_delays(blocks, arrivals, rate) -> list[DelayRecord]:
    """Whole-block service; every covered token decodes at the block exit."""
    trace = serve_units(((b.enqueue_time, b.bit_count) for b in blocks), rate)
    records = []
    for block, exit_time in zip(blocks, trace.exit_times):
        for j in range(len(block.tokens)):
            i = block.first_index + j
            a = arrivals[i]
            records.append(DelayRecord(i, a, exit_time, exit_time - a))
    return records


def mean_delay(records) -> Fraction:
    if not records:
        raise ValueError("no delay records")
    return sum((r.delay for r in records), Fraction(0)) / len(records)


def max_delay(records) -> Fraction:
    return max(r.delay for r in records)

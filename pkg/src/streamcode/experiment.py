"""Sweep protocol: rate grid, per-coder runs, summary CSVs.

One sweep covers every (text, coder, alpha) cell. The Shannon bits-per-char
average of each text is computed first from the quantized PMFs; the channel
rate of every cell is C = alpha * char_rate * that average, so all coders are
compared against one matched-rate axis. Cells are independent and can run in
parallel; assembly is by key order, so output is identical at any job count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from . import channel
from .coders import DEFAULT_CODERS, CoderSpec, parse_coder
from .coders import arithmetic, deflate, rans, scalar
from .corpus import DEFAULT_CHAR_RATE, TokenStream, tokenize
from .predictor import (
    DEFAULT_PRECISION,
    cross_entropy,
    make_predictor,
    read_trace,
    stream_from_trace,
)
from .util import format_quantity, format_seconds, neg_log2_ratio

DEFAULT_ALPHAS = tuple(
    Fraction(a)
    for a in ("0.8", "0.9", "0.95", "0.98", "1", "1.02", "1.05", "1.1", "1.2",
              "1.5", "2")
)


@dataclass(frozen=True)
class SweepConfig:
    inputs: tuple[str, ...]
    tokenizer: str = "char"
    char_rate: Fraction = DEFAULT_CHAR_RATE
    predictor: str = "ngram"
    order: int = 2
    delta: float = 1.0
    trace: str | None = None
    coders: tuple[str, ...] = DEFAULT_CODERS
    alphas: tuple[Fraction, ...] = DEFAULT_ALPHAS
    token_budget: int = 10000
    precision: int = DEFAULT_PRECISION
    code_bits: int = 64
    deflate_level: int = deflate.DEFAULT_LEVEL
    jobs: int = 1
    seed: int = 0


@dataclass(frozen=True)
class BitsRow:
    text: str
    coder: str
    bits_per_token: Fraction
    bpc: Fraction
    overhead_pct: Fraction


@dataclass(frozen=True)
class DelayRow:
    text: str
    coder: str
    alpha: Fraction
    rate_bps: Fraction
    mean_delay: Fraction
    p95_delay: Fraction
    stable: bool


@dataclass
class SweepResult:
    bits_rows: list[BitsRow]
    delay_rows: list[DelayRow]
    metadata: dict[str, str] = field(default_factory=dict)


def percentile_delay(records, p) -> Fraction:
    """Nearest-rank percentile: the ceil(p/100 * N)-th order statistic."""
    if not records:
        raise ValueError("no delay records")
    if not (0 < p <= 100):
        raise ValueError(f"percentile must be in (0, 100], got {p}")
    values = sorted(r.delay for r in records)
    rank = math.ceil(p * len(values) / 100)
    return values[rank - 1]


def pareto_frontier(points):
    """Points (label, bpc, mean_delay) not dominated in both coordinates.

    b dominates a when b is <= in both coordinates and < in at least one;
    exact ties survive together.
    """
    out = []
    for a in points:
        dominated = any(
            b[1] <= a[1] and b[2] <= a[2] and (b[1] < a[1] or b[2] < a[2])
            for b in points
        )
        if not dominated:
            out.append(a)
    return out


# ---------------------------------------------------------------------------
# Loading inputs
# ---------------------------------------------------------------------------


@dataclass
class PreparedText:
    name: str
    stream: TokenStream
    predictor_kind: str
    trace_records: list | None
    shannon_bits_total: Fraction

    @property
    def shannon_bpc(self) -> Fraction:
        return self.shannon_bits_total / self.stream.total_chars

    @property
    def shannon_bpt(self) -> Fraction:
        return self.shannon_bits_total / len(self.stream)


def _truncate(stream: TokenStream, budget: int) -> TokenStream:
    if len(stream) <= budget:
        return stream
    surfaces = stream.event_surfaces
    return replace(
        stream,
        events=stream.events[:budget],
        event_surfaces=surfaces[:budget] if surfaces else None,
    )


def _fresh_predictor(cfg: SweepConfig, prepared: PreparedText):
    from .predictor import TraceReplayPredictor

    if prepared.predictor_kind == "trace":
        return TraceReplayPredictor(
            prepared.trace_records, prepared.stream.vocab_size, cfg.precision
        )
    return make_predictor(
        prepared.predictor_kind,
        prepared.stream.vocab_size,
        cfg.precision,
        cfg.order,
        cfg.delta,
    )


def prepare_text(cfg: SweepConfig, path: str) -> PreparedText:
    """Load one input (text file, or 6-field .trace with optional twin .txt)."""
    p = Path(path)
    if p.suffix == ".trace":
        header, records = read_trace(p)
        if len(records) < cfg.token_budget:
            raise ValueError(
                f"trace {p.name} has {len(records)} positions, fewer than "
                f"the {cfg.token_budget}-token budget"
            )
        records = records[: cfg.token_budget]
        twin = p.with_suffix(".txt")
        text = None
        if twin.exists():
            text = twin.read_text(encoding="utf-8")
            text = text[: sum(r.char_count for r in records)]
        stream = stream_from_trace(header, records, cfg.char_rate, text)
        kind = "trace"
    else:
        data = p.read_bytes()
        stream = tokenize(data, cfg.tokenizer, cfg.char_rate)
        stream = _truncate(stream, cfg.token_budget)
        if cfg.predictor == "trace":
            if not cfg.trace:
                raise ValueError("predictor 'trace' needs --trace PATH")
            header, records = read_trace(cfg.trace)
            if len(records) < len(stream):
                raise ValueError(
                    f"trace has {len(records)} positions but the run needs "
                    f"{len(stream)}"
                )
            if header.vocab_size != stream.vocab_size:
                raise ValueError(
                    f"trace vocabulary {header.vocab_size} does not match the "
                    f"tokenizer's {stream.vocab_size}"
                )
            records = records[: len(stream)]
            kind = "trace"
        else:
            records = None
            kind = cfg.predictor
    prepared = PreparedText(p.stem, stream, kind, records, Fraction(0))
    bpt, _bpc = cross_entropy(stream, _fresh_predictor(cfg, prepared))
    prepared.shannon_bits_total = bpt * len(stream)
    return prepared


# ---------------------------------------------------------------------------
# One (text, coder) cell: total bits + delay rows across the alpha grid
# ---------------------------------------------------------------------------


def _scalar_costs(cfg, prepared, kind) -> list:
    pred = _fresh_predictor(cfg, prepared)
    costs = []
    for ev in prepared.stream.events:
        pmf = pred.next_pmf()
        unit = scalar.encode_token_scalar(kind, pmf, ev.token, ev.index,
                                          ev.arrival_time)
        costs.append(unit.bit_count)
        pred.update(ev.token)
    return costs


def _ac_pass(cfg, prepared):
    stream = prepared.stream
    enc = arithmetic.ArithmeticEncoder(cfg.code_bits)
    pred = _fresh_predictor(cfg, prepared)
    last = Fraction(0)
    for ev in stream.events:
        enc.encode(pred.next_pmf(), ev.token, ev.arrival_time)
        pred.update(ev.token)
        last = ev.arrival_time
    enc.finish(last)
    bits = enc.bitstring()

    dec = arithmetic.ArithmeticDecoder(bits, cfg.code_bits)
    pred = _fresh_predictor(cfg, prepared)
    needed = []
    for ev in stream.events:
        tok, beta = dec.decode(pred.next_pmf())
        if tok != ev.token:
            raise AssertionError(
                f"arithmetic self-check mismatch at position {ev.index}"
            )
        pred.update(tok)
        needed.append(beta)
    return enc, needed


def _rans_pass(cfg, prepared, block_tokens):
    stream = prepared.stream
    pred = _fresh_predictor(cfg, prepared)
    pmfs = []
    for ev in stream.events:
        pmfs.append(pred.next_pmf())
        pred.update(ev.token)
    tokens = stream.tokens()
    blocks = []
    for start, length in rans.split_blocks(len(tokens), block_tokens):
        span = slice(start, start + length)
        block = rans.encode_block(
            tokens[span], pmfs[span], start,
            stream.events[start + length - 1].arrival_time,
        )
        got = rans.decode_block(
            block.words, block.state, rans.PmfSequence(pmfs[span]), length
        )
        if got != tokens[span]:
            raise AssertionError(f"rANS self-check mismatch in block at {start}")
        blocks.append(block)
    return blocks


def run_cell(cfg: SweepConfig, prepared: PreparedText, coder_name: str):
    """Returns (BitsRow, [DelayRow...]) for one text under one coder."""
    spec: CoderSpec = parse_coder(coder_name, cfg.code_bits)
    stream = prepared.stream
    arrivals = [ev.arrival_time for ev in stream.events]
    n = len(stream)
    chars = stream.total_chars
    lbar_bpc = prepared.shannon_bpc
    base_rate = cfg.char_rate * lbar_bpc  # matched service rate, bits/s

    def delay_records(rate):
        if spec.kind in ("shannon", "huffman-formula", "huffman-exact"):
            return channel.lindley_delays(arrivals, costs, rate)
        if spec.kind == "deflate":
            return channel.lindley_delays(arrivals, costs, rate)
        if spec.kind == "ac":
            trace = channel.serve_bits(enc.emit_times, rate)
            return channel.ac_delays(arrivals, trace, needed)
        if spec.kind == "rans":
            return channel.rans_delays(blocks, arrivals, rate)
        raise ValueError(spec.kind)

    if spec.kind in ("shannon", "huffman-formula", "huffman-exact"):
        costs = _scalar_costs(cfg, prepared, spec.kind)
        total_bits = sum(costs, Fraction(0))
    elif spec.kind == "deflate":
        units = deflate.encode_stream(stream, cfg.deflate_level)
        costs = [u.bit_count for u in units]
        total_bits = Fraction(sum(costs))
    elif spec.kind == "ac":
        enc, needed = _ac_pass(cfg, prepared)
        total_bits = Fraction(len(enc.bits))
    elif spec.kind == "rans":
        blocks = _rans_pass(cfg, prepared, spec.block_tokens)
        total_bits = Fraction(sum(b.bit_count for b in blocks))
    else:
        raise ValueError(f"unknown coder kind {spec.kind}")

    bpc = total_bits / chars
    overhead = 100 * (bpc / lbar_bpc - 1)
    bits_row = BitsRow(prepared.name, spec.name, total_bits / n, bpc, overhead)

    delay_rows = []
    for alpha in cfg.alphas:
        rate = alpha * base_rate
        records = delay_records(rate)
        delay_rows.append(
            DelayRow(
                prepared.name,
                spec.name,
                alpha,
                rate,
                channel.mean_delay(records),
                percentile_delay(records, 95),
                rate > cfg.char_rate * bpc,
            )
        )
    return bits_row, delay_rows


def _cell_job(args):
    cfg, prepared, coder = args
    return run_cell(cfg, prepared, coder)


def run_sweep(cfg: SweepConfig) -> SweepResult:
    prepared = [prepare_text(cfg, path) for path in cfg.inputs]
    cells = [(cfg, p, coder) for p in prepared for coder in cfg.coders]
    jobs = cfg.jobs if cfg.jobs > 0 else (os.cpu_count() or 1)
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_cell_job, cells))
    else:
        results = [_cell_job(c) for c in cells]

    bits_rows = [r[0] for r in results]
    delay_rows = [row for r in results for row in r[1]]

    meta = {
        "format": "streamcode-sweep-v1",
        "char_rate_cps": format_quantity(cfg.char_rate),
        "predictor": cfg.predictor,
        "order": str(cfg.order),
        "delta": f"{cfg.delta:g}",
        "precision_bits": str(cfg.precision),
        "code_bits": str(cfg.code_bits),
        "rans_state_bits": str(rans.STATE_BITS),
        "rans_renorm_bits": str(rans.RENORM_BITS),
        "deflate_level": str(cfg.deflate_level),
        "token_budget": str(cfg.token_budget),
        "alpha_grid": " ".join(f"{float(a):g}" for a in cfg.alphas),
        "coders": " ".join(cfg.coders),
    }
    for p in prepared:
        meta[f"tokenizer/{p.name}"] = p.stream.tokenizer
        meta[f"char_convention/{p.name}"] = p.stream.char_convention
        meta[f"tokens/{p.name}"] = str(len(p.stream))
        meta[f"shannon_bpc/{p.name}"] = format_quantity(p.shannon_bpc)
        meta[f"source_rate_bps/{p.name}"] = format_quantity(
            cfg.char_rate * p.shannon_bpc
        )
    return SweepResult(bits_rows, delay_rows, meta)


# ---------------------------------------------------------------------------
# CSV layer: '#'-prefixed key=value metadata lines, then header, then rows.
# ---------------------------------------------------------------------------


def _write_csv(path, metadata, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for k in metadata:
            fh.write(f"# {k}={metadata[k]}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_bits_csv(path, result: SweepResult) -> None:
    rows = [
        (
            r.text,
            r.coder,
            format_quantity(r.bits_per_token),
            format_quantity(r.bpc),
            format_quantity(r.overhead_pct),
        )
        for r in result.bits_rows
    ]
    _write_csv(
        path,
        result.metadata,
        ("text", "coder", "bits_per_token", "bpc", "overhead_pct"),
        rows,
    )


def write_delays_csv(path, result: SweepResult) -> None:
    rows = [
        (
            r.text,
            r.coder,
            f"{float(r.alpha):g}",
            format_quantity(r.rate_bps),
            format_seconds(r.mean_delay),
            format_seconds(r.p95_delay),
            "1" if r.stable else "0",
        )
        for r in result.delay_rows
    ]
    _write_csv(
        path,
        result.metadata,
        ("text", "coder", "alpha", "C_bps", "mean_delay_s", "p95_delay_s",
         "stable"),
        rows,
    )


def read_csv(path) -> tuple[dict[str, str], list[dict[str, str]]]:
    """Inverse of the writers: returns (metadata, row dicts)."""
    meta: dict[str, str] = {}
    rows: list[dict[str, str]] = []
    header: list[str] | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k] = v
                continue
            if header is None:
                header = line.split(",")
                continue
            rows.append(dict(zip(header, line.split(","))))
    return meta, rows

"""Command-line entry point.

Subcommands: tokenize, encode, decode, simulate, sweep, report. Exit codes:
0 on success, 1 for runtime diagnostics (corrupt payloads, model errors),
2 for usage problems (bad flags, missing files). Every output carries the
effective configuration so runs are self-describing.
"""

from __future__ import annotations

import argparse
import json
import sys
import zlib
from fractions import Fraction
from pathlib import Path

from . import channel, experiment
from .coders import DEFAULT_CODERS, arithmetic, deflate, parse_coder, rans, scalar
from .corpus import DEFAULT_CHAR_RATE, TokenStream, tokenize
from .errors import StreamcodeError
from .predictor import DEFAULT_PRECISION, make_predictor, read_trace
from .util import format_quantity, format_seconds

CONTAINER_FORMAT = "streamcode-bits-v1"


class UsageError(Exception):
    pass


def _positive_fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _alpha_grid(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(Fraction(part) for part in text.replace(",", " ").split())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad alpha grid: {text!r}")


def _read_input(path: str) -> bytes:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"input file does not exist: {path}")
    return p.read_bytes()


def _build_stream(args) -> TokenStream:
    data = _read_input(args.input)
    stream = tokenize(data, args.tokenizer, args.cps)
    if getattr(args, "tokens", None):
        stream = experiment._truncate(stream, args.tokens)
    return stream


def _build_predictor(args, stream: TokenStream):
    records = None
    if args.predictor == "trace":
        if not args.trace:
            raise UsageError("--predictor trace requires --trace PATH")
        header, records = read_trace(args.trace)
        if len(records) < len(stream):
            raise StreamcodeError(
                f"trace has {len(records)} positions, run needs {len(stream)}"
            )
        if header.vocab_size != stream.vocab_size:
            raise StreamcodeError(
                f"trace vocabulary {header.vocab_size} != tokenizer "
                f"vocabulary {stream.vocab_size}"
            )
        records = records[: len(stream)]
    return make_predictor(
        args.predictor,
        stream.vocab_size,
        args.precision,
        args.order,
        args.delta,
        records,
    )


def _bits_to_hex(bits: str) -> str:
    if not bits:
        return ""
    n = (len(bits) + 7) // 8
    padded = bits + "0" * (8 * n - len(bits))
    return int(padded, 2).to_bytes(n, "big").hex()


def _hex_to_bits(hx: str, nbits: int) -> str:
    if nbits == 0:
        return ""
    raw = bytes.fromhex(hx)
    return "".join(format(b, "08b") for b in raw)[:nbits]


# ---------------------------------------------------------------------------
# tokenize
# ---------------------------------------------------------------------------


def cmd_tokenize(args) -> int:
    stream = _build_stream(args)
    out = sys.stdout if args.out is None else open(args.out, "w", newline="\n")
    try:
        out.write("# format=streamcode-tokens-v1\n")
        out.write(f"# tokenizer={stream.tokenizer}\n")
        out.write(f"# char_convention={stream.char_convention}\n")
        out.write(f"# char_rate_cps={format_quantity(stream.char_rate)}\n")
        out.write(f"# vocab_size={stream.vocab_size}\n")
        out.write("index,token,chars,arrival_s\n")
        for ev in stream.events:
            out.write(
                f"{ev.index},{ev.token},{ev.char_count},"
                f"{format_seconds(ev.arrival_time)}\n"
            )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# encode / decode
# ---------------------------------------------------------------------------


def cmd_encode(args) -> int:
    try:
        spec = parse_coder(args.coder, args.code_bits)
    except ValueError as e:
        raise UsageError(str(e))
    if spec.kind in ("shannon", "huffman-formula"):
        raise UsageError(
            f"{spec.name} is an accounting scheme; it emits no bitstream "
            f"(use huffman-exact, ac, rans-kN or deflate)"
        )
    stream = _build_stream(args)
    text_bytes = stream.detokenize_bytes()
    header: dict = {
        "format": CONTAINER_FORMAT,
        "coder": spec.name,
        "token_count": len(stream),
        "tokenizer": stream.tokenizer,
        "char_convention": stream.char_convention,
        "vocab_size": stream.vocab_size,
        "char_rate": str(stream.char_rate),
        "precision": args.precision,
        "code_bits": args.code_bits,
        "predictor": {
            "kind": args.predictor,
            "order": args.order,
            "delta": args.delta,
            "trace": args.trace,
        },
        "vocab": list(stream.vocab) if stream.vocab is not None else None,
        "crc32": zlib.crc32(text_bytes),
    }

    tokens = stream.tokens()
    if spec.kind == "deflate":
        coder = deflate.SyncFlushCoder(args.deflate_level)
        for i in range(len(stream)):
            coder.encode_token(stream.surface_bytes(i))
        payload_bytes = coder.payload()
        header["deflate_level"] = args.deflate_level
        header["payload_bits"] = 8 * len(payload_bytes)
        payload_hex = payload_bytes.hex()
    elif spec.kind == "huffman-exact":
        pred = _build_predictor(args, stream)
        bits = []
        for tok in tokens:
            code = scalar.HuffmanCode(pred.next_pmf())
            bits.append(code.encode(tok))
            pred.update(tok)
        allbits = "".join(bits)
        header["payload_bits"] = len(allbits)
        payload_hex = _bits_to_hex(allbits)
    elif spec.kind == "ac":
        pred = _build_predictor(args, stream)
        enc = arithmetic.ArithmeticEncoder(args.code_bits)
        for ev in stream.events:
            enc.encode(pred.next_pmf(), ev.token, ev.arrival_time)
            pred.update(ev.token)
        enc.finish(stream.duration)
        allbits = enc.bitstring()
        header["payload_bits"] = len(allbits)
        payload_hex = _bits_to_hex(allbits)
    elif spec.kind == "rans":
        pred = _build_predictor(args, stream)
        pmfs = []
        for tok in tokens:
            pmfs.append(pred.next_pmf())
            pred.update(tok)
        pieces = []
        blocks_meta = []
        for start, length in rans.split_blocks(len(tokens), spec.block_tokens):
            block = rans.encode_block(
                tokens[start : start + length],
                pmfs[start : start + length],
                start,
                stream.events[start + length - 1].arrival_time,
            )
            b = block.bitstring()
            blocks_meta.append([length, len(b)])
            pieces.append(b)
        allbits = "".join(pieces)
        header["block_tokens"] = spec.block_tokens
        header["blocks"] = blocks_meta
        header["payload_bits"] = len(allbits)
        payload_hex = _bits_to_hex(allbits)
    else:
        raise UsageError(f"cannot encode with {spec.name}")

    with open(args.out, "w", encoding="ascii", newline="\n") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        fh.write(payload_hex + "\n")
    sys.stderr.write(
        f"{spec.name}: {len(stream)} tokens -> {header['payload_bits']} bits\n"
    )
    return 0


def _container_predictor(header: dict):
    p = header["predictor"]
    records = None
    if p["kind"] == "trace":
        if not p["trace"] or not Path(p["trace"]).exists():
            raise StreamcodeError(
                "container was encoded with a trace predictor; the trace file "
                f"{p['trace']!r} is not available"
            )
        _, records = read_trace(p["trace"])
        records = records[: header["token_count"]]
    return make_predictor(
        p["kind"],
        header["vocab_size"],
        header["precision"],
        p["order"],
        p["delta"],
        records,
    )


def cmd_decode(args) -> int:
    path = Path(args.input)
    if not path.exists():
        raise UsageError(f"input file does not exist: {args.input}")
    with open(path, "r", encoding="ascii") as fh:
        header = json.loads(fh.readline())
        payload_hex = fh.readline().strip()
    if header.get("format") != CONTAINER_FORMAT:
        raise StreamcodeError("not a streamcode bitstream container")

    count = header["token_count"]
    coder = header["coder"]
    if coder == "deflate":
        raw = bytes.fromhex(payload_hex)
        decomp = zlib.decompressobj(-15)
        text_bytes = decomp.decompress(raw) + decomp.flush()
        tokens = None
    else:
        bits = _hex_to_bits(payload_hex, header["payload_bits"])
        pred = _container_predictor(header)
        if coder == "huffman-exact":
            tokens, at = [], 0
            for i in range(count):
                code = scalar.HuffmanCode(pred.next_pmf())
                tok, at = code.decode_one(bits, at)
                tokens.append(tok)
                pred.update(tok)
        elif coder == "ac":
            dec = arithmetic.ArithmeticDecoder(bits, header["code_bits"])
            tokens = []
            for i in range(count):
                tok, _ = dec.decode(pred.next_pmf())
                tokens.append(tok)
                pred.update(tok)
        elif coder.startswith("rans-k"):
            tokens = []
            at = 0
            for length, nbits in header["blocks"]:
                piece = bits[at : at + nbits]
                at += nbits
                if len(piece) < nbits:
                    raise StreamcodeError(
                        f"payload truncated in block at token {len(tokens)}"
                    )
                words = [
                    int(piece[i : i + 16], 2)
                    for i in range(0, nbits - 32, 16)
                ]
                state = int(piece[nbits - 32 :], 2)
                tokens.extend(rans.decode_block(words, state, pred, length))
        else:
            raise StreamcodeError(f"unknown coder {coder!r} in container")

        vocab = header.get("vocab")
        if vocab is not None:
            text = "".join(vocab[t] for t in tokens)
        else:
            text = "".join(chr(t) for t in tokens)
        enc = "latin-1" if header["char_convention"] == "bytes" else "utf-8"
        text_bytes = text.encode(enc)

    if zlib.crc32(text_bytes) != header["crc32"]:
        raise StreamcodeError(
            "decoded output fails the container integrity check "
            "(payload corrupted?)"
        )
    if args.out:
        Path(args.out).write_bytes(text_bytes)
    else:
        sys.stdout.buffer.write(text_bytes)
    return 0


# ---------------------------------------------------------------------------
# simulate / sweep / report
# ---------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    try:
        spec = parse_coder(args.coder, args.code_bits)
    except ValueError as e:
        raise UsageError(str(e))
    cfg = _sweep_config(args, inputs=(args.input,), alphas=(args.alpha,))
    prepared = experiment.prepare_text(cfg, args.input)
    rate = args.alpha * cfg.char_rate * prepared.shannon_bpc

    arrivals = [ev.arrival_time for ev in prepared.stream.events]
    if spec.kind in ("shannon", "huffman-formula", "huffman-exact"):
        costs = experiment._scalar_costs(cfg, prepared, spec.kind)
        records = channel.lindley_delays(arrivals, costs, rate)
    elif spec.kind == "deflate":
        units = deflate.encode_stream(prepared.stream, cfg.deflate_level)
        records = channel.lindley_delays(arrivals, [u.bit_count for u in units], rate)
    elif spec.kind == "ac":
        enc, needed = experiment._ac_pass(cfg, prepared)
        records = channel.ac_delays(
            arrivals, channel.serve_bits(enc.emit_times, rate), needed
        )
    else:
        blocks = experiment._rans_pass(cfg, prepared, spec.block_tokens)
        records = channel.rans_delays(blocks, arrivals, rate)

    out = sys.stdout if args.out is None else open(args.out, "w", newline="\n")
    try:
        out.write("# format=streamcode-delays-v1\n")
        out.write(f"# text={prepared.name}\n")
        out.write(f"# coder={spec.name}\n")
        out.write(f"# alpha={float(args.alpha):g}\n")
        out.write(f"# C_bps={format_quantity(rate)}\n")
        out.write(f"# char_rate_cps={format_quantity(cfg.char_rate)}\n")
        out.write("coder,alpha,index,arrival_s,decode_s,delay_s\n")
        for r in records:
            out.write(
                f"{spec.name},{float(args.alpha):g},{r.index},"
                f"{format_seconds(r.arrival)},{format_seconds(r.decode_time)},"
                f"{format_seconds(r.delay)}\n"
            )
    finally:
        if out is not sys.stdout:
            out.close()
    mean = channel.mean_delay(records)
    sys.stderr.write(
        f"{spec.name} alpha={float(args.alpha):g}: mean delay "
        f"{format_seconds(mean)} s over {len(records)} tokens\n"
    )
    return 0


def _load_config_file(path: str) -> dict:
    """Flat key=value file mirroring the sweep options; '#' comments allowed."""
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file does not exist: {path}")
    out = {}
    for ln, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"bad config line {ln}: {line!r}")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _sweep_config(args, inputs=None, alphas=None) -> experiment.SweepConfig:
    file_opts = _load_config_file(args.config) if getattr(args, "config", None) else {}

    def opt(name, flag_value, parse, default):
        if flag_value is not None:
            return flag_value
        if name in file_opts:
            return parse(file_opts[name])
        return default

    coders = opt("coders", getattr(args, "coder_list", None),
                 lambda s: tuple(s.replace(",", " ").split()), DEFAULT_CODERS)
    for c in coders:
        try:
            parse_coder(c)
        except ValueError as e:
            raise UsageError(str(e))
    return experiment.SweepConfig(
        inputs=tuple(inputs) if inputs is not None else tuple(args.inputs),
        tokenizer=opt("tokenizer", args.tokenizer, str, "char"),
        char_rate=opt("cps", args.cps, Fraction, DEFAULT_CHAR_RATE),
        predictor=opt("predictor", args.predictor, str, "ngram"),
        order=opt("order", args.order, int, 2),
        delta=opt("delta", args.delta, float, 1.0),
        trace=opt("trace", args.trace, str, None),
        coders=coders,
        alphas=(tuple(alphas) if alphas is not None
                else opt("alphas", getattr(args, "alpha_grid", None),
                         _alpha_grid, experiment.DEFAULT_ALPHAS)),
        token_budget=opt("tokens", args.tokens, int, 10000),
        precision=opt("precision", args.precision, int, DEFAULT_PRECISION),
        code_bits=opt("code_bits", args.code_bits, int, 64),
        deflate_level=opt("deflate_level", getattr(args, "deflate_level", None),
                          int, deflate.DEFAULT_LEVEL),
        jobs=opt("jobs", getattr(args, "jobs", None), int, 1),
    )


def cmd_sweep(args) -> int:
    for path in args.inputs:
        if not Path(path).exists():
            raise UsageError(f"input file does not exist: {path}")
    cfg = _sweep_config(args)
    result = experiment.run_sweep(cfg)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    bits_path = out_dir / "bits.csv"
    delays_path = out_dir / "delays.csv"
    experiment.write_bits_csv(bits_path, result)
    experiment.write_delays_csv(delays_path, result)
    sys.stderr.write(
        f"wrote {bits_path} ({len(result.bits_rows)} rows) and "
        f"{delays_path} ({len(result.delay_rows)} rows)\n"
    )
    return 0


def cmd_report(args) -> int:
    for path in (args.bits, args.delays):
        if not Path(path).exists():
            raise UsageError(f"input file does not exist: {path}")
    _, bits_rows = experiment.read_csv(args.bits)
    _, delay_rows = experiment.read_csv(args.delays)
    if not bits_rows or not delay_rows:
        raise StreamcodeError("empty CSV input")

    print("compression (bits.csv)")
    print(f"{'text':<24} {'coder':<16} {'bits/token':>12} {'bpc':>10} {'overhead%':>10}")
    for r in bits_rows:
        print(
            f"{r['text']:<24} {r['coder']:<16} {r['bits_per_token']:>12} "
            f"{r['bpc']:>10} {r['overhead_pct']:>10}"
        )
    print()
    print("delays (delays.csv); unstable rows marked '*'")
    print(f"{'text':<24} {'coder':<16} {'alpha':>6} {'C_bps':>12} "
          f"{'mean_s':>14} {'p95_s':>14}")
    for r in delay_rows:
        mark = " " if r["stable"] == "1" else "*"
        print(
            f"{r['text']:<24} {r['coder']:<16} {r['alpha']:>6} {r['C_bps']:>12} "
            f"{r['mean_delay_s']:>14} {r['p95_delay_s']:>13}{mark}"
        )
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_stream_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tokenizer", choices=("char", "word"), default="char")
    p.add_argument("--cps", type=_positive_fraction, default=DEFAULT_CHAR_RATE,
                   help="characters per second feeding the clock")
    p.add_argument("--tokens", type=int, default=None,
                   help="token budget (truncate the stream)")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--predictor",
                   choices=("uniform", "unigram", "ngram", "trace"),
                   default="ngram")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--trace", default=None, help="trace file for --predictor trace")
    p.add_argument("--precision", type=int, default=DEFAULT_PRECISION,
                   help="PMF quantization bits F")
    p.add_argument("--code-bits", type=int, choices=(32, 64), default=64,
                   dest="code_bits", help="arithmetic coder register width")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="streamcode",
        description="streaming predict-then-code compression simulator",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="dump the token stream and its clock")
    p.add_argument("--input", required=True)
    _add_stream_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tokenize)

    p = sub.add_parser("encode", help="encode a text into a bitstream container")
    p.add_argument("--input", required=True)
    p.add_argument("--coder", required=True)
    _add_stream_flags(p)
    _add_model_flags(p)
    p.add_argument("--deflate-level", type=int, default=deflate.DEFAULT_LEVEL,
                   dest="deflate_level")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode a bitstream container")
    p.add_argument("--input", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate",
                       help="per-token delay dump for one coder at one alpha")
    p.add_argument("--input", required=True)
    p.add_argument("--coder", required=True)
    p.add_argument("--alpha", type=_positive_fraction, required=True)
    _add_stream_flags(p)
    _add_model_flags(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="full (text, coder, alpha) grid -> CSVs")
    p.add_argument("--input", dest="inputs", action="append", required=True,
                   help="text or .trace input; repeatable")
    _add_stream_flags(p)
    _add_model_flags(p)
    p.add_argument("--coders", dest="coder_list", default=None,
                   type=lambda s: tuple(s.replace(",", " ").split()),
                   help="comma/space separated coder list")
    p.add_argument("--alpha-grid", dest="alpha_grid", type=_alpha_grid,
                   default=None)
    p.add_argument("--deflate-level", type=int, default=None,
                   dest="deflate_level")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--config", default=None,
                   help="flat key=value config file; flags win")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="pretty-print sweep CSVs")
    p.add_argument("--bits", required=True)
    p.add_argument("--delays", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: file not found: {e.filename}", file=sys.stderr)
        return 2
    except StreamcodeError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, AssertionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

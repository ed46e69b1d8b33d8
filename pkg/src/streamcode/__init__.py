"""Streaming predict-then-code compression simulator.

A sequential probability model assigns each token a quantized PMF; an entropy
coder turns tokens into bits; a constant-rate FIFO channel carries them; the
package measures what each coder family costs in bits per character and in
per-token decodability delay.
"""

from .corpus import DEFAULT_CHAR_RATE, TokenEvent, TokenStream, token_rate, tokenize
from .predictor import (
    DEFAULT_PRECISION,
    NgramPredictor,
    QuantizedPmf,
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
from .experiment import (
    DEFAULT_ALPHAS,
    SweepConfig,
    pareto_frontier,
    percentile_delay,
    run_sweep,
    write_bits_csv,
    write_delays_csv,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_ALPHAS",
    "DEFAULT_CHAR_RATE",
    "DEFAULT_PRECISION",
    "NgramPredictor",
    "QuantizedPmf",
    "SweepConfig",
    "TokenEvent",
    "TokenStream",
    "TraceReplayPredictor",
    "UniformPredictor",
    "cross_entropy",
    "dequantize",
    "make_predictor",
    "pareto_frontier",
    "percentile_delay",
    "quantize",
    "read_trace",
    "run_sweep",
    "stream_from_trace",
    "token_rate",
    "tokenize",
    "write_bits_csv",
    "write_delays_csv",
    "write_trace",
]

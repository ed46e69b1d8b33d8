"""Regenerate the bundled fixtures and the frontend's sample CSVs.

Writes, deterministically:

  src/streamcode/fixtures/synthetic.trace   2,500-position synthetic trace
  src/streamcode/fixtures/synthetic.txt     matching surface text (10,000 chars)
  frontend/fixtures/bits.csv                sweep output over the trace
  frontend/fixtures/delays.csv

Run from the repository root with the package installed:
    python3 tools/make_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

from streamcode import synthetic
from streamcode.experiment import (
    SweepConfig,
    run_sweep,
    write_bits_csv,
    write_delays_csv,
)
from streamcode.predictor import write_trace

TRACE_POSITIONS = 2500

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "src" / "streamcode" / "fixtures"
FRONTEND_FIXTURES = ROOT / "frontend" / "fixtures"


def main() -> int:
    records = synthetic.synthetic_records(TRACE_POSITIONS)
    text = synthetic.synthetic_text(records)

    FIXTURES.mkdir(parents=True, exist_ok=True)
    trace_path = FIXTURES / "synthetic.trace"
    text_path = FIXTURES / "synthetic.txt"
    write_trace(trace_path, synthetic.synthetic_header(), records)
    text_path.write_text(text, encoding="ascii", newline="\n")
    print(f"wrote {trace_path} ({TRACE_POSITIONS} positions)")
    print(f"wrote {text_path} ({len(text)} chars)")

    cfg = SweepConfig(
        inputs=(str(trace_path),),
        predictor="trace",
        token_budget=TRACE_POSITIONS,
    )
    result = run_sweep(cfg)
    FRONTEND_FIXTURES.mkdir(parents=True, exist_ok=True)
    write_bits_csv(FRONTEND_FIXTURES / "bits.csv", result)
    write_delays_csv(FRONTEND_FIXTURES / "delays.csv", result)
    print(f"wrote {FRONTEND_FIXTURES / 'bits.csv'} ({len(result.bits_rows)} rows)")
    print(f"wrote {FRONTEND_FIXTURES / 'delays.csv'} ({len(result.delay_rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

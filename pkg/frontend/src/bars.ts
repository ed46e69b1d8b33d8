/**
 * Figure kind 1: bits per source character for every (text, coder) cell of
 * bits.csv, as grouped bars on a log-scale vertical axis (the coders span
 * an order of magnitude, so a linear axis would flatten the model-based
 * ones). Bars carry their source values in data-* attributes so renderings
 * stay checkable against the CSV they came from.
 */

import {
  Margin,
  Scale,
  colorFor,
  document,
  el,
  fmt,
  logScale,
  logTicks,
} from "./svg.js";
import { SweepCsv, numeric, requireColumns, selectCoderRows } from "./csv.js";

export const BARS_WIDTH = 760;
export const BARS_HEIGHT = 420;
export const BARS_MARGIN: Margin = { top: 42, right: 24, bottom: 112, left: 64 };

const COLUMNS = ["text", "coder", "bits_per_token", "bpc", "overhead_pct"];

export interface BarsOptions {
  coders?: string[];
  ymin?: number;
  ymax?: number;
  width?: number;
  height?: number;
}

export function bpcDomain(
  csv: SweepCsv,
  opts: BarsOptions = {}
): [number, number] {
  let min = Infinity;
  let max = 0;
  for (const row of selectCoderRows(csv, opts.coders)) {
    const v = numeric(row, "bpc");
    if (v <= 0) throw new Error(`non-positive bpc for ${row["coder"]}`);
    min = Math.min(min, v);
    max = Math.max(max, v);
  }
  const lo = opts.ymin ?? min / 1.25;
  const hi = opts.ymax ?? max * 1.05;
  if (!(lo > 0) || !(hi > lo)) {
    throw new Error(`bad bpc axis bounds [${lo}, ${hi}]`);
  }
  return [lo, hi];
}

export function bpcScale(csv: SweepCsv, opts: BarsOptions = {}): Scale {
  const height = opts.height ?? BARS_HEIGHT;
  return logScale(bpcDomain(csv, opts), [
    height - BARS_MARGIN.bottom,
    BARS_MARGIN.top,
  ]);
}

function ordered(values: string[]): string[] {
  return [...new Set(values)];
}

export function buildBpcBars(csv: SweepCsv, opts: BarsOptions = {}): string {
  requireColumns(csv, COLUMNS);
  if (csv.rows.length === 0) throw new Error("bits.csv has no data rows");
  const rows = selectCoderRows(csv, opts.coders);
  const width = opts.width ?? BARS_WIDTH;
  const height = opts.height ?? BARS_HEIGHT;

  const coders = ordered(rows.map((r) => r["coder"] ?? ""));
  const texts = ordered(rows.map((r) => r["text"] ?? ""));
  const y = bpcScale(csv, opts);
  const [yLo, yHi] = y.domain;
  const bottom = height - BARS_MARGIN.bottom;
  const plotWidth = width - BARS_MARGIN.left - BARS_MARGIN.right;
  const group = plotWidth / coders.length;
  const barWidth = (group * 0.72) / texts.length;

  const body: string[] = [];
  body.push(
    el(
      "text",
      { x: width / 2, y: 20, "text-anchor": "middle", "font-size": "14" },
      "Compression cost by coder"
    )
  );

  // log y axis: gridlines at 1-2-5 ticks
  for (const v of logTicks(y.domain)) {
    const py = y(v);
    body.push(
      el("line", {
        x1: BARS_MARGIN.left - 4, y1: py,
        x2: width - BARS_MARGIN.right, y2: py,
        stroke: "#ddd",
      }),
      el(
        "text",
        { x: BARS_MARGIN.left - 8, y: py + 4, "text-anchor": "end" },
        String(v)
      )
    );
  }
  body.push(
    el("line", {
      x1: BARS_MARGIN.left, y1: BARS_MARGIN.top,
      x2: BARS_MARGIN.left, y2: bottom,
      stroke: "#333",
    }),
    el("line", {
      x1: BARS_MARGIN.left, y1: bottom,
      x2: width - BARS_MARGIN.right, y2: bottom,
      stroke: "#333",
    }),
    el(
      "text",
      {
        x: 16, y: (BARS_MARGIN.top + bottom) / 2,
        "text-anchor": "middle",
        transform: `rotate(-90 16 ${(BARS_MARGIN.top + bottom) / 2})`,
      },
      "bits per source character (log)"
    )
  );

  // grouped bars, one group per coder in CSV order, one bar per text
  coders.forEach((coder, ci) => {
    const groupLeft = BARS_MARGIN.left + ci * group + group * 0.14;
    texts.forEach((text, ti) => {
      const row = rows.find(
        (r) => r["coder"] === coder && r["text"] === text
      );
      if (!row) return;
      const value = Math.min(Math.max(numeric(row, "bpc"), yLo), yHi);
      const top = y(value);
      body.push(
        el("rect", {
          x: groupLeft + ti * barWidth,
          y: top,
          width: barWidth,
          height: bottom - top,
          fill: colorFor(ti),
          "data-text": text,
          "data-coder": coder,
          "data-bpc": row["bpc"] ?? "",
        })
      );
    });
    const cx = BARS_MARGIN.left + ci * group + group / 2;
    body.push(
      el(
        "text",
        {
          x: cx, y: bottom + 14, "text-anchor": "end",
          transform: `rotate(-35 ${fmt(cx)} ${fmt(bottom + 14)})`,
        },
        coder
      )
    );
  });

  // one legend entry per text
  texts.forEach((text, ti) => {
    const ly = height - 18 - ti * 16;
    body.push(
      el("rect", {
        x: BARS_MARGIN.left, y: ly - 9, width: 10, height: 10,
        fill: colorFor(ti),
      }),
      el("text", { x: BARS_MARGIN.left + 16, y: ly }, text)
    );
  });

  return document(width, height, body);
}

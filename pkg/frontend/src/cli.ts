/**
 * Shared flag parsing and runners for the two plot commands:
 *
 *   plot_bpc_bars     --bits bits.csv     --out fig2.svg [--coders a,b]
 *                     [--ymin N] [--ymax N] [--width N] [--height N]
 *   plot_delay_curves --delays delays.csv --out fig3.svg [--coders a,b]
 *                     [--ymax N] [--width N] [--height N]
 *
 * Both exit 0 on success and 1 with `error: ...` on stderr otherwise
 * (missing files, missing columns, empty coder filters).
 */

import { mkdir, readFile, writeFile } from "fs/promises";
import path from "path";

import { parseSweepCsv } from "./csv.js";
import { BarsOptions, buildBpcBars } from "./bars.js";
import { DelayOptions, buildDelayCurves } from "./delays.js";

export interface PlotArgs {
  input: string;
  out: string;
  coders?: string[];
  ymin?: number;
  ymax?: number;
  width?: number;
  height?: number;
}

function numberFlag(name: string, raw: string): number {
  const v = Number(raw);
  if (!Number.isFinite(v) || v <= 0) {
    throw new Error(`${name} needs a positive number, got ${raw!}`);
  }
  return v;
}

export function parsePlotArgs(argv: string[], inputFlag: string): PlotArgs {
  const out: Partial<PlotArgs> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) throw new Error(`${flag} needs a value`);
    switch (flag) {
      case inputFlag:
        out.input = value;
        break;
      case "--out":
        out.out = value;
        break;
      case "--coders":
        out.coders = value.split(",").map((s) => s.trim()).filter(Boolean);
        break;
      case "--ymin":
        out.ymin = numberFlag("--ymin", value);
        break;
      case "--ymax":
        out.ymax = numberFlag("--ymax", value);
        break;
      case "--width":
        out.width = numberFlag("--width", value);
        break;
      case "--height":
        out.height = numberFlag("--height", value);
        break;
      default:
        throw new Error(`unknown flag ${flag}`);
    }
  }
  if (!out.input) throw new Error(`${inputFlag} PATH is required`);
  if (!out.out) throw new Error("--out PATH is required");
  return out as PlotArgs;
}

async function writeFigure(outPath: string, svg: string): Promise<void> {
  const dir = path.dirname(outPath);
  if (dir && dir !== ".") await mkdir(dir, { recursive: true });
  await writeFile(outPath, svg, "utf-8");
}

export async function runBars(argv: string[]): Promise<number> {
  try {
    const args = parsePlotArgs(argv, "--bits");
    const csv = parseSweepCsv(await readFile(args.input, "utf-8"));
    const opts: BarsOptions = {
      coders: args.coders, ymin: args.ymin, ymax: args.ymax,
      width: args.width, height: args.height,
    };
    await writeFigure(args.out, buildBpcBars(csv, opts));
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

export async function runCurves(argv: string[]): Promise<number> {
  try {
    const args = parsePlotArgs(argv, "--delays");
    const csv = parseSweepCsv(await readFile(args.input, "utf-8"));
    const opts: DelayOptions = {
      coders: args.coders, ymax: args.ymax,
      width: args.width, height: args.height,
    };
    await writeFigure(args.out, buildDelayCurves(csv, opts));
    console.log(`wrote ${args.out}`);
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

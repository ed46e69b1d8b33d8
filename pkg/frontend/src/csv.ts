/**
 * Reader for the sweep CSV dialect: leading `# key=value` metadata lines,
 * then one comma-separated header row, then data rows. No quoting or
 * escaping is used by the producer, so none is supported here.
 */

export interface SweepCsv {
  metadata: Record<string, string>;
  header: string[];
  rows: Record<string, string>[];
}

export function parseSweepCsv(text: string): SweepCsv {
  const metadata: Record<string, string> = {};
  let header: string[] | null = null;
  const rows: Record<string, string>[] = [];

  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = (lines[i] ?? "").trim();
    if (!line) continue;

    if (line.startsWith("#")) {
      if (header !== null) {
        throw new Error(`line ${i + 1}: metadata after the header row`);
      }
      const body = line.slice(1).trim();
      const eq = body.indexOf("=");
      if (eq <= 0) {
        throw new Error(`line ${i + 1}: metadata line without key=value`);
      }
      metadata[body.slice(0, eq)] = body.slice(eq + 1);
      continue;
    }

    const cells = line.split(",");
    if (header === null) {
      header = cells;
      continue;
    }
    if (cells.length !== header.length) {
      throw new Error(
        `line ${i + 1}: expected ${header.length} cells, got ${cells.length}`
      );
    }
    const row: Record<string, string> = {};
    header.forEach((name, col) => {
      row[name] = cells[col] ?? "";
    });
    rows.push(row);
  }

  if (header === null) throw new Error("no header row found");
  return { metadata, header, rows };
}

export function requireColumns(csv: SweepCsv, names: string[]): void {
  for (const name of names) {
    if (!csv.header.includes(name)) {
      throw new Error(`missing required column '${name}'`);
    }
  }
}

export function numeric(row: Record<string, string>, column: string): number {
  const raw = row[column];
  const value = Number(raw);
  if (raw === undefined || raw === "" || !Number.isFinite(value)) {
    throw new Error(`column '${column}' is not numeric: ${raw ?? "<missing>"}`);
  }
  return value;
}

/** Rows surviving an optional coder filter; an empty match is an error. */
export function selectCoderRows(
  csv: SweepCsv,
  coders: string[] | undefined
): Record<string, string>[] {
  if (coders === undefined) return csv.rows;
  const keep = csv.rows.filter((r) => coders.includes(r["coder"] ?? ""));
  if (keep.length === 0) {
    throw new Error(`coder filter matched no rows: ${coders.join(",")}`);
  }
  return keep;
}

/** Per-text channel rate at alpha=1, from `source_rate_bps/<text>` metadata. */
export function sourceRates(metadata: Record<string, string>): Map<string, number> {
  const out = new Map<string, number>();
  const prefix = "source_rate_bps/";
  for (const [key, value] of Object.entries(metadata)) {
    if (!key.startsWith(prefix)) continue;
    const rate = Number(value);
    if (!Number.isFinite(rate) || rate <= 0) {
      throw new Error(`bad metadata rate ${key}=${value}`);
    }
    out.set(key.slice(prefix.length), rate);
  }
  return out;
}

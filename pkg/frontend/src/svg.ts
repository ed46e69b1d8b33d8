/** Small SVG string builders shared by both figure kinds. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export function fmt(value: number): string {
  // fixed 3-decimal positions keep the markup byte-stable across runs
  const s = value.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  body?: string
): string {
  const parts = Object.entries(attrs).map(
    ([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : escapeText(v)}"`
  );
  const open = `<${tag}${parts.length ? " " + parts.join(" ") : ""}`;
  return body === undefined ? `${open}/>` : `${open}>${body}</${tag}>`;
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  if (d1 === d0) throw new Error("degenerate linear domain");
  const fn = ((v: number) => r0 + ((v - d0) / (d1 - d0)) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function logScale(
  domain: [number, number],
  range: [number, number]
): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) throw new Error("log scale needs positive domain");
  if (d0 === d1) throw new Error("degenerate log domain");
  const [l0, l1] = [Math.log10(d0), Math.log10(d1)];
  const [r0, r1] = range;
  const fn = ((v: number) => {
    if (v <= 0) throw new Error(`log scale got non-positive value ${v}`);
    return r0 + ((Math.log10(v) - l0) / (l1 - l0)) * (r1 - r0);
  }) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

/** 1-2-5 style tick values covering a positive log-scale domain. */
export function logTicks(domain: [number, number]): number[] {
  const out: number[] = [];
  const lo = Math.floor(Math.log10(domain[0]));
  const hi = Math.ceil(Math.log10(domain[1]));
  for (let e = lo; e <= hi; e++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, e);
      if (v >= domain[0] * 0.999 && v <= domain[1] * 1.001) out.push(v);
    }
  }
  return out;
}

export function document(
  width: number,
  height: number,
  body: string[]
): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" ` +
      `height="${height}" viewBox="0 0 ${width} ${height}" ` +
      `font-family="sans-serif" font-size="11">`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}

/** Stable color per series key (order of first appearance). */
export function colorFor(index: number): string {
  const palette = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#17becf", "#bcbd22",
  ];
  return palette[index % palette.length] ?? "#000000";
}

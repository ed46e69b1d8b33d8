import { readFile } from "fs/promises";

/** Attribute maps for every `<tag ...>` element in an SVG string. */
export function elements(
  svg: string,
  tag: string
): Record<string, string>[] {
  const out: Record<string, string>[] = [];
  const elRe = new RegExp(`<${tag}\\b([^>]*?)/?>`, "g");
  let m: RegExpExecArray | null;
  while ((m = elRe.exec(svg)) !== null) {
    const attrs: Record<string, string> = {};
    const attrRe = /([\w:-]+)="([^"]*)"/g;
    let a: RegExpExecArray | null;
    while ((a = attrRe.exec(m[1] ?? "")) !== null) {
      attrs[a[1] as string] = a[2] as string;
    }
    out.push(attrs);
  }
  return out;
}

export async function loadFixture(name: string): Promise<string> {
  const url = new URL(`../fixtures/${name}`, import.meta.url);
  return readFile(url, "utf-8");
}

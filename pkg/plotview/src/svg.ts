/** Minimal SVG chart primitives: scales, ticks, polylines, error bars. */

export interface Scale {
  (value: number): number;
  domain: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (d0 === d1) {
    d0 -= 1;
    d1 += 1;
  }
  const f = ((value: number) =>
    range[0] + ((value - d0) / (d1 - d0)) * (range[1] - range[0])) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  let [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    // no positive data; pick an arbitrary decade so axes still render
    d0 = 0.1;
    d1 = 1;
  }
  if (d0 === d1) {
    d0 /= 10;
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const f = ((value: number) =>
    range[0] + ((Math.log10(value) - l0) / (l1 - l0)) * (range[1] - range[0])) as Scale;
  f.domain = [d0, d1];
  return f;
}

export function linearTicks(domain: [number, number], count = 6): number[] {
  const span = domain[1] - domain[0];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const start = Math.ceil(domain[0] / chosen) * chosen;
  const ticks: number[] = [];
  for (let v = start; v <= domain[1] + 1e-12 * span; v += chosen) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

export function logTicks(domain: [number, number]): number[] {
  const ticks: number[] = [];
  const lo = Math.floor(Math.log10(domain[0]));
  const hi = Math.ceil(Math.log10(domain[1]));
  for (let e = lo; e <= hi; e++) {
    const v = Math.pow(10, e);
    if (v >= domain[0] / (1 + 1e-12) && v <= domain[1] * (1 + 1e-12)) {
      ticks.push(v);
    }
  }
  return ticks;
}

export function formatTick(value: number): string {
  if (value !== 0 && (Math.abs(value) < 1e-3 || Math.abs(value) >= 1e4)) {
    return value.toExponential(0);
  }
  return Number(value.toPrecision(6)).toString();
}

const esc = (s: string) => s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class SvgBuilder {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
      `<rect width="${width}" height="${height}" fill="white"/>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1): void {
    this.parts.push(
      `<line x1="${r(x1)}" y1="${r(y1)}" x2="${r(x2)}" y2="${r(y2)}" stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  /** Polyline through the given pixel points; gaps split the stroke. */
  path(points: Array<[number, number] | null>, stroke: string, dashed = false): void {
    let d = "";
    let pen = false;
    for (const p of points) {
      if (p === null) {
        pen = false;
        continue;
      }
      d += `${pen ? "L" : "M"}${r(p[0])},${r(p[1])}`;
      pen = true;
    }
    if (d.length === 0) return;
    const dash = dashed ? ' stroke-dasharray="6 3"' : "";
    this.parts.push(`<path d="${d}" fill="none" stroke="${stroke}" stroke-width="1.5"${dash}/>`);
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    this.parts.push(`<circle cx="${r(x)}" cy="${r(y)}" r="${radius}" fill="${fill}"/>`);
  }

  errorBar(x: number, yLow: number, yHigh: number, color: string, cap = 3): void {
    this.line(x, yLow, x, yHigh, color);
    this.line(x - cap, yLow, x + cap, yLow, color);
    this.line(x - cap, yHigh, x + cap, yHigh, color);
  }

  text(x: number, y: number, content: string, anchor = "middle", rotate = 0): void {
    const transform = rotate ? ` transform="rotate(${rotate} ${r(x)} ${r(y)})"` : "";
    this.parts.push(
      `<text x="${r(x)}" y="${r(y)}" text-anchor="${anchor}"${transform}>${esc(content)}</text>`,
    );
  }

  toString(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function r(v: number): string {
  return Number(v.toFixed(2)).toString();
}

export const PALETTE = ["#1f1f1f", "#d62728", "#1f77b4", "#2ca02c"];

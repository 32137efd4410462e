/**
 * Figure rendering: one experiment CSV in, one SVG file out.
 *
 * Analytical columns are drawn as dashed lines; Monte Carlo columns as solid
 * lines with markers and error bars from their standard-error columns.
 * Outage figures use a logarithmic y axis, so nonpositive values (empirical
 * zeros in the deep tail) are left out of the drawn geometry; the plotted
 * series returned to callers always carry the untouched CSV strings.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { CsvError, column, parseCsv } from "./csv.js";
import { FigureKind, figureLayout, validateSchema } from "./schema.js";
import {
  PALETTE,
  SvgBuilder,
  formatTick,
  linearScale,
  linearTicks,
  logScale,
  logTicks,
} from "./svg.js";

export interface FigureSpec {
  csvPath: string;
  kind: FigureKind;
  outPath: string;
  xLabel?: string;
  yLabel?: string;
  /** overrides the per-kind default (log for outage, linear otherwise) */
  logY?: boolean;
}

export interface PlottedSeries {
  label: string;
  xColumn: string;
  valueColumn: string;
  seColumn: string | null;
  /** untouched CSV strings, bit-exact */
  x: string[];
  values: string[];
  se: string[] | null;
  hasErrorBars: boolean;
}

export interface RenderResult {
  svg: string;
  yScale: "log" | "linear";
  series: PlottedSeries[];
}

const WIDTH = 800;
const HEIGHT = 500;
const MARGIN = { left: 70, right: 20, top: 20, bottom: 50 };

export function renderCsvText(text: string, spec: Omit<FigureSpec, "csvPath" | "outPath">): RenderResult {
  const table = parseCsv(text);
  validateSchema(table.header, spec.kind);
  const layout = figureLayout(spec.kind);
  const logY = spec.logY ?? layout.logY;

  const xRaw = column(table, layout.xColumn);
  const series: PlottedSeries[] = layout.series.map((s) => ({
    label: s.label,
    xColumn: layout.xColumn,
    valueColumn: s.valueColumn,
    seColumn: s.seColumn,
    x: xRaw,
    values: column(table, s.valueColumn),
    se: s.seColumn === null ? null : column(table, s.seColumn),
    hasErrorBars: s.seColumn !== null,
  }));

  const x = xRaw.map(Number);
  const xScale = linearScale(
    [Math.min(...x), Math.max(...x)],
    [MARGIN.left, WIDTH - MARGIN.right],
  );

  const yCandidates: number[] = [];
  for (const s of series) {
    const values = s.values.map(Number);
    const se = s.se?.map(Number);
    values.forEach((v, i) => {
      const lo = v - (se?.[i] ?? 0);
      const hi = v + (se?.[i] ?? 0);
      if (!logY || hi > 0) yCandidates.push(hi);
      if (!logY || lo > 0) yCandidates.push(lo);
      if (!logY || v > 0) yCandidates.push(v);
    });
  }
  let yDomain: [number, number];
  if (yCandidates.length === 0) {
    yDomain = logY ? [0.1, 1] : [0, 1];
  } else {
    yDomain = [Math.min(...yCandidates), Math.max(...yCandidates)];
    if (!logY) {
      const pad = 0.05 * (yDomain[1] - yDomain[0] || 1);
      yDomain = [yDomain[0] - pad, yDomain[1] + pad];
    }
  }
  const yRange: [number, number] = [HEIGHT - MARGIN.bottom, MARGIN.top];
  const yScale = logY ? logScale(yDomain, yRange) : linearScale(yDomain, yRange);

  const svg = new SvgBuilder(WIDTH, HEIGHT);
  // frame
  svg.line(MARGIN.left, MARGIN.top, MARGIN.left, HEIGHT - MARGIN.bottom, "#333");
  svg.line(MARGIN.left, HEIGHT - MARGIN.bottom, WIDTH - MARGIN.right, HEIGHT - MARGIN.bottom, "#333");
  for (const t of linearTicks(xScale.domain)) {
    const px = xScale(t);
    svg.line(px, HEIGHT - MARGIN.bottom, px, HEIGHT - MARGIN.bottom + 4, "#333");
    svg.text(px, HEIGHT - MARGIN.bottom + 18, formatTick(t));
  }
  const yTicks = logY ? logTicks(yScale.domain) : linearTicks(yScale.domain);
  for (const t of yTicks) {
    const py = yScale(t);
    svg.line(MARGIN.left - 4, py, MARGIN.left, py, "#333");
    svg.text(MARGIN.left - 8, py + 4, formatTick(t), "end");
  }
  svg.text((MARGIN.left + WIDTH - MARGIN.right) / 2, HEIGHT - 12, spec.xLabel ?? layout.xLabel);
  svg.text(18, HEIGHT / 2, spec.yLabel ?? layout.yLabel, "middle", -90);

  series.forEach((s, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const values = s.values.map(Number);
    const se = s.se?.map(Number);
    const drawable = (v: number) => Number.isFinite(v) && (!logY || v > 0);
    svg.path(
      values.map((v, i) => (drawable(v) ? [xScale(x[i]), yScale(v)] : null)),
      color,
      !s.hasErrorBars,
    );
    if (s.hasErrorBars && se) {
      values.forEach((v, i) => {
        if (!drawable(v)) return;
        svg.circle(xScale(x[i]), yScale(v), 2.5, color);
        const lo = v - se[i];
        const hi = v + se[i];
        if (se[i] > 0 && drawable(lo) && drawable(hi)) {
          svg.errorBar(xScale(x[i]), yScale(lo), yScale(hi), color);
        }
      });
    }
    // legend row
    const ly = MARGIN.top + 16 * idx + 8;
    svg.line(WIDTH - MARGIN.right - 180, ly, WIDTH - MARGIN.right - 150, ly, color, 2);
    svg.text(WIDTH - MARGIN.right - 144, ly + 4, s.label, "start");
  });

  return { svg: svg.toString(), yScale: logY ? "log" : "linear", series };
}

export function renderFigure(spec: FigureSpec): RenderResult {
  let text: string;
  try {
    text = readFileSync(spec.csvPath, "utf8");
  } catch (err) {
    throw new CsvError(`cannot read ${spec.csvPath}: ${(err as Error).message}`);
  }
  const result = renderCsvText(text, spec);
  writeFileSync(spec.outPath, result.svg);
  return result;
}

/**
 * Rebuild the value table from a render result, bit-exact.
 *
 * Returns one entry per CSV column that was plotted (the x column plus every
 * value and standard-error column), each carrying the original strings.
 */
export function dumpPlottedSeries(result: RenderResult): Record<string, string[]> {
  const dump: Record<string, string[]> = {};
  if (result.series.length > 0) {
    dump[result.series[0].xColumn] = result.series[0].x;
  }
  for (const s of result.series) {
    dump[s.valueColumn] = s.values;
    if (s.seColumn !== null && s.se !== null) {
      dump[s.seColumn] = s.se;
    }
  }
  return dump;
}

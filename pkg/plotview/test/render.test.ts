import { mkdtempSync, readFileSync, existsSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { CsvError, parseCsv } from "../src/csv.js";
import { dumpPlottedSeries, renderCsvText, renderFigure } from "../src/render.js";
import { CAPACITY_COLUMNS, OUTAGE_COLUMNS } from "../src/schema.js";
import type { FigureKind } from "../src/schema.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

const FIGURES: Array<{ file: string; kind: FigureKind }> = [
  { file: "outage.csv", kind: "outage" },
  { file: "capacity_vs_n.csv", kind: "capacity-sweep" },
  { file: "capacity_vs_mu.csv", kind: "capacity-sweep" },
  { file: "capacity_vs_theta.csv", kind: "capacity-sweep" },
];

function fixtureText(name: string): string {
  return readFileSync(join(FIXTURES, name), "utf8");
}

describe("rendering the experiment tables", () => {
  for (const { file, kind } of FIGURES) {
    it(`renders ${file} to an SVG file`, () => {
      const out = join(mkdtempSync(join(tmpdir(), "plotview-")), file.replace(".csv", ".svg"));
      const result = renderFigure({ csvPath: join(FIXTURES, file), kind, outPath: out });
      expect(existsSync(out)).toBe(true);
      const svg = readFileSync(out, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(result.series).toHaveLength(4);
    });
  }

  it("uses a logarithmic y axis for outage and linear for capacity", () => {
    const outage = renderCsvText(fixtureText("outage.csv"), { kind: "outage" });
    const capacity = renderCsvText(fixtureText("capacity_vs_n.csv"), { kind: "capacity-sweep" });
    expect(outage.yScale).toBe("log");
    expect(capacity.yScale).toBe("linear");
  });

  it("draws error bars only for Monte Carlo series", () => {
    const result = renderCsvText(fixtureText("outage.csv"), { kind: "outage" });
    expect(result.series.map((s) => s.hasErrorBars)).toEqual([false, true, true, true]);
  });

  it("survives an outage table whose empirical tail is all zeros", () => {
    const result = renderCsvText(fixtureText("outage_deep_tail.csv"), { kind: "outage" });
    expect(result.yScale).toBe("log");
    expect(result.svg).toContain("</svg>");
  });

  it("keeps the sweep values in file order", () => {
    const result = renderCsvText(fixtureText("capacity_vs_n.csv"), { kind: "capacity-sweep" });
    expect(result.series[0].x).toEqual(["8.0", "16.0", "32.0", "64.0"]);
  });
});

describe("round-trip of plotted series", () => {
  for (const { file, kind } of FIGURES) {
    it(`${file}: plotted series equal the CSV values bit-exact`, () => {
      const text = fixtureText(file);
      const table = parseCsv(text);
      const dump = dumpPlottedSeries(renderCsvText(text, { kind }));
      const expected = kind === "outage" ? OUTAGE_COLUMNS : CAPACITY_COLUMNS;
      expect(Object.keys(dump).sort()).toEqual([...expected].sort());
      for (const [columnName, values] of Object.entries(dump)) {
        const idx = table.header.indexOf(columnName);
        expect(values).toEqual(table.rows.map((row) => row[idx]));
      }
    });
  }
});

describe("schema validation", () => {
  it("names a renamed column", () => {
    const text = fixtureText("outage.csv").replace("pout_analytical", "pout_theory");
    expect(() => renderCsvText(text, { kind: "outage" })).toThrowError(/pout_analytical/);
    expect(() => renderCsvText(text, { kind: "outage" })).toThrowError(CsvError);
  });

  it("names an unknown extra column", () => {
    const lines = fixtureText("outage.csv").trimEnd().split(/\r?\n/);
    const withExtra = [lines[0] + ",bogus", ...lines.slice(1).map((l) => l + ",0.0")].join("\n");
    expect(() => renderCsvText(withExtra, { kind: "outage" })).toThrowError(/bogus/);
  });

  it("rejects a capacity table offered as outage", () => {
    expect(() =>
      renderCsvText(fixtureText("capacity_vs_n.csv"), { kind: "outage" }),
    ).toThrowError(/beta_db/);
  });

  it("rejects empty input explicitly", () => {
    expect(() => renderCsvText("", { kind: "outage" })).toThrowError(/empty input/);
    const headerOnly = fixtureText("outage.csv").split(/\r?\n/)[0];
    expect(() => renderCsvText(headerOnly, { kind: "outage" })).toThrowError(/empty input/);
  });

  it("rejects ragged and non-numeric rows", () => {
    const lines = fixtureText("outage.csv").trimEnd().split(/\r?\n/);
    expect(() => parseCsv([lines[0], "1.0,2.0"].join("\n"))).toThrowError(/cells/);
    const bad = [lines[0], lines[1].replace(/^[^,]*/, "oops")].join("\n");
    expect(() => parseCsv(bad)).toThrowError(/non-numeric/);
  });
});

/** Column contracts of the experiment CSVs and the per-figure series layout. */

import { CsvError } from "./csv.js";

export type FigureKind = "outage" | "capacity-sweep";

export const OUTAGE_COLUMNS = [
  "beta_db",
  "pout_analytical",
  "pout_mc_proposed",
  "se_proposed",
  "pout_mc_maxmean",
  "se_maxmean",
  "pout_mc_maxsnr",
  "se_maxsnr",
] as const;

export const CAPACITY_COLUMNS = [
  "sweep_value",
  "ec_analytical_proposed",
  "ec_mc_proposed",
  "se_proposed",
  "ec_mc_maxmean",
  "se_maxmean",
  "ec_mc_maxsnr",
  "se_maxsnr",
] as const;

export function expectedColumns(kind: FigureKind): readonly string[] {
  return kind === "outage" ? OUTAGE_COLUMNS : CAPACITY_COLUMNS;
}

/** Reject any header that is not exactly the contract, naming the offender. */
export function validateSchema(header: string[], kind: FigureKind): void {
  const expected = expectedColumns(kind);
  for (const name of expected) {
    if (!header.includes(name)) {
      throw new CsvError(`missing column '${name}' for kind '${kind}'`);
    }
  }
  for (const name of header) {
    if (!expected.includes(name)) {
      throw new CsvError(`unknown column '${name}' for kind '${kind}'`);
    }
  }
  if (header.length !== expected.length) {
    throw new CsvError(`duplicated column in header: ${header.join(",")}`);
  }
}

export interface SeriesSpec {
  /** CSV column holding the values */
  valueColumn: string;
  /** CSV column holding standard errors, when the series carries error bars */
  seColumn: string | null;
  label: string;
}

export interface FigureLayout {
  xColumn: string;
  xLabel: string;
  yLabel: string;
  logY: boolean;
  series: SeriesSpec[];
}

export function figureLayout(kind: FigureKind): FigureLayout {
  if (kind === "outage") {
    return {
      xColumn: "beta_db",
      xLabel: "threshold [dB]",
      yLabel: "outage probability",
      logY: true,
      series: [
        { valueColumn: "pout_analytical", seColumn: null, label: "analytical (closed form)" },
        { valueColumn: "pout_mc_proposed", seColumn: "se_proposed", label: "MC closed form" },
        { valueColumn: "pout_mc_maxmean", seColumn: "se_maxmean", label: "MC max mean SNR" },
        { valueColumn: "pout_mc_maxsnr", seColumn: "se_maxsnr", label: "MC max SNR" },
      ],
    };
  }
  return {
    xColumn: "sweep_value",
    xLabel: "sweep value",
    yLabel: "ergodic capacity [bit/use]",
    logY: false,
    series: [
      { valueColumn: "ec_analytical_proposed", seColumn: null, label: "analytical (closed form)" },
      { valueColumn: "ec_mc_proposed", seColumn: "se_proposed", label: "MC closed form" },
      { valueColumn: "ec_mc_maxmean", seColumn: "se_maxmean", label: "MC max mean SNR" },
      { valueColumn: "ec_mc_maxsnr", seColumn: "se_maxsnr", label: "MC max SNR" },
    ],
  };
}

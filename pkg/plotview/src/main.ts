/** Command line: plotview <csv> --kind outage|capacity-sweep --out <svg>. */

import { CsvError } from "./csv.js";
import { FigureKind } from "./schema.js";
import { renderFigure } from "./render.js";

const USAGE =
  "usage: plotview <csv-path> --kind outage|capacity-sweep --out <svg-path> " +
  "[--x-label <text>] [--y-label <text>] [--linear-y|--log-y]";

export function run(argv: string[]): number {
  let csvPath: string | null = null;
  let kind: string | null = null;
  let outPath: string | null = null;
  let xLabel: string | undefined;
  let yLabel: string | undefined;
  let logY: boolean | undefined;

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      if (i + 1 >= argv.length) throw new CsvError(`missing value for ${arg}`);
      return argv[++i];
    };
    if (arg === "--kind") kind = next();
    else if (arg === "--out") outPath = next();
    else if (arg === "--x-label") xLabel = next();
    else if (arg === "--y-label") yLabel = next();
    else if (arg === "--linear-y") logY = false;
    else if (arg === "--log-y") logY = true;
    else if (arg.startsWith("--")) {
      console.error(`unknown flag ${arg}\n${USAGE}`);
      return 2;
    } else if (csvPath === null) csvPath = arg;
    else {
      console.error(`unexpected positional argument ${arg}\n${USAGE}`);
      return 2;
    }
  }
  if (csvPath === null || outPath === null || (kind !== "outage" && kind !== "capacity-sweep")) {
    console.error(USAGE);
    return 2;
  }
  try {
    const result = renderFigure({
      csvPath,
      kind: kind as FigureKind,
      outPath,
      xLabel,
      yLabel,
      logY,
    });
    console.log(
      `wrote ${outPath} (${result.series.length} series, ${result.yScale} y axis)`,
    );
    return 0;
  } catch (err) {
    if (err instanceof CsvError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

process.exit(run(process.argv.slice(2)));

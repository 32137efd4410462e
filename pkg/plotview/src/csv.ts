/**
 * Strict CSV reading for the experiment tables.
 *
 * Values are kept as their original strings so that plotted series can be
 * compared bit-exact against the file; numeric views are derived on demand.
 */

export class CsvError extends Error {}

export interface CsvTable {
  header: string[];
  /** rows[i][j] is the untouched text of column j in data row i */
  rows: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty input: no header row");
  }
  const header = lines[0].split(",");
  if (lines.length === 1) {
    throw new CsvError("empty input: header but no data rows");
  }
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `row ${i + 1} has ${cells.length} cells, expected ${header.length}`,
      );
    }
    return cells;
  });
  for (const row of rows) {
    for (let j = 0; j < header.length; j++) {
      if (!Number.isFinite(Number(row[j]))) {
        throw new CsvError(`column '${header[j]}' contains a non-numeric value: '${row[j]}'`);
      }
    }
  }
  return { header, rows };
}

export function column(table: CsvTable, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`missing column '${name}'`);
  }
  return table.rows.map((row) => row[idx]);
}

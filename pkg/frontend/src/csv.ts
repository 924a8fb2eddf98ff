/**
 * Reader for the sweep-results CSV produced by the simulation harness.
 *
 * The schema is fixed: a header line naming fourteen columns, then one row
 * per (parameter value, scheme).  Rows whose status is not "ok" mark failed
 * (unstable) parameter points and carry NaN diagnostics.
 */

export const RESULTS_COLUMNS = [
  "epsilon",
  "nu",
  "h",
  "n_cells",
  "scheme",
  "l1_error",
  "l2_error",
  "sup_error",
  "tv",
  "half_line_mass",
  "min",
  "max",
  "runtime_s",
  "status",
] as const;

export type ResultsColumn = (typeof RESULTS_COLUMNS)[number];

export const NUMERIC_COLUMNS: ResultsColumn[] = [
  "epsilon",
  "nu",
  "h",
  "n_cells",
  "l1_error",
  "l2_error",
  "sup_error",
  "tv",
  "half_line_mass",
  "min",
  "max",
  "runtime_s",
];

export interface SweepRow {
  epsilon: number;
  nu: number;
  h: number;
  n_cells: number;
  scheme: string;
  l1_error: number;
  l2_error: number;
  sup_error: number;
  tv: number;
  half_line_mass: number;
  min: number;
  max: number;
  runtime_s: number;
  status: string;
}

export class CsvError extends Error {}

export function parseSweepCsv(text: string): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty file: expected the sweep-results header");
  }
  const header = lines[0].split(",");
  const expected = RESULTS_COLUMNS.join(",");
  if (header.join(",") !== expected) {
    throw new CsvError(
      `unexpected header: got "${lines[0]}", expected "${expected}"`,
    );
  }
  const rows: SweepRow[] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== RESULTS_COLUMNS.length) {
      throw new CsvError(
        `line ${i + 1}: expected ${RESULTS_COLUMNS.length} fields, got ${parts.length}`,
      );
    }
    const record: Record<string, number | string> = {};
    RESULTS_COLUMNS.forEach((name, col) => {
      if (name === "scheme" || name === "status") {
        record[name] = parts[col];
      } else {
        const value = Number(parts[col]);
        if (Number.isNaN(value) && parts[col] !== "nan") {
          throw new CsvError(`line ${i + 1}: bad number "${parts[col]}" in ${name}`);
        }
        record[name] = value;
      }
    });
    rows.push(record as unknown as SweepRow);
  }
  return rows;
}

export function isNumericColumn(name: string): boolean {
  return (NUMERIC_COLUMNS as string[]).includes(name);
}

/**
 * CSV loading with schema checks shared by both figure kinds.
 *
 * Extra columns beyond the required set are tolerated; the harness is
 * free to append diagnostics without breaking older plotting setups.
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export type RawRow = Record<string, string>;

/**
 * Read a CSV file and return its rows as string records.
 *
 * Throws when the file cannot be read, a required column is absent from
 * the header, or the file holds a header and nothing else.
 */
export function readCsv(path: string, required: readonly string[]): RawRow[] {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    throw new Error(`${path}: cannot read file`);
  }
  const parsed = Papa.parse<RawRow>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const column of required) {
    if (!fields.includes(column)) {
      throw new Error(`${path}: missing required column "${column}"`);
    }
  }
  const rows = parsed.data;
  if (rows.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
  return rows;
}

/** Convert one field to a finite number or fail naming its location. */
export function numberField(
  row: RawRow,
  column: string,
  path: string,
  line: number
): number {
  const value = Number(row[column]);
  if (row[column] === "" || row[column] === undefined || !Number.isFinite(value)) {
    throw new Error(`${path}: line ${line}: bad ${column} value "${row[column] ?? ""}"`);
  }
  return value;
}

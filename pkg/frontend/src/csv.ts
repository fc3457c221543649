/**
 * Strict reader for the sweep CSV format: a header row followed by data rows
 * of constant column count, decimal-point floats, never quoted.  Anything
 * else is a hard error naming the offending row or column.
 */

import { readFileSync } from "node:fs";

export class CsvError extends Error {}

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, source = "<csv>"): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new CsvError(`${source}: empty file`);
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new CsvError(
        `${source}: row ${i + 2} has ${cells.length} cells, expected ${header.length}`,
      );
    }
    return cells;
  });
  if (rows.length === 0) {
    throw new CsvError(`${source}: no data rows`);
  }
  return { header, rows };
}

export function readCsv(path: string): Table {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch (err) {
    throw new CsvError(`${path}: ${(err as Error).message}`);
  }
  return parseCsv(text, path);
}

export function columnIndex(table: Table, name: string, source = "<csv>"): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(
      `${source}: missing required column '${name}' (have: ${table.header.join(", ")})`,
    );
  }
  return idx;
}

/** Numeric column; blank cells become NaN (engine did not run there). */
export function numericColumn(table: Table, name: string, source = "<csv>"): number[] {
  const idx = columnIndex(table, name, source);
  return table.rows.map((row, i) => {
    const cell = row[idx];
    if (cell === "") return NaN;
    const value = Number(cell);
    if (!Number.isFinite(value)) {
      throw new CsvError(`${source}: row ${i + 2}, column '${name}': bad float '${cell}'`);
    }
    return value;
  });
}

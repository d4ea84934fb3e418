/**
 * CSV readers for the sweep outputs.  Either layout is accepted: per-snapshot
 * rows or the per-sweep-point summary; the header row decides which.
 */

import Papa from "papaparse";

import {
  ROWS_COLUMNS,
  SUMMARY_COLUMNS,
  SchemaError,
  SweepRow,
  SummaryRow,
} from "./schema.js";

function splitCsv(text: string): string[][] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`CSV parse error on row ${first.row}: ${first.message}`);
  }
  return parsed.data;
}

function headerMatches(header: string[], expected: readonly string[]): boolean {
  return (
    header.length === expected.length &&
    expected.every((name, k) => header[k] === name)
  );
}

function num(cell: string, column: string, line: number): number {
  const value = Number(cell);
  if (cell.trim() === "" || !Number.isFinite(value)) {
    throw new SchemaError(`line ${line}: ${column} is not a number: "${cell}"`);
  }
  return value;
}

function numOrNull(cell: string, column: string, line: number): number | null {
  if (cell.trim() === "") return null;
  return num(cell, column, line);
}

export type SweepTable =
  | { kind: "rows"; rows: SweepRow[] }
  | { kind: "summary"; rows: SummaryRow[] };

/** Parse sweep CSV text; throws SchemaError on an unknown header or no data. */
export function parseSweepCsv(text: string): SweepTable {
  if (text.trim() === "") {
    throw new SchemaError("CSV is empty");
  }
  const records = splitCsv(text);
  const header = records[0];
  const body = records.slice(1);
  if (body.length === 0) {
    throw new SchemaError("CSV has a header but no data rows");
  }
  if (headerMatches(header, ROWS_COLUMNS)) {
    const rows = body.map((cells, k) => {
      const line = k + 2;
      if (cells.length !== ROWS_COLUMNS.length) {
        throw new SchemaError(`line ${line}: expected ${ROWS_COLUMNS.length} cells`);
      }
      return {
        sweepValue: num(cells[0], "sweep_value", line),
        snapshot: num(cells[1], "snapshot", line),
        algorithm: cells[2],
        alpha: numOrNull(cells[3], "alpha", line),
        puOutage: numOrNull(cells[4], "pu_outage", line),
        suOutage: numOrNull(cells[5], "su_outage", line),
        admitted: numOrNull(cells[6], "admitted", line),
        throughputNats: numOrNull(cells[7], "throughput_nats", line),
      };
    });
    return { kind: "rows", rows };
  }
  if (headerMatches(header, SUMMARY_COLUMNS)) {
    const rows = body.map((cells, k) => {
      const line = k + 2;
      if (cells.length !== SUMMARY_COLUMNS.length) {
        throw new SchemaError(`line ${line}: expected ${SUMMARY_COLUMNS.length} cells`);
      }
      return {
        sweepValue: num(cells[0], "sweep_value", line),
        algorithm: cells[1],
        alpha: numOrNull(cells[2], "alpha", line),
        snapshots: num(cells[3], "snapshots", line),
        errors: num(cells[4], "errors", line),
        meanPuOutage: numOrNull(cells[5], "mean_pu_outage", line),
        meanSuOutage: numOrNull(cells[6], "mean_su_outage", line),
        meanAdmitted: numOrNull(cells[7], "mean_admitted", line),
        meanThroughputNats: numOrNull(cells[8], "mean_throughput_nats", line),
      };
    });
    return { kind: "summary", rows };
  }
  throw new SchemaError(
    `unrecognized CSV header: ${header.join(",")} (expected sweep rows or summary)`,
  );
}

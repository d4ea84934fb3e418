/**
 * Grouping of sweep records into one curve per algorithm/alpha group, with
 * per-snapshot rows averaged per sweep point (the summary layout is already
 * aggregated).
 */

import { SweepRow, SummaryRow } from "./schema.js";
import { SweepTable } from "./csv.js";

export type MetricName = "puOutage" | "suOutage" | "admitted" | "throughputNats";

export interface CurvePoint {
  x: number;
  y: number;
}

export interface Curve {
  label: string;
  algorithm: string;
  alpha: number | null;
  points: CurvePoint[];
}

/**
 * When the sweep axis is the box scale itself, every box-baseline row has
 * alpha equal to its sweep value; folding alpha into the group key would
 * then split one curve into single points.
 */
export function alphaIsSweepAxis(rows: { alpha: number | null; sweepValue: number }[]): boolean {
  const withAlpha = rows.filter((r) => r.alpha !== null);
  return (
    withAlpha.length > 0 && withAlpha.every((r) => r.alpha === r.sweepValue)
  );
}

function groupKey(algorithm: string, alpha: number | null): string {
  return alpha === null ? algorithm : `${algorithm} α=${alpha}`;
}

interface Accumulator {
  algorithm: string;
  alpha: number | null;
  sums: Map<number, { total: number; count: number }>;
}

function buildCurves(
  records: { algorithm: string; alpha: number | null; sweepValue: number; value: number | null }[],
  dropAlpha: boolean,
): Curve[] {
  const groups = new Map<string, Accumulator>();
  for (const rec of records) {
    const alpha = dropAlpha ? null : rec.alpha;
    const key = groupKey(rec.algorithm, alpha);
    let acc = groups.get(key);
    if (!acc) {
      acc = { algorithm: rec.algorithm, alpha, sums: new Map() };
      groups.set(key, acc);
    }
    if (rec.value === null) continue;
    const cell = acc.sums.get(rec.sweepValue) ?? { total: 0, count: 0 };
    cell.total += rec.value;
    cell.count += 1;
    acc.sums.set(rec.sweepValue, cell);
  }
  const curves: Curve[] = [];
  for (const [label, acc] of [...groups.entries()].sort()) {
    const points = [...acc.sums.entries()]
      .filter(([, cell]) => cell.count > 0)
      .map(([x, cell]) => ({ x, y: cell.total / cell.count }))
      .sort((p, q) => p.x - q.x);
    // a group whose metric never appeared would plot nothing; leave it out
    // of the legend too
    if (points.length > 0) {
      curves.push({ label, algorithm: acc.algorithm, alpha: acc.alpha, points });
    }
  }
  return curves;
}

const SUMMARY_FIELD: Record<MetricName, keyof SummaryRow> = {
  puOutage: "meanPuOutage",
  suOutage: "meanSuOutage",
  admitted: "meanAdmitted",
  throughputNats: "meanThroughputNats",
};

/** One averaged curve per algorithm/alpha group for the chosen metric. */
export function curvesFor(table: SweepTable, metric: MetricName): Curve[] {
  const dropAlpha = alphaIsSweepAxis(table.rows);
  if (table.kind === "rows") {
    const records = table.rows.map((r: SweepRow) => ({
      algorithm: r.algorithm,
      alpha: r.alpha,
      sweepValue: r.sweepValue,
      value: r[metric],
    }));
    return buildCurves(records, dropAlpha);
  }
  const field = SUMMARY_FIELD[metric];
  const records = table.rows.map((r: SummaryRow) => ({
    algorithm: r.algorithm,
    alpha: r.alpha,
    sweepValue: r.sweepValue,
    value: r[field] as number | null,
  }));
  return buildCurves(records, dropAlpha);
}

import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { parseSweepCsv } from "../src/csv.js";
import { alphaIsSweepAxis, curvesFor } from "../src/curves.js";

const read = (name: string) =>
  readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");

describe("curvesFor", () => {
  it("draws one curve per algorithm on an alpha sweep", () => {
    const table = parseSweepCsv(read("sweep.csv"));
    const curves = curvesFor(table, "throughputNats");
    // alpha equals the sweep value on every box row, so alpha is the x axis
    // and does not split the curves further
    expect(curves.map((c) => c.label)).toEqual([
      "gp-box",
      "gp-poly",
      "jpac",
      "jpac-box",
    ]);
    for (const curve of curves) {
      expect(curve.points.map((p) => p.x)).toEqual([0.5, 1.0]);
    }
  });

  it("averages snapshots at each sweep point", () => {
    const table = parseSweepCsv(read("sweep.csv"));
    if (table.kind !== "rows") throw new Error("fixture layout changed");
    const curves = curvesFor(table, "throughputNats");
    const jpac = curves.find((c) => c.label === "jpac")!;
    const byHand = table.rows
      .filter((r) => r.algorithm === "jpac" && r.sweepValue === 0.5)
      .map((r) => r.throughputNats!);
    const mean = byHand.reduce((s, v) => s + v, 0) / byHand.length;
    expect(jpac.points[0].y).toBeCloseTo(mean, 15);
  });

  it("matches the pre-aggregated summary curves", () => {
    const rows = curvesFor(parseSweepCsv(read("sweep.csv")), "admitted");
    const summary = curvesFor(parseSweepCsv(read("summary.csv")), "admitted");
    expect(summary.map((c) => c.label)).toEqual(rows.map((c) => c.label));
    for (let k = 0; k < rows.length; k++) {
      expect(summary[k].points).toEqual(rows[k].points);
    }
  });

  it("keeps alpha in the label when sweeping something else", () => {
    const table = parseSweepCsv(read("sweep.csv"));
    if (table.kind !== "rows") throw new Error("fixture layout changed");
    // pretend the same rows came from a target-SINR sweep at fixed alpha
    const rows = table.rows.map((r) => ({ ...r, sweepValue: -20 }));
    expect(alphaIsSweepAxis(rows)).toBe(false);
    const curves = curvesFor({ kind: "rows", rows }, "admitted");
    expect(curves.map((c) => c.label)).toEqual([
      "gp-box α=0.5",
      "gp-box α=1",
      "gp-poly",
      "jpac",
      "jpac-box α=0.5",
      "jpac-box α=1",
    ]);
  });

  it("skips rows whose metric is missing", () => {
    const table = parseSweepCsv(read("sweep.csv"));
    if (table.kind !== "rows") throw new Error("fixture layout changed");
    const rows = table.rows.map((r) =>
      r.algorithm === "jpac" ? { ...r, admitted: null } : r,
    );
    const curves = curvesFor({ kind: "rows", rows }, "admitted");
    expect(curves.some((c) => c.label === "jpac")).toBe(false);
    expect(curves).toHaveLength(3);
  });
});

import { readFileSync } from "node:fs";

import { describe, expect, it } from "vitest";

import { parseSweepCsv } from "../src/csv.js";
import { renderRegionFigure } from "../src/region.js";
import { SchemaError, parseFcirDocument } from "../src/schema.js";
import { fmt, niceTicks, tickLabel } from "../src/svg.js";
import { renderSweepFigure } from "../src/sweep.js";

const read = (name: string) =>
  readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");

const attrValues = (svg: string, attr: string): string[] =>
  [...svg.matchAll(new RegExp(`${attr}="([^"]*)"`, "g"))].map((m) => m[1]);

describe("renderRegionFigure", () => {
  const doc = parseFcirDocument(read("t2_fcir.json"));
  const svg = renderRegionFigure(doc);

  it("marks both axis intercepts at 1.75", () => {
    const [x] = attrValues(svg, "data-x-intercept");
    const [y] = attrValues(svg, "data-y-intercept");
    expect(Number(x)).toBeCloseTo(1.75, 9);
    expect(Number(y)).toBeCloseTo(1.75, 9);
    // the outline touches each axis at the intercept vertex
    const points = attrValues(svg, 'class="region" points')[0];
    expect(points.split(" ").length).toBe(4);
  });

  it("draws one face line per station and one box per alpha", () => {
    expect(attrValues(svg, "data-station").sort()).toEqual(["0", "1"]);
    expect(attrValues(svg, "data-alpha").sort()).toEqual(["0.5", "1"]);
    expect(svg).toContain("box α=0.5");
    expect(svg).toContain("box α=1");
    expect(svg).toContain("protection region");
    expect(svg).toContain("interference at station 0 (W)");
  });

  it("is deterministic", () => {
    expect(renderRegionFigure(doc)).toBe(svg);
  });

  it("rejects documents with other than two stations", () => {
    const raw = JSON.parse(read("t2_fcir.json"));
    raw.a = [[1.6]];
    raw.c = [2.8];
    raw.phi_max = [3.0];
    raw.noise = [0.1];
    raw.titl = [1.9];
    raw.itl0 = [1.75];
    const one = parseFcirDocument(JSON.stringify(raw));
    expect(() => renderRegionFigure(one)).toThrow(SchemaError);
    expect(() => renderRegionFigure(one)).toThrow(/two-station/);
  });
});

describe("renderSweepFigure", () => {
  const table = parseSweepCsv(read("sweep.csv"));

  it("draws one curve per algorithm group in each outage panel", () => {
    const svg = renderSweepFigure(table, { kind: "outage" });
    const labels = attrValues(svg, "data-label");
    const metrics = new Set(attrValues(svg, "data-metric"));
    expect(metrics).toEqual(new Set(["puOutage", "suOutage"]));
    const perMetric = labels.length / metrics.size;
    expect(perMetric).toBe(4);
    expect(new Set(labels)).toEqual(
      new Set(["jpac", "jpac-box", "gp-poly", "gp-box"]),
    );
  });

  it("draws the throughput panel from either layout", () => {
    for (const name of ["sweep.csv", "summary.csv"]) {
      const svg = renderSweepFigure(parseSweepCsv(read(name)), {
        kind: "throughput",
        xlabel: "box scale α",
      });
      expect(attrValues(svg, "data-label")).toHaveLength(4);
      expect(svg).toContain("mean aggregate throughput (nats)");
      expect(svg).toContain("box scale α");
    }
  });

  it("is deterministic", () => {
    const once = renderSweepFigure(table, { kind: "outage" });
    expect(renderSweepFigure(table, { kind: "outage" })).toBe(once);
  });
});

describe("svg helpers", () => {
  it("formats numbers at fixed precision without negative zero", () => {
    expect(fmt(1.005)).toBe("1.00");
    expect(fmt(-0.0001)).toBe("0.00");
    expect(fmt(468)).toBe("468.00");
  });

  it("labels ticks compactly", () => {
    expect(tickLabel(0.5)).toBe("0.5");
    expect(tickLabel(0)).toBe("0");
    const ticks = niceTicks(0, 2.128, 6);
    expect(ticks[0]).toBe(0);
    expect(ticks[ticks.length - 1]).toBeLessThanOrEqual(2.128);
  });
});

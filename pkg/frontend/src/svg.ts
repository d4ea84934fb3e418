/**
 * Minimal deterministic SVG assembly: plain string building with fixed
 * numeric precision, plus linear scales and tick helpers for the charts.
 */

import { ticks } from "d3-array";

export function fmt(value: number): string {
  const rounded = value.toFixed(2);
  return rounded === "-0.00" ? "0.00" : rounded;
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  const open = parts ? `<${tag} ${parts}>` : `<${tag}>`;
  if (children.length === 0) return open.replace(/>$/, "/>");
  return `${open}${children.join("")}</${tag}>`;
}

export function text(
  content: string,
  attrs: Record<string, string | number>,
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  return `<text ${parts}>${escapeXml(content)}</text>`;
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export interface LinearScale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
): LinearScale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const scale = ((value: number) =>
    r0 + ((value - d0) / span) * (r1 - r0)) as LinearScale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Rounded tick positions covering the domain (d3 tick algorithm). */
export function niceTicks(lo: number, hi: number, count: number): number[] {
  if (lo === hi) return [lo];
  return ticks(lo, hi, count);
}

export function tickLabel(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 0.01 && abs < 10000) {
    return String(Number(value.toPrecision(4)));
  }
  return value.toExponential(1);
}

/** Fixed palette so the same group order always gets the same colors. */
export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

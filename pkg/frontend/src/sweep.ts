/**
 * Sweep figures: metric means against the sweep value, one labeled curve per
 * algorithm/alpha group.  The outage kind shows PU and SU panels side by
 * side; the throughput kind shows the aggregate-throughput panel.
 */

import { SweepTable } from "./csv.js";
import { Curve, MetricName, curvesFor } from "./curves.js";
import { LinearScale, PALETTE, el, linearScale, niceTicks, text, tickLabel } from "./svg.js";

const PANEL = { width: 330, height: 300 };
const MARGIN = { left: 64, right: 16, top: 40, bottom: 52 };
const LEGEND_WIDTH = 170;

export type SweepKind = "outage" | "throughput";

export interface SweepFigureOptions {
  kind: SweepKind;
  xlabel?: string;
  title?: string;
}

interface PanelSpec {
  metric: MetricName;
  label: string;
}

const PANELS: Record<SweepKind, PanelSpec[]> = {
  outage: [
    { metric: "puOutage", label: "mean PU outage ratio" },
    { metric: "suOutage", label: "mean SU outage ratio" },
  ],
  throughput: [
    { metric: "throughputNats", label: "mean aggregate throughput (nats)" },
  ],
};

function extentOf(curves: Curve[]): { x: [number, number]; y: [number, number] } {
  let xlo = Infinity;
  let xhi = -Infinity;
  let yhi = 0;
  for (const curve of curves) {
    for (const p of curve.points) {
      xlo = Math.min(xlo, p.x);
      xhi = Math.max(xhi, p.x);
      yhi = Math.max(yhi, p.y);
    }
  }
  if (!Number.isFinite(xlo)) {
    xlo = 0;
    xhi = 1;
  }
  if (xlo === xhi) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  return { x: [xlo, xhi], y: [0, yhi > 0 ? yhi * 1.1 : 1] };
}

function panelAxes(
  sx: LinearScale,
  sy: LinearScale,
  label: string,
  xlabel: string,
): string[] {
  const parts: string[] = [];
  const x0 = sx.range[0];
  const y0 = sy.range[0];
  parts.push(el("line", {
    class: "axis", x1: x0, y1: y0, x2: sx.range[1], y2: y0,
    stroke: "#333", "stroke-width": 1,
  }));
  parts.push(el("line", {
    class: "axis", x1: x0, y1: y0, x2: x0, y2: sy.range[1],
    stroke: "#333", "stroke-width": 1,
  }));
  for (const t of niceTicks(sx.domain[0], sx.domain[1], 5)) {
    parts.push(el("line", {
      class: "tick", x1: sx(t), y1: y0, x2: sx(t), y2: y0 + 5,
      stroke: "#333", "stroke-width": 1,
    }));
    parts.push(text(tickLabel(t), {
      x: sx(t), y: y0 + 18, "text-anchor": "middle", "font-size": 11,
    }));
  }
  for (const t of niceTicks(sy.domain[0], sy.domain[1], 5)) {
    parts.push(el("line", {
      class: "tick", x1: x0 - 5, y1: sy(t), x2: x0, y2: sy(t),
      stroke: "#333", "stroke-width": 1,
    }));
    parts.push(text(tickLabel(t), {
      x: x0 - 8, y: sy(t) + 4, "text-anchor": "end", "font-size": 11,
    }));
  }
  parts.push(text(xlabel, {
    x: (x0 + sx.range[1]) / 2, y: y0 + 38, "text-anchor": "middle",
    "font-size": 12,
  }));
  parts.push(text(label, {
    x: (x0 + sx.range[1]) / 2, y: sy.range[1] - 12, "text-anchor": "middle",
    "font-size": 12,
  }));
  return parts;
}

function renderPanel(
  curves: Curve[],
  spec: PanelSpec,
  offsetX: number,
  xlabel: string,
): string {
  const { x, y } = extentOf(curves);
  const sx = linearScale(x, [offsetX + MARGIN.left, offsetX + PANEL.width - MARGIN.right]);
  const sy = linearScale(y, [MARGIN.top + PANEL.height, MARGIN.top]);
  const parts = panelAxes(sx, sy, spec.label, xlabel);
  curves.forEach((curve, k) => {
    if (curve.points.length === 0) return;
    const color = PALETTE[k % PALETTE.length];
    const coords = curve.points
      .map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    parts.push(el("polyline", {
      class: "curve",
      "data-label": curve.label,
      "data-metric": spec.metric,
      points: coords,
      fill: "none",
      stroke: color,
      "stroke-width": 1.8,
    }));
    for (const p of curve.points) {
      parts.push(el("circle", {
        class: "pt", cx: sx(p.x), cy: sy(p.y), r: 2.5, fill: color,
      }));
    }
  });
  return el("g", { class: `panel-${spec.metric}` }, parts);
}

/** Render the sweep table as a standalone SVG string. */
export function renderSweepFigure(
  table: SweepTable,
  options: SweepFigureOptions,
): string {
  const specs = PANELS[options.kind];
  const xlabel = options.xlabel ?? "sweep value";
  const width = specs.length * PANEL.width + LEGEND_WIDTH;
  const height = MARGIN.top + PANEL.height + MARGIN.bottom;
  const body: string[] = [];
  let groups: Curve[] = [];
  specs.forEach((spec, k) => {
    const curves = curvesFor(table, spec.metric);
    if (k === 0) groups = curves;
    body.push(renderPanel(curves, spec, k * PANEL.width, xlabel));
  });
  const legend = groups.map((curve, k) =>
    text(curve.label, {
      x: specs.length * PANEL.width + 14,
      y: MARGIN.top + 16 + 18 * k,
      "font-size": 12,
      fill: PALETTE[k % PALETTE.length],
    }),
  );
  body.push(el("g", { class: "legend" }, legend));
  if (options.title) {
    body.push(text(options.title, {
      x: width / 2, y: 20, "text-anchor": "middle", "font-size": 14,
    }));
  }
  return el("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    width,
    height,
    viewBox: `0 0 ${width} ${height}`,
    "font-family": "sans-serif",
  }, body) + "\n";
}

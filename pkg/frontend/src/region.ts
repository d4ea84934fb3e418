/**
 * Region figure: the protection polyhedron in the two-station interference
 * plane, its face lines, and the fixed-limit box baselines scaled from the
 * document's alpha list.
 */

import { FcirDocument, SchemaError } from "./schema.js";
import { Point2D, axisIntercept, regionGeometry } from "./geometry.js";
import { LinearScale, PALETTE, el, fmt, linearScale, niceTicks, text, tickLabel } from "./svg.js";

const WIDTH = 560;
const HEIGHT = 520;
const MARGIN = { left: 64, right: 160, top: 36, bottom: 52 };

export interface RegionFigureOptions {
  title?: string;
}

function finiteMax(values: (number | null)[]): number {
  return values.reduce<number>(
    (acc, v) => (v !== null && Number.isFinite(v) && v > acc ? v : acc),
    0,
  );
}

function dataExtent(doc: FcirDocument): number {
  // frame the region, the simple limits and the boxes; face lines beyond
  // that are clipped
  const candidates = [
    ...doc.titl,
    ...doc.itl0,
    ...Object.values(doc.boxes).flat(),
    axisIntercept(doc.a, doc.c, 0),
    axisIntercept(doc.a, doc.c, 1),
  ];
  const top = finiteMax(candidates);
  return top > 0 ? top * 1.12 : 1;
}

function polyPoints(points: Point2D[], sx: LinearScale, sy: LinearScale): string {
  return points.map((p) => `${fmt(sx(p.x))},${fmt(sy(p.y))}`).join(" ");
}

function axes(sx: LinearScale, sy: LinearScale, extent: number): string[] {
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
  for (const t of niceTicks(0, extent, 6)) {
    parts.push(el("line", {
      class: "tick", x1: sx(t), y1: y0, x2: sx(t), y2: y0 + 5,
      stroke: "#333", "stroke-width": 1,
    }));
    parts.push(text(tickLabel(t), {
      x: sx(t), y: y0 + 18, "text-anchor": "middle", "font-size": 11,
    }));
    parts.push(el("line", {
      class: "tick", x1: x0 - 5, y1: sy(t), x2: x0, y2: sy(t),
      stroke: "#333", "stroke-width": 1,
    }));
    parts.push(text(tickLabel(t), {
      x: x0 - 8, y: sy(t) + 4, "text-anchor": "end", "font-size": 11,
    }));
  }
  parts.push(text("interference at station 0 (W)", {
    x: (x0 + sx.range[1]) / 2, y: y0 + 38, "text-anchor": "middle",
    "font-size": 12,
  }));
  parts.push(text("interference at station 1 (W)", {
    x: 16, y: (y0 + sy.range[1]) / 2, "text-anchor": "middle",
    "font-size": 12,
    transform: `rotate(-90 16 ${fmt((y0 + sy.range[1]) / 2)})`,
  }));
  return parts;
}

/** Render the region document as a standalone SVG string. */
export function renderRegionFigure(
  doc: FcirDocument,
  options: RegionFigureOptions = {},
): string {
  if (doc.a.length !== 2) {
    throw new SchemaError(
      `region figures need a two-station document, got ${doc.a.length} stations`,
    );
  }
  const extent = dataExtent(doc);
  const sx = linearScale([0, extent], [MARGIN.left, WIDTH - MARGIN.right]);
  const sy = linearScale([0, extent], [HEIGHT - MARGIN.bottom, MARGIN.top]);
  const region = regionGeometry(doc.a, doc.c, extent);
  const body: string[] = [];
  const legend: string[] = [];

  body.push(el("clipPath", { id: "plot-area" }, [
    el("rect", {
      x: MARGIN.left,
      y: MARGIN.top,
      width: WIDTH - MARGIN.left - MARGIN.right,
      height: HEIGHT - MARGIN.top - MARGIN.bottom,
    }),
  ]));
  const regionAttrs: Record<string, string | number> = {
    class: "region",
    points: polyPoints(region.vertices, sx, sy),
    fill: "#aecbe8",
    "fill-opacity": 0.6,
    stroke: "none",
  };
  // full-precision axis crossings so tools can read the plotted limits back
  if (region.xIntercept !== null) {
    regionAttrs["data-x-intercept"] = String(region.xIntercept);
  }
  if (region.yIntercept !== null) {
    regionAttrs["data-y-intercept"] = String(region.yIntercept);
  }
  body.push(el("polygon", regionAttrs));

  const clipped: string[] = [];
  for (const boundary of doc.boundaries ?? []) {
    clipped.push(el("polyline", {
      class: "face",
      "data-station": String(boundary.station),
      points: polyPoints(
        boundary.points.map(([x, y]) => ({ x, y })),
        sx,
        sy,
      ),
      fill: "none",
      stroke: PALETTE[boundary.station % PALETTE.length],
      "stroke-width": 1.5,
    }));
  }

  const alphas = Object.entries(doc.boxes)
    .map(([key, corner]) => ({ alpha: Number(key), corner }))
    .sort((p, q) => p.alpha - q.alpha);
  alphas.forEach(({ alpha, corner }, k) => {
    const bx = corner[0] ?? extent;
    const by = corner[1] ?? extent;
    const color = PALETTE[(2 + k) % PALETTE.length];
    clipped.push(el("rect", {
      class: "box",
      "data-alpha": String(alpha),
      x: sx(0),
      y: sy(by),
      width: sx(bx) - sx(0),
      height: sy(0) - sy(by),
      fill: "none",
      stroke: color,
      "stroke-width": 1.5,
      "stroke-dasharray": "6 3",
    }));
    legend.push(text(`box α=${alpha}`, {
      x: WIDTH - MARGIN.right + 14,
      y: MARGIN.top + 40 + 18 * k,
      "font-size": 12,
      fill: color,
    }));
  });

  body.push(el("g", { "clip-path": "url(#plot-area)" }, clipped));
  body.push(...axes(sx, sy, extent));
  legend.unshift(text("protection region", {
    x: WIDTH - MARGIN.right + 14,
    y: MARGIN.top + 22,
    "font-size": 12,
    fill: "#4a7cb5",
  }));
  body.push(el("g", { class: "legend" }, legend));
  if (options.title) {
    body.push(text(options.title, {
      x: WIDTH / 2, y: 20, "text-anchor": "middle", "font-size": 14,
    }));
  }
  return el("svg", {
    xmlns: "http://www.w3.org/2000/svg",
    width: WIDTH,
    height: HEIGHT,
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    "font-family": "sans-serif",
  }, body) + "\n";
}

export { SchemaError, parseFcirDocument } from "./schema.js";
export type { FcirDocument, SweepRow, SummaryRow } from "./schema.js";
export { parseSweepCsv } from "./csv.js";
export type { SweepTable } from "./csv.js";
export { alphaIsSweepAxis, curvesFor } from "./curves.js";
export type { Curve, MetricName } from "./curves.js";
export { axisIntercept, regionGeometry } from "./geometry.js";
export type { Point2D, RegionGeometry } from "./geometry.js";
export { renderRegionFigure } from "./region.js";
export { renderSweepFigure } from "./sweep.js";
export type { SweepKind } from "./sweep.js";
export { run } from "./cli.js";

/**
 * Input schemas: the region document emitted by `underlaypc fcir` and the
 * two CSV layouts emitted by `underlaypc sweep`.
 */

import { z } from "zod";

/** Raised for any input that does not match the documented schemas. */
export class SchemaError extends Error {}

const finiteOrNull = z.union([z.number(), z.null()]);

const boundarySchema = z.object({
  station: z.number().int().nonnegative(),
  points: z.array(z.tuple([z.number(), z.number()])).min(2),
});

export const fcirDocumentSchema = z
  .object({
    a: z.array(z.array(z.number())).min(1),
    c: z.array(finiteOrNull).min(1),
    phi_max: z.array(finiteOrNull),
    noise: z.array(z.number()),
    titl: z.array(finiteOrNull),
    itl0: z.array(finiteOrNull),
    alphas: z.array(z.number()),
    boxes: z.record(z.string(), z.array(finiteOrNull)),
    boundaries: z.array(boundarySchema).optional(),
  })
  .refine((doc) => doc.a.length === doc.c.length, {
    message: "a and c must have one row per station",
  })
  .refine((doc) => doc.a.every((row) => row.length === doc.a.length), {
    message: "a must be square",
  });

export type FcirDocument = z.infer<typeof fcirDocumentSchema>;
export type Boundary = z.infer<typeof boundarySchema>;

/** Parse and validate a region document; throws SchemaError on mismatch. */
export function parseFcirDocument(text: string): FcirDocument {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`region document is not valid JSON: ${err}`);
  }
  const result = fcirDocumentSchema.safeParse(raw);
  if (!result.success) {
    const first = result.error.issues[0];
    throw new SchemaError(
      `region document schema mismatch: ${first.path.join(".")}: ${first.message}`,
    );
  }
  return result.data;
}

export const ROWS_COLUMNS = [
  "sweep_value",
  "snapshot",
  "algorithm",
  "alpha",
  "pu_outage",
  "su_outage",
  "admitted",
  "throughput_nats",
  "runtime_ms",
] as const;

export const SUMMARY_COLUMNS = [
  "sweep_value",
  "algorithm",
  "alpha",
  "snapshots",
  "errors",
  "mean_pu_outage",
  "mean_su_outage",
  "mean_admitted",
  "mean_throughput_nats",
] as const;

/** One per-snapshot row; metric fields are null when the snapshot errored. */
export interface SweepRow {
  sweepValue: number;
  snapshot: number;
  algorithm: string;
  alpha: number | null;
  puOutage: number | null;
  suOutage: number | null;
  admitted: number | null;
  throughputNats: number | null;
}

/** One pre-aggregated summary row (per sweep point and algorithm group). */
export interface SummaryRow {
  sweepValue: number;
  algorithm: string;
  alpha: number | null;
  snapshots: number;
  errors: number;
  meanPuOutage: number | null;
  meanSuOutage: number | null;
  meanAdmitted: number | null;
  meanThroughputNats: number | null;
}

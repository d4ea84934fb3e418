/**
 * Command line front end.
 *
 * Subcommands: `region` renders the protection-region figure from a region
 * document, `sweep` renders metric-vs-sweep figures from the sweep CSV (per
 * snapshot rows or summary layout).  Exit codes: 0 on success, 2 on usage
 * or schema problems, 1 on other failures.
 */

import { mkdirSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { SchemaError, parseFcirDocument } from "./schema.js";
import { parseSweepCsv } from "./csv.js";
import { renderRegionFigure } from "./region.js";
import { SweepKind, renderSweepFigure } from "./sweep.js";

const USAGE = `usage: underlay-plots <command> --in PATH --out PATH [options]

commands:
  region   render the protection-region figure from a region JSON document
  sweep    render sweep figures from the sweep CSV (rows or summary layout)

options:
  --in PATH       input document (region: fcir.json, sweep: CSV)
  --out PATH      output SVG file, or a directory for a default file name
  --kind KIND     sweep figure kind: outage | throughput (default outage)
  --xlabel TEXT   sweep x-axis label (default "sweep value")
  --title TEXT    figure title
`;

function resolveOut(out: string, defaultName: string): string {
  let isDir = false;
  try {
    isDir = statSync(out).isDirectory();
  } catch {
    isDir = !out.endsWith(".svg");
  }
  if (!isDir) return out;
  return join(out, defaultName);
}

function writeFigure(path: string, svg: string): void {
  mkdirSync(dirname(path) || ".", { recursive: true });
  writeFileSync(path, svg);
  console.log(path);
}

/** Run the CLI; returns the process exit code. */
export function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: "string" },
        out: { type: "string" },
        kind: { type: "string", default: "outage" },
        xlabel: { type: "string" },
        title: { type: "string" },
        help: { type: "boolean", default: false },
      },
    });
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  if (parsed.values.help) {
    console.log(USAGE);
    return 0;
  }
  const command = parsed.positionals[0];
  if (command !== "region" && command !== "sweep") {
    console.error(USAGE);
    return 2;
  }
  const inPath = parsed.values.in;
  const outPath = parsed.values.out;
  if (!inPath || !outPath) {
    console.error("usage error: --in and --out are required");
    return 2;
  }
  let content: string;
  try {
    content = readFileSync(inPath, "utf8");
  } catch (err) {
    console.error(`cannot read ${inPath}: ${(err as Error).message}`);
    return 2;
  }
  try {
    if (command === "region") {
      const doc = parseFcirDocument(content);
      const svg = renderRegionFigure(doc, { title: parsed.values.title });
      writeFigure(resolveOut(outPath, "region.svg"), svg);
    } else {
      const kind = parsed.values.kind;
      if (kind !== "outage" && kind !== "throughput") {
        console.error(`usage error: unknown sweep kind "${kind}"`);
        return 2;
      }
      const table = parseSweepCsv(content);
      const svg = renderSweepFigure(table, {
        kind: kind as SweepKind,
        xlabel: parsed.values.xlabel,
        title: parsed.values.title,
      });
      writeFigure(resolveOut(outPath, `sweep_${kind}.svg`), svg);
    }
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
  return 0;
}

if (
  process.argv[1] &&
  import.meta.url === pathToFileURL(process.argv[1]).href
) {
  process.exit(run(process.argv.slice(2)));
}

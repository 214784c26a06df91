#!/usr/bin/env node
/**
 * hillpolar-plot <kind> --input file.csv --out figure.svg [options]
 *
 * kinds: eig_sweep | projection_xy_yz | orbit_3d | apsis_curve
 * Exit codes: 0 rendered (including empty-axes for empty inputs),
 * 1 schema mismatch or bad invocation.
 */

import { writeFileSync } from "node:fs";
import { readTable, readEvents, SchemaError } from "./data.js";
import { eigSweep, projectionXyYz, orbit3d, apsisCurve, AxisRanges } from "./figures.js";

const KINDS = ["eig_sweep", "projection_xy_yz", "orbit_3d", "apsis_curve"];

interface Options {
  kind: string;
  input: string;
  out: string;
  events?: string;
  sphereRadius: number;
  ranges: AxisRanges;
}

function parseArgs(argv: string[]): Options {
  const [kind, ...rest] = argv;
  if (!kind || !KINDS.includes(kind)) {
    throw new SchemaError(`figure kind must be one of: ${KINDS.join(", ")}`);
  }
  const opts: Options = { kind, input: "", out: "", sphereRadius: 0, ranges: {} };
  for (let i = 0; i < rest.length; i += 2) {
    const key = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new SchemaError(`missing value for ${key}`);
    switch (key) {
      case "--input": opts.input = value; break;
      case "--out": opts.out = value; break;
      case "--events": opts.events = value; break;
      case "--sphere-radius": opts.sphereRadius = Number(value); break;
      case "--xmin": opts.ranges.xmin = Number(value); break;
      case "--xmax": opts.ranges.xmax = Number(value); break;
      case "--ymin": opts.ranges.ymin = Number(value); break;
      case "--ymax": opts.ranges.ymax = Number(value); break;
      default: throw new SchemaError(`unknown option ${key}`);
    }
  }
  if (!opts.input || !opts.out) {
    throw new SchemaError("--input and --out are required");
  }
  return opts;
}

export function render(opts: Options): string {
  const table = readTable(opts.input);
  switch (opts.kind) {
    case "eig_sweep": {
      const events = opts.events ? readEvents(opts.events) : [];
      return eigSweep(table, events, opts.ranges);
    }
    case "projection_xy_yz":
      return projectionXyYz(table, opts.ranges);
    case "orbit_3d":
      return orbit3d(table, opts.sphereRadius);
    case "apsis_curve":
      return apsisCurve(table, opts.ranges);
    default:
      throw new SchemaError(`unhandled kind ${opts.kind}`);
  }
}

export function main(argv: string[]): number {
  let opts: Options;
  try {
    opts = parseArgs(argv);
    const svg = render(opts);
    writeFileSync(opts.out, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`hillpolar-plot: ${err.message}\n`);
      return 1;
    }
    throw err;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}

/**
 * Readers for the hillpolar CLI file formats: comment-prefixed CSV tables
 * and bifurcation-event JSON. Column sets are validated against the schemas
 * the CLI writes, and mismatches report the offending columns.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const FAMILY_COLUMNS = [
  "h", "Q2", "P1", "Q3", "half_period_s", "period_t", "amplitude",
  "s1", "s2",
  "re_lambda_1", "re_lambda_2", "re_lambda_3", "re_lambda_4",
  "im_lambda_1", "im_lambda_2", "im_lambda_3", "im_lambda_4",
  "class", "delta_det", "residual",
] as const;

export const ORBIT_COLUMNS = ["s", "t", "q1", "q2", "q3", "p1", "p2", "p3"] as const;

export const APSIS_COLUMNS = ["h", "periapsis_km", "apoapsis_km", "class", "flag"] as const;

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
  /** "# key: value" comment headers, in order */
  meta: Map<string, string[]>;
}

export function parseTable(text: string): Table {
  const meta = new Map<string, string[]>();
  const body: string[] = [];
  for (const line of text.split(/\r?\n/)) {
    if (line.startsWith("#")) {
      const m = line.match(/^#\s*([\w-]+):\s*(.*)$/);
      if (m) {
        const list = meta.get(m[1]) ?? [];
        list.push(m[2]);
        meta.set(m[1], list);
      }
      continue;
    }
    if (line.trim().length > 0) body.push(line);
  }
  if (body.length === 0) return { columns: [], rows: [], meta };
  const parsed = Papa.parse<Record<string, string>>(body.join("\n"), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`CSV parse failure: ${parsed.errors[0].message}`);
  }
  return { columns: parsed.meta.fields ?? [], rows: parsed.data, meta };
}

export function readTable(path: string): Table {
  return parseTable(readFileSync(path, "utf8"));
}

export function requireColumns(table: Table, wanted: readonly string[]): void {
  if (table.columns.length === 0) return; // empty input renders empty axes
  const have = new Set(table.columns);
  const missing = wanted.filter((c) => !have.has(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `input columns [${table.columns.join(", ")}] missing [${missing.join(", ")}]`,
    );
  }
}

export function numbers(table: Table, column: string): number[] {
  return table.rows.map((r) => Number(r[column]));
}

export interface BifurcationEvent {
  kind: string;
  bracket: [number, number];
  resolved: boolean;
}

export function readEvents(path: string): BifurcationEvent[] {
  const data = JSON.parse(readFileSync(path, "utf8"));
  if (!Array.isArray(data.events)) {
    throw new SchemaError("events JSON lacks an 'events' array");
  }
  return data.events.map((e: Record<string, unknown>) => ({
    kind: String(e.kind),
    bracket: e.bracket as [number, number],
    resolved: Boolean(e.resolved),
  }));
}

/**
 * Reader for bsv-tunnel CSV outputs.
 *
 * Every file starts with a `# config_hash=<hex>` provenance line, then
 * a header row, then numeric rows. Schema violations raise
 * SchemaMismatch listing exactly which required columns are absent, so
 * a figure never renders from the wrong table.
 */

import { readFileSync, existsSync } from "node:fs";
import Papa from "papaparse";

export class SchemaMismatch extends Error {
  constructor(
    public readonly file: string,
    public readonly missing: string[],
    public readonly found: string[],
  ) {
    super(
      `${file}: missing column(s) [${missing.join(", ")}]; ` +
        `found [${found.join(", ")}]`,
    );
    this.name = "SchemaMismatch";
  }
}

export interface PackageCsv {
  file: string;
  configHash: string;
  columns: string[];
  rows: number[][];
  /** Column by name; the schema check guarantees presence. */
  col(name: string): number[];
}

export function readPackageCsv(file: string, required: string[]): PackageCsv {
  const text = readFileSync(file, "utf-8");
  const firstBreak = text.indexOf("\n");
  const head = firstBreak < 0 ? text : text.slice(0, firstBreak);
  if (!head.startsWith("# config_hash=")) {
    throw new SchemaMismatch(file, required, []);
  }
  const configHash = head.slice("# config_hash=".length).trim();
  const body = text.slice(firstBreak + 1);

  const parsed = Papa.parse<Record<string, number>>(body, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  const columns = (parsed.meta.fields ?? []).filter((c) => c.length > 0);
  const missing = required.filter((c) => !columns.includes(c));
  if (missing.length > 0 || parsed.data.length === 0) {
    throw new SchemaMismatch(
      file,
      missing.length > 0 ? missing : required,
      columns,
    );
  }

  const rows = parsed.data.map((rec) =>
    columns.map((c) => {
      const v = rec[c];
      return typeof v === "number" ? v : Number(v);
    }),
  );
  return {
    file,
    configHash,
    columns,
    rows,
    col(name: string): number[] {
      const k = columns.indexOf(name);
      if (k < 0) throw new SchemaMismatch(file, [name], columns);
      return rows.map((r) => r[k]!);
    },
  };
}

/**
 * Best-effort label from the CSV's .meta.json sidecar: the squeezing
 * factor of the run when present, the file stem otherwise. Labels are
 * presentation metadata; plotted values always come from CSV columns.
 */
export function seriesLabel(csv: PackageCsv): string {
  const metaPath = csv.file + ".meta.json";
  if (existsSync(metaPath)) {
    try {
      const meta = JSON.parse(readFileSync(metaPath, "utf-8"));
      const m = /^r = (.+)$/m.exec(String(meta.effective_config ?? ""));
      if (m) return `r = ${Number(m[1])}`;
    } catch {
      /* fall through to the stem */
    }
  }
  const base = csv.file.split("/").pop() ?? csv.file;
  return base.replace(/\.csv$/, "");
}

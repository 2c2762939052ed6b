import { writeFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { SchemaMismatch, readPackageCsv, seriesLabel } from "../src/csv.js";
import { golden, tmpDir } from "./helpers.js";

describe("readPackageCsv", () => {
  it("reads a golden scan file with hash, columns, and numeric rows", () => {
    const file = golden("scan_r18/tunnel_scan.csv");
    const csv = readPackageCsv(file, ["X_i", "rho", "P", "rho_P"]);
    expect(csv.file).toBe(file);
    expect(csv.configHash).toMatch(/^[0-9a-f]{16}$/);
    expect(csv.columns).toContain("X_i");
    expect(csv.columns).toContain("converged");
    expect(csv.rows.length).toBe(61);
    for (const row of csv.rows) {
      expect(row.length).toBe(csv.columns.length);
      for (const v of row) expect(typeof v).toBe("number");
    }
    // col() agrees with the row matrix
    const xi = csv.col("X_i");
    expect(xi.length).toBe(61);
    expect(xi[0]).toBe(csv.rows[0]![csv.columns.indexOf("X_i")]);
    // tunnel_scan nodes are written in ascending X_i
    for (let i = 1; i < xi.length; i++) expect(xi[i]!).toBeGreaterThan(xi[i - 1]!);
  });

  it("lists exactly the missing columns on a schema mismatch", () => {
    const file = golden("scan_r18/tunnel_scan.csv");
    let caught: SchemaMismatch | undefined;
    try {
      readPackageCsv(file, ["X_i", "no_such_col", "also_missing"]);
    } catch (err) {
      caught = err as SchemaMismatch;
    }
    expect(caught).toBeInstanceOf(SchemaMismatch);
    expect(caught!.name).toBe("SchemaMismatch");
    expect(caught!.missing).toEqual(["no_such_col", "also_missing"]);
    expect(caught!.found).toContain("X_i");
    expect(caught!.message).toContain("no_such_col");
  });

  it("rejects a file without the config_hash header line", () => {
    const dir = tmpDir();
    const file = join(dir, "naked.csv");
    writeFileSync(file, "a,b\n1,2\n");
    expect(() => readPackageCsv(file, ["a"])).toThrow(SchemaMismatch);
  });

  it("rejects a file with a header row but zero data rows", () => {
    const dir = tmpDir();
    const file = join(dir, "empty.csv");
    writeFileSync(file, "# config_hash=0123456789abcdef\na,b\n");
    expect(() => readPackageCsv(file, ["a", "b"])).toThrow(SchemaMismatch);
  });

  it("col() rejects unknown names even after a passing schema check", () => {
    const csv = readPackageCsv(golden("ptot_r18/ptot_scan.csv"), ["r"]);
    expect(() => csv.col("bogus")).toThrow(SchemaMismatch);
  });
});

describe("seriesLabel", () => {
  it("labels a run from its sidecar squeezing factor", () => {
    const csv = readPackageCsv(golden("traj_r1/trajectories.csv"), ["t"]);
    expect(seriesLabel(csv)).toBe("r = 1");
    const csv3 = readPackageCsv(golden("traj_r3/trajectories.csv"), ["t"]);
    expect(seriesLabel(csv3)).toBe("r = 3");
  });

  it("falls back to the file stem without a sidecar", () => {
    const dir = tmpDir();
    const file = join(dir, "orphan.csv");
    writeFileSync(file, "# config_hash=0123456789abcdef\nt\n1.0\n");
    const csv = readPackageCsv(file, ["t"]);
    expect(seriesLabel(csv)).toBe("orphan");
  });
});

import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { SchemaMismatch } from "../src/csv.js";
import { FIGURE_IDS, FigureId, FigureJob } from "../src/figures.js";
import { canonicalSvg, renderJob, renderToSvg } from "../src/render.js";
import { main } from "../src/cli.js";
import { GOLDEN_INPUTS, golden, tmpDir } from "./helpers.js";

function job(figureId: FigureId, output = "/dev/null"): FigureJob {
  return {
    figureId,
    inputs: GOLDEN_INPUTS[figureId]!,
    output,
    width: 900,
    height: 600,
  };
}

describe("SVG rendering", () => {
  it.each(FIGURE_IDS)("%s renders to SVG from the golden CSVs", (id) => {
    const { svg, log } = renderToSvg(job(id));
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("</svg>");
    expect(svg.length).toBeGreaterThan(2000);
    expect(log.figure_id).toBe(id);
    expect(log.inputs.length).toBe(GOLDEN_INPUTS[id]!.length);
    for (const input of log.inputs) {
      expect(input.config_hash).toMatch(/^[0-9a-f]{16}$/);
      expect(input.columns.length).toBeGreaterThan(0);
    }
  });

  it("is deterministic: repeated renders are byte-identical", () => {
    const a = renderToSvg(job("fig2")).svg;
    const b = renderToSvg(job("fig2")).svg;
    expect(a).toBe(b);
  });

  it("canonicalSvg renumbers zrender's process-global counters", () => {
    const raw =
      '<g clip-path="url(#zr7-c0)"/><path class="zr7-cls-41"/>' +
      "<style>.zr7-cls-41:hover{} .zr7-cls-42:hover{}</style>";
    expect(canonicalSvg(raw)).toBe(
      '<g clip-path="url(#zr-c0)"/><path class="zr-cls-0"/>' +
        "<style>.zr-cls-0:hover{} .zr-cls-1:hover{}</style>",
    );
  });

  it("renderJob writes the SVG and a job log with provenance", () => {
    const dir = tmpDir();
    const out = join(dir, "fig3.svg");
    const log = renderJob(job("fig3", out));
    expect(existsSync(out)).toBe(true);
    expect(readFileSync(out, "utf-8").startsWith("<svg")).toBe(true);

    const onDisk = JSON.parse(readFileSync(out + ".job.json", "utf-8"));
    expect(onDisk).toEqual(JSON.parse(JSON.stringify(log)));
    expect(onDisk.provenance["P_tot"]).toContain("ptot_scan.csv:P_tot");

    const again = join(dir, "fig3b.svg");
    renderJob(job("fig3", again));
    expect(readFileSync(again, "utf-8")).toBe(readFileSync(out, "utf-8"));
  });
});

describe("command line", () => {
  it("renders a figure end to end and reports the output path", () => {
    const dir = tmpDir();
    const out = join(dir, "cli_fig4.svg");
    const code = main([
      "fig4",
      "--in",
      golden("exit_r12/exit_traj.csv"),
      "--out",
      out,
    ]);
    expect(code).toBe(0);
    expect(readFileSync(out, "utf-8").startsWith("<svg")).toBe(true);
    expect(existsSync(out + ".job.json")).toBe(true);
  });

  it("accepts multiple --in files in schema order", () => {
    const dir = tmpDir();
    const out = join(dir, "cli_fig2.svg");
    const code = main([
      "fig2",
      "--in",
      golden("scan_r18/tunnel_scan.csv"),
      "--in",
      golden("ptot_r18/ptot_scan.csv"),
      "--out",
      out,
      "--width",
      "640",
      "--height",
      "480",
    ]);
    expect(code).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg).toContain('width="640"');
  });

  it("surfaces schema violations instead of rendering", () => {
    const dir = tmpDir();
    expect(() =>
      main([
        "fig3",
        "--in",
        golden("exit_r12/exit_traj.csv"),
        "--out",
        join(dir, "bad.svg"),
      ]),
    ).toThrow(SchemaMismatch);
    expect(existsSync(join(dir, "bad.svg"))).toBe(false);
  });

  it("rejects unknown figure ids and missing options", () => {
    expect(() => main(["fig9", "--in", "x.csv", "--out", "y.svg"])).toThrow();
    expect(() => main(["fig3", "--out", "y.svg"])).toThrow(/in/);
  });
});

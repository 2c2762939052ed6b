/**
 * Server-side SVG rendering and the job log.
 *
 * Rendering is a pure function of CSV bytes and style: echarts runs in
 * SSR mode with animation off, and the only run-to-run variation in
 * its output is zrender's process-global id counters (chart instance
 * prefix and CSS class numbers). canonicalSvg renumbers those, so
 * identical inputs produce byte-identical SVG. The job log written
 * next to the image records input provenance (per-file config hashes
 * and the series-to-column map), which is how "no recomputed physics"
 * stays auditable.
 */

import { writeFileSync } from "node:fs";
import * as echarts from "echarts";
import { BuiltFigure, FigureJob, buildFigure } from "./figures.js";

export interface JobLog {
  figure_id: string;
  output: string;
  width: number;
  height: number;
  inputs: { file: string; config_hash: string; columns: string[] }[];
  provenance: Record<string, string>;
}

/**
 * Renumber zrender's instance-scoped ids (`zr<N>-...` clip paths,
 * `zr<N>-cls-<M>` hover classes) to a fixed sequence. The counters
 * behind them are global per process, so without this pass the second
 * render of the same job would differ byte-wise from the first.
 */
export function canonicalSvg(svg: string): string {
  const renamed = svg.replace(/zr\d+-/g, "zr-");
  const cls = new Map<string, string>();
  return renamed.replace(/zr-cls-\d+/g, (tok) => {
    if (!cls.has(tok)) cls.set(tok, `zr-cls-${cls.size}`);
    return cls.get(tok)!;
  });
}

export function renderToSvg(job: FigureJob): { svg: string; log: JobLog } {
  const built: BuiltFigure = buildFigure(job);
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: job.width,
    height: job.height,
  });
  try {
    chart.setOption(built.option);
    const svg = canonicalSvg(chart.renderToSVGString());
    return { svg, log: jobLog(job, built) };
  } finally {
    chart.dispose();
  }
}

export function renderJob(job: FigureJob): JobLog {
  const { svg, log } = renderToSvg(job);
  writeFileSync(job.output, svg, "utf-8");
  writeFileSync(job.output + ".job.json", JSON.stringify(log, null, 2) + "\n");
  return log;
}

function jobLog(job: FigureJob, built: BuiltFigure): JobLog {
  return {
    figure_id: job.figureId,
    output: job.output,
    width: job.width,
    height: job.height,
    inputs: built.csvs.map((c) => ({
      file: c.file,
      config_hash: c.configHash,
      columns: c.columns,
    })),
    provenance: built.provenance,
  };
}

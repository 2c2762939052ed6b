/**
 * Option builders for the six figures.
 *
 * Each builder maps already-validated CSV tables to an echarts option
 * plus a provenance record tying every plotted series to its source
 * columns. No physics is recomputed here; the only arithmetic is axis
 * transforms (sigma-normalized X, log scaling, positivity filtering
 * for log axes).
 */

import type { EChartsOption, SeriesOption } from "echarts";
import { PackageCsv, readPackageCsv, seriesLabel } from "./csv.js";

export type FigureId = "fig1b" | "fig1c" | "fig1d" | "fig2" | "fig3" | "fig4";

export const FIGURE_IDS: FigureId[] = [
  "fig1b",
  "fig1c",
  "fig1d",
  "fig2",
  "fig3",
  "fig4",
];

export interface FigureJob {
  figureId: FigureId;
  inputs: string[];
  output: string;
  width: number;
  height: number;
}

export interface BuiltFigure {
  option: EChartsOption;
  /** series/decoration name -> "file.csv:column" provenance */
  provenance: Record<string, string>;
  csvs: PackageCsv[];
}

/** Required columns per input position, by figure. */
const SCHEMAS: Record<FigureId, { min: number; max: number; cols: string[][] }> =
  {
    fig1b: { min: 1, max: 8, cols: [["t", "realization_id", "P"]] },
    fig1c: { min: 1, max: 1, cols: [["t", "X", "P"]] },
    fig1d: {
      min: 2,
      max: 2,
      cols: [
        ["t", "X", "rho"],
        ["t", "realization_id", "X"],
      ],
    },
    fig2: {
      min: 2,
      max: 2,
      cols: [
        ["X_i", "rho", "P", "rho_P"],
        ["r", "sigma", "X_peak"],
      ],
    },
    fig3: { min: 1, max: 1, cols: [["r", "gamma_peak", "P_tot"]] },
    fig4: { min: 1, max: 1, cols: [["level_l", "t", "x"]] },
  };

const PALETTE = [
  "#4e79a7",
  "#e15759",
  "#59a14f",
  "#f28e2b",
  "#b07aa1",
  "#76b7b2",
  "#9c755f",
  "#bab0ac",
];

function baseOption(title: string): EChartsOption {
  return {
    animation: false,
    color: PALETTE,
    title: { text: title, left: "center", textStyle: { fontSize: 14 } },
    grid: { left: 70, right: 30, top: 50, bottom: 55 },
    textStyle: { fontFamily: "sans-serif" },
  };
}

function axis(name: string, extra: object = {}): object {
  return { type: "value", name, nameLocation: "middle", nameGap: 35, ...extra };
}

/** Drop rows whose y is non-finite or (for log axes) non-positive. */
function finitePairs(
  xs: number[],
  ys: number[],
  positive = false,
): [number, number][] {
  const out: [number, number][] = [];
  for (let i = 0; i < ys.length; i++) {
    const x = xs[i]!;
    const y = ys[i]!;
    if (!Number.isFinite(x) || !Number.isFinite(y)) continue;
    if (positive && y <= 0) continue;
    out.push([x, y]);
  }
  return out;
}

export function buildFigure(job: FigureJob): BuiltFigure {
  const schema = SCHEMAS[job.figureId];
  if (job.inputs.length < schema.min || job.inputs.length > schema.max) {
    throw new Error(
      `${job.figureId} takes ${schema.min}` +
        (schema.max > schema.min ? `..${schema.max}` : "") +
        ` input CSV(s), got ${job.inputs.length}`,
    );
  }
  const csvs = job.inputs.map((f, i) =>
    readPackageCsv(f, schema.cols[Math.min(i, schema.cols.length - 1)]!),
  );
  const build = BUILDERS[job.figureId];
  const { option, provenance } = build(csvs);
  return { option, provenance, csvs };
}

type Builder = (csvs: PackageCsv[]) => {
  option: EChartsOption;
  provenance: Record<string, string>;
};

/** P(t) of the pinned realization (id 0), one curve per input run. */
function fig1b(csvs: PackageCsv[]) {
  const provenance: Record<string, string> = {};
  const series: SeriesOption[] = csvs.map((csv) => {
    const ids = csv.col("realization_id");
    const ts = csv.col("t");
    const ps = csv.col("P");
    const data: [number, number][] = [];
    for (let i = 0; i < ids.length; i++) {
      if (ids[i] === 0) data.push([ts[i]!, ps[i]!]);
    }
    const label = seriesLabel(csv);
    provenance[label] = `${csv.file}:t,P (realization_id = 0)`;
    return { name: label, type: "line", showSymbol: false, data };
  });
  const option: EChartsOption = {
    ...baseOption("Field quadrature P(t) of the pinned realization"),
    legend: { top: 24 },
    xAxis: axis("t (a.u.)"),
    yAxis: axis("P"),
    series,
  };
  return { option, provenance };
}

/** Phase-space portrait (X, P) of one realization. */
function fig1c(csvs: PackageCsv[]) {
  const csv = csvs[0]!;
  const data = finitePairs(csv.col("X"), csv.col("P"));
  const provenance = { portrait: `${csv.file}:X,P` };
  const option: EChartsOption = {
    ...baseOption("Phase-space portrait"),
    xAxis: axis("X"),
    yAxis: axis("P"),
    series: [
      { name: "portrait", type: "line", showSymbol: false, data },
    ],
  };
  return { option, provenance };
}

/** Density rho(X, t) as a colored grid plus trajectory flow lines,
 * time running upward so the panel shares its X axis with fig1c. */
function fig1d(csvs: PackageCsv[]) {
  const grid = csvs[0]!;
  const traj = csvs[1]!;
  const gx = grid.col("X");
  const gt = grid.col("t");
  const gr = grid.col("rho");
  const cells: [number, number, number][] = gx.map((x, i) => [
    x,
    gt[i]!,
    gr[i]!,
  ]);
  const xs = Array.from(new Set(gx)).sort((a, b) => a - b);
  const ts = Array.from(new Set(gt)).sort((a, b) => a - b);
  const pitchX = xs.length > 1 ? xs[1]! - xs[0]! : 1;
  const pitchT = ts.length > 1 ? ts[1]! - ts[0]! : 1;

  const ids = traj.col("realization_id");
  const tx = traj.col("X");
  const tt = traj.col("t");
  const byId = new Map<number, [number, number][]>();
  for (let i = 0; i < ids.length; i++) {
    const id = ids[i]!;
    if (!byId.has(id)) byId.set(id, []);
    byId.get(id)!.push([tx[i]!, tt[i]!]);
  }
  const lines: SeriesOption[] = [...byId.keys()]
    .sort((a, b) => a - b)
    .map((id) => ({
      name: `trajectory ${id}`,
      type: "line",
      showSymbol: false,
      lineStyle: { width: 1, color: "#222222" },
      data: byId.get(id)!,
      z: 3,
    }));

  const provenance: Record<string, string> = {
    density: `${grid.file}:X,t,rho`,
    trajectories: `${traj.file}:X,t per realization_id`,
  };
  const option: EChartsOption = {
    ...baseOption("Quadrature density and flow lines"),
    visualMap: {
      min: 0,
      max: Math.max(...gr),
      calculable: false,
      orient: "vertical",
      right: 0,
      top: "middle",
      inRange: { color: ["#0c0c3a", "#4464ad", "#7fc8a9", "#f5e663"] },
      seriesIndex: 0,
      text: ["rho", ""],
    },
    grid: { left: 70, right: 90, top: 50, bottom: 55 },
    xAxis: axis("X"),
    yAxis: axis("t (a.u.)"),
    series: [
      {
        name: "density",
        type: "scatter",
        symbol: "rect",
        symbolSize: [4, 4],
        data: cells,
        large: true,
        silent: true,
        z: 1,
      },
      ...lines,
    ],
  };
  // keep the cell pitch in the log for renderers that rescale
  provenance["density_cell_pitch"] = `${pitchX} x ${pitchT}`;
  return { option, provenance };
}

/** rho, P, and rho * P versus X_i in sigma units, log ordinate, with
 * the integral region shaded and the dominant realization marked. */
function fig2(csvs: PackageCsv[]) {
  const scan = csvs[0]!;
  const peak = csvs[1]!;
  if (peak.rows.length !== 1) {
    throw new Error(
      `fig2 needs a single-row squeezing-scan CSV naming this run's ` +
        `X_peak and sigma; got ${peak.rows.length} rows (re-export with ` +
        `r_list set to the matching r)`,
    );
  }
  const sigma = peak.col("sigma")[0]!;
  const xPeak = peak.col("X_peak")[0]!;
  if (!(sigma > 0)) throw new Error(`fig2: sigma must be > 0, got ${sigma}`);

  const xi = scan.col("X_i").map((x) => x / sigma);
  const rho = scan.col("rho");
  const prob = scan.col("P");
  const rhoP = scan.col("rho_P");
  const xPeakSig = xPeak / sigma;

  // marker y: the weighted-probability value at the node nearest X_peak
  let nearest = 0;
  for (let i = 1; i < xi.length; i++) {
    if (Math.abs(xi[i]! - xPeakSig) < Math.abs(xi[nearest]! - xPeakSig))
      nearest = i;
  }

  const provenance: Record<string, string> = {
    rho: `${scan.file}:rho vs X_i/sigma`,
    P: `${scan.file}:P vs X_i/sigma`,
    "rho P": `${scan.file}:rho_P vs X_i/sigma`,
    X_peak: `${peak.file}:X_peak / ${peak.file}:sigma`,
    "X_peak marker y": `${scan.file}:rho_P at nearest node`,
    sigma: `${peak.file}:sigma`,
  };
  const option: EChartsOption = {
    ...baseOption(`Realization weighting (r = ${peak.col("r")[0]})`),
    legend: { top: 24 },
    xAxis: axis("X_i / sigma"),
    yAxis: { type: "log", name: "value", nameLocation: "middle", nameGap: 45 },
    series: [
      {
        name: "rho",
        type: "line",
        showSymbol: false,
        data: finitePairs(xi, rho, true),
      },
      {
        name: "P",
        type: "line",
        showSymbol: false,
        data: finitePairs(xi, prob, true),
      },
      {
        name: "rho P",
        type: "line",
        showSymbol: false,
        areaStyle: { opacity: 0.25 },
        data: finitePairs(xi, rhoP, true),
        markLine: {
          symbol: "none",
          lineStyle: { type: "dashed", color: "#7b2d8b" },
          label: { formatter: "X_peak" },
          data: [{ xAxis: xPeakSig }],
        },
      },
      {
        name: "X_peak",
        type: "scatter",
        symbol: "diamond",
        symbolSize: 12,
        itemStyle: { color: "#7b2d8b" },
        data: [[xPeakSig, rhoP[nearest]!]],
      },
    ],
  };
  return { option, provenance };
}

/** Total tunneling probability against the effective adiabaticity
 * parameter; gamma decreases to the right, so squeezing increases
 * left-to-right. */
function fig3(csvs: PackageCsv[]) {
  const csv = csvs[0]!;
  const gamma = csv.col("gamma_peak");
  const ptot = csv.col("P_tot");
  const rs = csv.col("r");
  const data = finitePairs(gamma, ptot, true);
  const labels = data.map((pt, i) => ({
    value: pt,
    label: i % 2 === 0 ? { show: true, formatter: `r=${rs[i]}` } : undefined,
  }));
  const provenance: Record<string, string> = {
    P_tot: `${csv.file}:P_tot vs gamma_peak`,
    "point labels": `${csv.file}:r`,
  };
  const option: EChartsOption = {
    ...baseOption("Total tunneling probability vs effective gamma"),
    xAxis: {
      type: "log",
      name: "gamma_peak",
      nameLocation: "middle",
      nameGap: 35,
      inverse: true,
    },
    yAxis: { type: "log", name: "P_tot", nameLocation: "middle", nameGap: 50 },
    series: [
      {
        name: "P_tot",
        type: "line",
        symbol: "circle",
        symbolSize: 7,
        label: { position: "top", fontSize: 10 },
        data: labels as never,
      },
    ],
  };
  return { option, provenance };
}

/** Released-electron fan: position vs time, one line per level. */
function fig4(csvs: PackageCsv[]) {
  const csv = csvs[0]!;
  const lv = csv.col("level_l");
  const ts = csv.col("t");
  const xs = csv.col("x");
  const byLevel = new Map<number, [number, number][]>();
  for (let i = 0; i < lv.length; i++) {
    const l = lv[i]!;
    if (!byLevel.has(l)) byLevel.set(l, []);
    byLevel.get(l)!.push([ts[i]!, xs[i]!]);
  }
  const levels = [...byLevel.keys()].sort((a, b) => a - b);
  const series: SeriesOption[] = levels.map((l) => ({
    name: `level ${l}`,
    type: "line",
    showSymbol: false,
    lineStyle: { width: 1.2 },
    data: byLevel.get(l)!,
  }));
  const provenance: Record<string, string> = {
    fan: `${csv.file}:t,x grouped by level_l`,
  };
  const option: EChartsOption = {
    ...baseOption("Released electron trajectories"),
    xAxis: axis("t (a.u.)"),
    yAxis: axis("x (bohr)"),
    series,
  };
  return { option, provenance };
}

const BUILDERS: Record<FigureId, Builder> = {
  fig1b,
  fig1c,
  fig1d,
  fig2,
  fig3,
  fig4,
};

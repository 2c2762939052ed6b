export { PackageCsv, SchemaMismatch, readPackageCsv, seriesLabel } from "./csv.js";
export {
  BuiltFigure,
  FIGURE_IDS,
  FigureId,
  FigureJob,
  buildFigure,
} from "./figures.js";
export { JobLog, renderJob, renderToSvg } from "./render.js";

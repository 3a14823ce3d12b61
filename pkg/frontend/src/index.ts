export { readCsv, numberField } from "./csv.js";
export type { RawRow } from "./csv.js";
export { SUMMARY_COLUMNS, loadSummary, sweepCurves } from "./summary.js";
export type { SummaryRow, SweepCurve } from "./summary.js";
export {
  TRACE_COLUMNS,
  loadTrace,
  movingAverage,
  episodeSteps,
  traceLabel,
  convergenceCurves,
} from "./trace.js";
export type { TraceRow, Curve } from "./trace.js";
export { escapeXml, niceTicks, renderLineChart } from "./svg.js";
export type { Band, LineSeries, ChartOptions } from "./svg.js";
export {
  ALGO_COLORS,
  seriesColor,
  renderSweep,
  plotSweep,
  renderConvergence,
  plotConvergence,
} from "./plots.js";
export type { SweepFigureSpec, ConvergenceFigureSpec } from "./plots.js";
export { runCli } from "./cli.js";

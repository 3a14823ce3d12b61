/**
 * High-level figure operations. Each reads CSVs emitted by the
 * experiment harness, renders an SVG string, and writes it to the
 * requested path. Inputs are never modified, so reruns are idempotent.
 */

import { writeFileSync } from "fs";
import { loadSummary, sweepCurves } from "./summary.js";
import { convergenceCurves } from "./trace.js";
import { renderLineChart, LineSeries } from "./svg.js";

/** Stable colors for the known algorithms; anything else cycles the palette. */
export const ALGO_COLORS: Record<string, string> = {
  td3: "#4361ee",
  ddpg: "#e63946",
  ao: "#2d6a4f",
  "iwf-random": "#f77f00",
};

const PALETTE = [
  "#4361ee",
  "#e63946",
  "#2d6a4f",
  "#f77f00",
  "#7209b7",
  "#118ab2",
  "#9d4edd",
  "#6c757d",
];

export function seriesColor(label: string, index: number): string {
  return ALGO_COLORS[label] ?? PALETTE[index % PALETTE.length];
}

export interface SweepFigureSpec {
  summaryPath: string;
  outPath: string;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

export interface ConvergenceFigureSpec {
  tracePaths: string[];
  outPath: string;
  window?: number;
  xLabel?: string;
  yLabel?: string;
  title?: string;
}

/**
 * Render a sweep figure: one line per algorithm with the seed mean and
 * a +-1 std band, point markers at the swept values.
 */
export function renderSweep(spec: SweepFigureSpec): string {
  const curves = sweepCurves(loadSummary(spec.summaryPath));
  const series: LineSeries[] = curves.map((curve, i) => ({
    label: curve.label,
    color: seriesColor(curve.label, i),
    x: curve.x,
    y: curve.mean,
    markers: true,
    band: {
      lower: curve.mean.map((m, j) => m - curve.std[j]),
      upper: curve.mean.map((m, j) => m + curve.std[j]),
    },
  }));
  const xLabel = spec.xLabel ?? "sweep value";
  return renderLineChart({
    title: spec.title ?? `sum rate vs ${xLabel}`,
    xLabel,
    yLabel: spec.yLabel ?? "sum rate (bits/s/Hz)",
    series,
  });
}

export function plotSweep(spec: SweepFigureSpec): string {
  writeFileSync(spec.outPath, renderSweep(spec));
  return spec.outPath;
}

/**
 * Render a convergence figure: one smoothed reward curve per trace
 * file. The smoothing window defaults to each trace's first-episode
 * step count.
 */
export function renderConvergence(spec: ConvergenceFigureSpec): string {
  const curves = convergenceCurves(spec.tracePaths, spec.window);
  const series: LineSeries[] = curves.map((curve, i) => ({
    label: curve.label,
    color: seriesColor(curve.label, i),
    x: curve.x,
    y: curve.y,
  }));
  return renderLineChart({
    title: spec.title ?? "training reward, moving average",
    xLabel: spec.xLabel ?? "step",
    yLabel: spec.yLabel ?? "sum rate (bits/s/Hz)",
    series,
  });
}

export function plotConvergence(spec: ConvergenceFigureSpec): string {
  writeFileSync(spec.outPath, renderConvergence(spec));
  return spec.outPath;
}

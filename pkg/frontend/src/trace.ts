/**
 * Reward traces: parsing, moving averages, and window inference.
 */

import { basename, dirname, extname } from "path";
import { numberField, readCsv } from "./csv.js";

export const TRACE_COLUMNS = ["episode", "step", "reward"] as const;

export interface TraceRow {
  episode: number;
  step: number;
  reward: number;
}

export interface Curve {
  label: string;
  x: number[];
  y: number[];
}

export function loadTrace(path: string): TraceRow[] {
  const raw = readCsv(path, TRACE_COLUMNS);
  return raw.map((row, i) => {
    const line = i + 2;
    return {
      episode: numberField(row, "episode", path, line),
      step: numberField(row, "step", path, line),
      reward: numberField(row, "reward", path, line),
    };
  });
}

/**
 * Trailing moving average: element i is the mean of the last `window`
 * values up to and including i (fewer near the start). Window 1 returns
 * the input unchanged.
 */
export function movingAverage(values: number[], window: number): number[] {
  if (!Number.isInteger(window) || window < 1) {
    throw new Error(`moving-average window must be a positive integer, got ${window}`);
  }
  return values.map((_, i) => {
    const start = Math.max(0, i - window + 1);
    let acc = 0;
    for (let j = start; j <= i; j++) acc += values[j];
    return acc / (i - start + 1);
  });
}

/** Steps recorded for the leading episode; the default smoothing window. */
export function episodeSteps(rows: TraceRow[]): number {
  let count = 0;
  while (count < rows.length && rows[count].episode === rows[0].episode) {
    count++;
  }
  return count;
}

/**
 * Label a trace by its file stem, or by its run directory when the stem
 * is just "trace" (the harness names every per-job file trace.csv).
 */
export function traceLabel(path: string): string {
  const stem = basename(path, extname(path));
  if (stem !== "trace") {
    return stem;
  }
  const parent = basename(dirname(path));
  return parent === "" || parent === "." ? stem : parent;
}

/**
 * Load each trace and smooth it. One curve per input path; x is the
 * 1-based global step index. Duplicate labels get a numeric suffix so
 * the legend stays unambiguous.
 */
export function convergenceCurves(paths: string[], window?: number): Curve[] {
  if (paths.length === 0) {
    throw new Error("no trace files given");
  }
  if (window !== undefined && (!Number.isInteger(window) || window < 1)) {
    throw new Error(`moving-average window must be a positive integer, got ${window}`);
  }
  const labels = dedupe(paths.map(traceLabel));
  return paths.map((path, i) => {
    const rows = loadTrace(path);
    const w = window ?? episodeSteps(rows);
    const y = movingAverage(rows.map((r) => r.reward), w);
    const x = rows.map((_, j) => j + 1);
    return { label: labels[i], x, y };
  });
}

function dedupe(labels: string[]): string[] {
  const seen = new Map<string, number>();
  return labels.map((label) => {
    const count = seen.get(label) ?? 0;
    seen.set(label, count + 1);
    return count === 0 ? label : `${label} (${count + 1})`;
  });
}

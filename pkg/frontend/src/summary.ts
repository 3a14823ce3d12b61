/**
 * Sweep summaries: final rates grouped by algorithm and sweep value.
 */

import { numberField, readCsv } from "./csv.js";

export const SUMMARY_COLUMNS = [
  "sweep_value",
  "algo",
  "seed",
  "final_rate",
  "wall_s",
] as const;

export interface SummaryRow {
  sweepValue: number;
  algo: string;
  seed: number;
  finalRate: number;
}

/** One plotted line: per-sweep-value seed statistics for one algorithm. */
export interface SweepCurve {
  label: string;
  x: number[];
  mean: number[];
  std: number[];
}

export function loadSummary(path: string): SummaryRow[] {
  const raw = readCsv(path, SUMMARY_COLUMNS);
  return raw.map((row, i) => {
    // header occupies line 1, so data row i sits on line i + 2
    const line = i + 2;
    const algo = (row.algo ?? "").trim();
    if (algo === "") {
      throw new Error(`${path}: line ${line}: empty algo`);
    }
    return {
      sweepValue: numberField(row, "sweep_value", path, line),
      algo,
      seed: numberField(row, "seed", path, line),
      finalRate: numberField(row, "final_rate", path, line),
    };
  });
}

/**
 * Collapse summary rows into one curve per algorithm.
 *
 * Each curve carries the seed mean and population standard deviation of
 * final_rate at every sweep value that algorithm was run at, sorted by
 * sweep value. Algorithms are ordered alphabetically so colors and
 * legend order stay stable across reruns.
 */
export function sweepCurves(rows: SummaryRow[]): SweepCurve[] {
  const byAlgo = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    let points = byAlgo.get(row.algo);
    if (!points) {
      points = new Map();
      byAlgo.set(row.algo, points);
    }
    let rates = points.get(row.sweepValue);
    if (!rates) {
      rates = [];
      points.set(row.sweepValue, rates);
    }
    rates.push(row.finalRate);
  }
  const labels = [...byAlgo.keys()].sort();
  return labels.map((label) => {
    const points = byAlgo.get(label)!;
    const x = [...points.keys()].sort((a, b) => a - b);
    const mean = x.map((v) => average(points.get(v)!));
    const std = x.map((v, i) => {
      const rates = points.get(v)!;
      const variance = average(rates.map((r) => (r - mean[i]) ** 2));
      return Math.sqrt(variance);
    });
    return { label, x, mean, std };
  });
}

function average(values: number[]): number {
  return values.reduce((acc, v) => acc + v, 0) / values.length;
}

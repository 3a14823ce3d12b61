/**
 * Command line entry: `plot sweep ...` and `plot convergence ...`
 * render one SVG per invocation from harness CSV outputs.
 */

import yargs from "yargs";
import { plotConvergence, plotSweep } from "./plots.js";

/** Run the CLI against argv (no program name). Returns the exit code. */
export function runCli(argv: string[]): number {
  try {
    yargs(argv)
      .scriptName("plot")
      .usage("$0 <command> [options]")
      .command(
        "sweep",
        "sum rate vs sweep value, mean and std band across seeds",
        (y) =>
          y
            .option("summary", {
              type: "string",
              demandOption: true,
              describe: "summary.csv emitted by a harness sweep",
            })
            .option("out", {
              type: "string",
              demandOption: true,
              describe: "output SVG path",
            })
            .option("x-label", { type: "string", describe: "x axis label" })
            .option("title", { type: "string", describe: "figure title" }),
        (args) => {
          const out = plotSweep({
            summaryPath: args.summary,
            outPath: args.out,
            xLabel: args["x-label"],
            title: args.title,
          });
          console.log(out);
        }
      )
      .command(
        "convergence",
        "per-episode moving-average reward, one curve per trace",
        (y) =>
          y
            .option("traces", {
              type: "string",
              array: true,
              demandOption: true,
              describe: "trace.csv files, one curve each",
            })
            .option("out", {
              type: "string",
              demandOption: true,
              describe: "output SVG path",
            })
            .option("window", {
              type: "number",
              describe: "moving-average window (default: one episode's steps)",
            })
            .option("title", { type: "string", describe: "figure title" }),
        (args) => {
          const out = plotConvergence({
            tracePaths: args.traces,
            outPath: args.out,
            window: args.window,
            title: args.title,
          });
          console.log(out);
        }
      )
      .demandCommand(1, "specify a command: sweep or convergence")
      .strict()
      .exitProcess(false)
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseSync();
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
  return 0;
}

#!/usr/bin/env node
/**
 * figure-kit <figure_id> --in <csv...> --out <img>
 *
 * Exit codes: 0 rendered, 2 schema or usage error, 1 anything else.
 */

import yargs from "yargs";
import { hideBin } from "yargs/helpers";
import { SchemaMismatch } from "./csv.js";
import { FIGURE_IDS, FigureId } from "./figures.js";
import { renderJob } from "./render.js";

export function main(argv: string[]): number {
  const args = yargs(argv)
    .scriptName("figure-kit")
    .command("$0 <figure_id>", "render one figure from bsv-tunnel CSVs")
    .positional("figure_id", { choices: FIGURE_IDS, demandOption: true })
    .option("in", {
      type: "string",
      array: true,
      demandOption: true,
      describe: "input CSV path(s), order per figure schema",
    })
    .option("out", {
      type: "string",
      demandOption: true,
      describe: "output SVG path",
    })
    .option("width", { type: "number", default: 900 })
    .option("height", { type: "number", default: 600 })
    .strict()
    .exitProcess(false)
    .fail((msg) => {
      throw new UsageError(msg);
    })
    .parseSync();

  const log = renderJob({
    figureId: args.figure_id as FigureId,
    inputs: args.in,
    output: args.out,
    width: args.width,
    height: args.height,
  });
  console.log(log.output);
  return 0;
}

class UsageError extends Error {
  override name = "UsageError";
}

function runCli(): void {
  try {
    process.exitCode = main(hideBin(process.argv));
  } catch (err) {
    if (err instanceof SchemaMismatch || err instanceof UsageError) {
      console.error(
        JSON.stringify({ error: err.name, detail: err.message }),
      );
      process.exitCode = 2;
    } else {
      console.error(
        JSON.stringify({ error: "RenderError", detail: String(err) }),
      );
      process.exitCode = 1;
    }
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  runCli();
}

/**
 * plot: render error-vs-parameter charts from sweep-results CSVs.
 *
 *   plot --csv sweep.csv --x epsilon --y l1_error --scale loglog --out plot.svg
 *
 * The output format follows the --out extension (.svg or .png).  Failed rows
 * (status != "ok") are omitted from the series and listed in a footnote.
 */

import * as fs from "node:fs";

import { CsvError, parseSweepCsv } from "./csv";
import { PlotError, PlotSpec, buildScene } from "./scene";
import { renderSvg } from "./svg";
import { renderPng } from "./png";

export interface CliOptions {
  csv: string;
  x: string;
  y: string;
  scale: "linear" | "loglog";
  out: string;
  title?: string;
}

export function parseArgs(argv: string[]): CliOptions {
  const opts: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--")) {
      throw new PlotError(`unexpected argument "${flag}"`);
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new PlotError(`flag ${flag} needs a value`);
    }
    opts[flag.slice(2)] = value;
  }
  for (const required of ["csv", "out"]) {
    if (!(required in opts)) {
      throw new PlotError(`missing required flag --${required}`);
    }
  }
  const scale = opts["scale"] ?? "linear";
  if (scale !== "linear" && scale !== "loglog") {
    throw new PlotError(`--scale must be "linear" or "loglog", got "${scale}"`);
  }
  return {
    csv: opts["csv"],
    x: opts["x"] ?? "epsilon",
    y: opts["y"] ?? "l1_error",
    scale,
    out: opts["out"],
    title: opts["title"],
  };
}

export function runPlot(options: CliOptions): void {
  const text = fs.readFileSync(options.csv, "utf-8");
  const rows = parseSweepCsv(text);
  const spec: PlotSpec = {
    x: options.x,
    y: options.y,
    scale: options.scale,
    title: options.title,
  };
  const scene = buildScene(rows, spec);
  if (options.out.endsWith(".svg")) {
    fs.writeFileSync(options.out, renderSvg(scene), "utf-8");
  } else if (options.out.endsWith(".png")) {
    fs.writeFileSync(options.out, renderPng(scene));
  } else {
    throw new PlotError(`--out must end in .svg or .png, got "${options.out}"`);
  }
}

export function main(argv: string[]): number {
  try {
    runPlot(parseArgs(argv));
    return 0;
  } catch (err) {
    if (err instanceof PlotError || err instanceof CsvError) {
      console.error(`plot error: ${err.message}`);
      return 1;
    }
    if (err instanceof Error && "code" in err) {
      console.error(`plot error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}

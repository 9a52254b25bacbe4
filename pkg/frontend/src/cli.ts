/**
 * plot --csv GLOB [--csv GLOB ...] --out DIR --format png|svg [--confidence 0.95]
 *
 * Reads solver run CSVs, renders one exploitability-vs-episodes figure per
 * game (log-y, mean curve per algorithm with a confidence band over
 * seeds) into the output directory.
 */

import { mkdirSync, readFileSync, readdirSync, writeFileSync } from "node:fs";
import { basename, dirname, join } from "node:path";

import { buildChart } from "./chart.js";
import { parseRunCsv, RunRow } from "./csv.js";
import { chartToPng } from "./png.js";
import { groupFigures } from "./stats.js";
import { chartToSvg } from "./svg.js";

interface Args {
  csv: string[];
  out: string;
  format: "png" | "svg";
  confidence: number;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = { csv: [], out: ".", format: "svg", confidence: 0.95 };
  for (let i = 0; i < argv.length; i++) {
    const flag = argv[i];
    const value = argv[i + 1];
    switch (flag) {
      case "plot":
        continue;
      case "--csv":
        args.csv.push(need(flag, value));
        i++;
        break;
      case "--out":
        args.out = need(flag, value);
        i++;
        break;
      case "--format": {
        const fmt = need(flag, value);
        if (fmt !== "png" && fmt !== "svg") {
          throw new Error(`--format must be png or svg, got ${fmt}`);
        }
        args.format = fmt;
        i++;
        break;
      }
      case "--confidence":
        args.confidence = Number(need(flag, value));
        i++;
        break;
      default:
        throw new Error(`unknown argument ${flag}`);
    }
  }
  if (args.csv.length === 0) {
    throw new Error("at least one --csv input is required");
  }
  if (!(args.confidence > 0 && args.confidence < 1)) {
    throw new Error(`--confidence must lie in (0,1), got ${args.confidence}`);
  }
  return args;
}

function need(flag: string, value: string | undefined): string {
  if (value === undefined) throw new Error(`${flag} needs a value`);
  return value;
}

/** Expand a basename glob (* and ?) against its directory. */
export function expandGlob(pattern: string): string[] {
  if (!pattern.includes("*") && !pattern.includes("?")) {
    return [pattern];
  }
  const dir = dirname(pattern);
  const base = basename(pattern);
  const regex = new RegExp(
    "^" + base.replace(/[.+^${}()|[\]\\]/g, "\\$&").replace(/\*/g, ".*").replace(/\?/g, ".") + "$",
  );
  return readdirSync(dir)
    .filter((name) => regex.test(name))
    .sort()
    .map((name) => join(dir, name));
}

export function renderAll(args: Args): string[] {
  const rows: RunRow[] = [];
  const files = args.csv.flatMap(expandGlob);
  if (files.length === 0) {
    throw new Error(`no files match ${args.csv.join(", ")}`);
  }
  for (const file of files) {
    rows.push(...parseRunCsv(readFileSync(file, "utf-8"), file));
  }
  const figures = groupFigures(rows, args.confidence);
  mkdirSync(args.out, { recursive: true });
  const written: string[] = [];
  for (const figure of figures) {
    const chart = buildChart(figure, args.confidence);
    const name = `${figure.game.replace(/:/g, "")}.${args.format}`;
    const path = join(args.out, name);
    if (args.format === "svg") {
      writeFileSync(path, chartToSvg(chart));
    } else {
      writeFileSync(path, chartToPng(chart));
    }
    written.push(path);
  }
  return written;
}

export function main(argv = process.argv.slice(2)): number {
  try {
    const args = parseArgs(argv);
    for (const path of renderAll(args)) {
      console.log(`wrote ${path}`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 2;
  }
}

if (process.argv[1] && /cli\.(ts|js)$/.test(process.argv[1])) {
  process.exit(main());
}

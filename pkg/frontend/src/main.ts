/**
 * CLI: render one figure from a sweep CSV.
 *
 *   node dist/main.js --figure 2 --csv fig02.csv --out fig02.svg
 *
 * Prints the envelope-violation count for ratio figures; a healthy sweep
 * reports 0 for every non-advisory bound. Exits 1 when the count is nonzero,
 * 2 on usage errors.
 */

import { parseArgs } from "node:util";
import { writeFileSync } from "node:fs";

import { readCsv } from "./csv.js";
import { figureSpec } from "./figures.js";
import { renderGridFigure, renderRatioFigure, RenderResult } from "./svg.js";

export function renderFigureFile(figure: number, csvPath: string, outPath: string): RenderResult {
  const spec = figureSpec(figure);
  const table = readCsv(csvPath);
  const result =
    spec.kind === "targeting-grid" ? renderGridFigure(table, spec) : renderRatioFigure(table, spec);
  writeFileSync(outPath, result.svg, "utf-8");
  return result;
}

function run(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        figure: { type: "string" },
        csv: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 2;
  }
  const { figure, csv, out } = parsed.values;
  if (!figure || !csv || !out) {
    console.error("usage: main.js --figure <2..13> --csv <sweep.csv> --out <figure.svg>");
    return 2;
  }
  const id = Number(figure);
  if (!Number.isInteger(id)) {
    console.error(`error: --figure must be an integer, got '${figure}'`);
    return 2;
  }
  try {
    const result = renderFigureFile(id, csv, out);
    if (result.envelope) {
      console.log(
        `points: ${result.envelope.points}, outside envelope (non-advisory): ${result.envelope.violations}, advisory: ${result.envelope.advisoryViolations}`,
      );
      if (result.envelope.violations > 0) return 1;
    }
    console.log(out);
    return 0;
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 2;
  }
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("main.js") || entry.endsWith("main.ts")) {
  process.exit(run(process.argv.slice(2)));
}

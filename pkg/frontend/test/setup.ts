/**
 * Generates fixture CSVs by driving the primary toolkit's CLI — the figures
 * package consumes the solver only through that file interface. Uses reduced
 * per-theta sample counts; the full-size envelope guarantee is the primary
 * acceptance suite's job.
 */

import { execFileSync } from "node:child_process";
import { existsSync, mkdirSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

const here = path.dirname(fileURLToPath(import.meta.url));
export const FIXTURES = path.join(here, ".fixtures");

function cli(args: string[]): void {
  execFileSync("python3", ["-m", "timeline_contest.cli", ...args], {
    stdio: ["ignore", "pipe", "inherit"],
  });
}

export default function setup(): void {
  mkdirSync(FIXTURES, { recursive: true });
  const done = path.join(FIXTURES, "fig10.csv");
  if (existsSync(done)) return; // fixtures are deterministic; reuse across runs
  for (const figure of ["2", "6", "9", "10"]) {
    cli(["figures-data", "--figure", figure, "--out-dir", FIXTURES, "--instances", "4"]);
  }
}

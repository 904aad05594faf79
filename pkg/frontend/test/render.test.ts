import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import path from "node:path";
import { describe, expect, it } from "vitest";

import { column, readCsv } from "../src/csv.js";
import { renderFigureFile } from "../src/main.js";
import { FIXTURES } from "./setup.js";

const out = () => path.join(mkdtempSync(path.join(tmpdir(), "figs-")), "figure.svg");

function fixture(name: string): string {
  return path.join(FIXTURES, name);
}

describe("ratio figures from sweep CSVs", () => {
  it.each([
    [2, "fig02.csv"],
    [6, "fig02.csv"],
    [10, "fig10.csv"],
  ])("figure %i renders with zero non-advisory envelope violations", (figure, csv) => {
    const target = out();
    const result = renderFigureFile(figure as number, fixture(csv), target);
    expect(result.envelope).not.toBeNull();
    expect(result.envelope!.points).toBeGreaterThan(0);
    expect(result.envelope!.violations).toBe(0);
    const svg = readFileSync(target, "utf-8");
    expect(svg).toContain("<svg");
    expect(svg).toContain("outside envelope (non-advisory): 0");
  });

  it("figure 6 consumes the revenue columns of the same sweep schema", () => {
    const result = renderFigureFile(6, fixture("fig06.csv"), out());
    expect(result.envelope!.violations).toBe(0);
  });

  it("re-rendering identical input is byte-identical", () => {
    const a = renderFigureFile(2, fixture("fig02.csv"), out()).svg;
    const b = renderFigureFile(2, fixture("fig02.csv"), out()).svg;
    expect(a).toBe(b);
  });

  it("names a missing column", () => {
    expect(() => renderFigureFile(2, fixture("fig09.csv"), out())).toThrow(
      /column 'r1' not found/,
    );
  });

  it("refuses empty CSVs and writes nothing", () => {
    const dir = mkdtempSync(path.join(tmpdir(), "figs-"));
    const empty = path.join(dir, "empty.csv");
    execFileSync("sh", ["-c", `printf '' > ${empty}`]);
    const target = path.join(dir, "out.svg");
    expect(() => renderFigureFile(2, empty, target)).toThrow(/empty CSV/);
    expect(existsSync(target)).toBe(false);
  });

  it("rejects unknown figure ids", () => {
    expect(() => renderFigureFile(42, fixture("fig02.csv"), out())).toThrow(/unknown figure id/);
  });
});

describe("targeting-grid figure", () => {
  it("renders both series", () => {
    const target = out();
    const result = renderFigureFile(9, fixture("fig09.csv"), target);
    expect(result.envelope).toBeNull();
    const svg = readFileSync(target, "utf-8");
    expect(svg).toContain("adversary payoff");
    expect(svg).toContain("benign net utility");
  });

  it("benign net utility decreases once the adversary participates", () => {
    const table = readCsv(fixture("fig09.csv"));
    const ms = column(table, "M") as number[];
    const benign = column(table, "benign_net") as number[];
    const active = ms
      .map((m, i) => [m, benign[i]] as const)
      .filter(([m]) => 2.0 > 19 / m); // theta=2, N=20 grid
    for (let i = 1; i < active.length; i++) {
      expect(active[i][1]).toBeLessThan(active[i - 1][1]);
    }
  });
});

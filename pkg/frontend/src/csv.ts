/**
 * Reader for the sweep CSVs produced by the timeline-contest CLI.
 *
 * Cells are numbers, "" (quantity undefined for the row's utility family),
 * or "+inf" (the revenue-ratio sentinel for degenerate baselines).
 */

import { readFileSync } from "node:fs";

export type Cell = number | null;

export interface Table {
  header: string[];
  rows: Cell[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV: no header row");
  }
  const header = lines[0].split(",");
  if (lines.length === 1) {
    throw new Error("empty CSV: header but no data rows");
  }
  const rows: Cell[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== header.length) {
      throw new Error(`row ${i} has ${parts.length} cells, header has ${header.length}`);
    }
    rows.push(parts.map(parseCell));
  }
  return { header, rows };
}

function parseCell(raw: string): Cell {
  if (raw === "") return null;
  if (raw === "+inf") return Infinity;
  if (raw === "-inf") return -Infinity;
  if (raw === "true") return 1;
  if (raw === "false") return 0;
  const value = Number(raw);
  if (Number.isNaN(value) && raw !== "NaN") {
    // non-numeric annotation cells (e.g. the violations column) read as null
    return null;
  }
  return value;
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

export function columnIndex(table: Table, name: string): number {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`column '${name}' not found in CSV header`);
  }
  return idx;
}

export function column(table: Table, name: string): Cell[] {
  const idx = columnIndex(table, name);
  return table.rows.map((r) => r[idx]);
}

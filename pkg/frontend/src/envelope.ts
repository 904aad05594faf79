/**
 * Envelope verification: counts scatter points that escape their analytic
 * bounds. A passing sweep must report zero for every non-advisory bound.
 */

import { Table, columnIndex } from "./csv.js";
import { RatioFigureSpec } from "./figures.js";

/** Matches the harness tolerance for flagging violations. */
export const ENVELOPE_TOLERANCE = 1e-9;

export interface EnvelopeReport {
  points: number;
  violations: number;
  advisoryViolations: number;
}

export function checkEnvelope(table: Table, spec: RatioFigureSpec): EnvelopeReport {
  const ratioIdx = columnIndex(table, spec.ratio);
  const boundIdx = spec.bounds.map((b) => ({ ...b, idx: columnIndex(table, b.column) }));
  let points = 0;
  let violations = 0;
  let advisory = 0;
  for (const row of table.rows) {
    const r = row[ratioIdx];
    if (r === null || !Number.isFinite(r)) continue; // undefined cell or sentinel
    points += 1;
    for (const b of boundIdx) {
      const bound = row[b.idx];
      if (bound === null || !Number.isFinite(bound)) continue;
      const out =
        b.role === "lower" ? r < bound - ENVELOPE_TOLERANCE : r > bound + ENVELOPE_TOLERANCE;
      if (!out) continue;
      if (b.advisory) advisory += 1;
      else violations += 1;
    }
  }
  return { points, violations, advisoryViolations: advisory };
}

/**
 * Figure registry. Ids mirror the `figures-data` subcommand of the primary
 * CLI: 2-7 linear ratio scatters (N=5), 8 the N=100 variant, 9 the
 * homogeneous-targeting grid, 10-13 logarithmic ratio scatters.
 */

export interface BoundOverlay {
  column: string;
  role: "lower" | "upper";
  /** advisory overlays are drawn dashed and excluded from envelope counts */
  advisory?: boolean;
}

export interface RatioFigureSpec {
  kind: "ratio-scatter";
  figure: number;
  ratio: string;
  bounds: BoundOverlay[];
  yLabel: string;
  title: string;
}

export interface GridFigureSpec {
  kind: "targeting-grid";
  figure: 9;
  title: string;
}

export type FigureSpec = RatioFigureSpec | GridFigureSpec;

const RATIO_LABELS: Record<string, string> = {
  r1: "total utility / optimum",
  r2: "total utility with / without adversary",
  r3: "total net utility / optimum",
  r4: "total net utility with / without adversary",
  r5: "platform revenue / best revenue",
  r6: "platform revenue with / without adversary",
};

function ratioSpec(figure: number, ratio: string, bounds: BoundOverlay[], note: string): RatioFigureSpec {
  return {
    kind: "ratio-scatter",
    figure,
    ratio,
    bounds,
    yLabel: RATIO_LABELS[ratio],
    title: `${RATIO_LABELS[ratio]} (${note})`,
  };
}

export const FIGURES: Record<number, FigureSpec> = {
  2: ratioSpec(2, "r1", [{ column: "lb1", role: "lower" }, { column: "ub1", role: "upper" }], "linear, N=5"),
  3: ratioSpec(
    3,
    "r2",
    [{ column: "lb2", role: "lower" }, { column: "ub2_adv", role: "upper", advisory: true }],
    "linear, N=5",
  ),
  4: ratioSpec(4, "r3", [{ column: "lb3", role: "lower" }, { column: "ub3", role: "upper" }], "linear, N=5"),
  5: ratioSpec(5, "r4", [{ column: "lb4", role: "lower" }], "linear, N=5"),
  6: ratioSpec(6, "r5", [{ column: "lb5", role: "lower" }, { column: "ub5", role: "upper" }], "linear, N=5"),
  7: ratioSpec(7, "r6", [{ column: "lb6", role: "lower" }], "linear, N=5"),
  8: ratioSpec(8, "r1", [{ column: "lb1", role: "lower" }, { column: "ub1", role: "upper" }], "linear, N=100"),
  9: { kind: "targeting-grid", figure: 9, title: "adversary payoff and benign net utility vs targeted count" },
  10: ratioSpec(10, "r1", [{ column: "lb1", role: "lower" }], "logarithmic, N=5"),
  11: ratioSpec(11, "r2", [{ column: "lb2", role: "lower" }], "logarithmic, N=5"),
  12: ratioSpec(12, "r3", [{ column: "lb3", role: "lower" }], "logarithmic, N=5"),
  13: ratioSpec(13, "r4", [{ column: "lb4", role: "lower" }], "logarithmic, N=5"),
};

export function figureSpec(id: number): FigureSpec {
  const spec = FIGURES[id];
  if (!spec) {
    throw new Error(`unknown figure id ${id}; expected one of ${Object.keys(FIGURES).join(", ")}`);
  }
  return spec;
}

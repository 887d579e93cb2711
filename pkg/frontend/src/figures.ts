/** Figure definitions: the CSV family behind each id, the axes, and the
 * series that must be present before anything renders. */

import type { Family } from "./schema.js";

export interface PanelSpec {
  yField: string;
  yLabel: string;
  /** Fixed y extent; omitted means autoscale from the data. */
  yDomain?: [number, number];
}

export interface FigureSpec {
  id: string;
  family: Family;
  /** Column plotted on x; bin_center is the midpoint of the two bin edges. */
  xField: "K0" | "st" | "bin_center";
  xLabel: string;
  panels: readonly PanelSpec[];
  /** Protocols that must appear in the CSV; null accepts whatever is there.
   * The two-protocol distance figures are comparisons and refuse to render
   * with one side missing; the others plot any series the file declares. */
  requiredProtocols: readonly string[] | null;
  /** Overlay the analytic resolution bound from the `bound` column. */
  boundOverlay: boolean;
}

export const FIGURES: Record<string, FigureSpec> = {
  "fig1-attempts": {
    id: "fig1-attempts",
    family: "attempts_vs_k0",
    xField: "K0",
    xLabel: "number of inactive UEs K0",
    panels: [{ yField: "avg_attempts_all", yLabel: "average access attempts" }],
    requiredProtocols: null,
    boundOverlay: false,
  },
  "fig1-failures": {
    id: "fig1-failures",
    family: "attempts_vs_k0",
    xField: "K0",
    xLabel: "number of inactive UEs K0",
    panels: [{ yField: "fail_prob", yLabel: "probability of failed access", yDomain: [0, 1] }],
    requiredProtocols: null,
    boundOverlay: false,
  },
  "fig2a-res-vs-st": {
    id: "fig2a-res-vs-st",
    family: "res_vs_st",
    xField: "st",
    xLabel: "contenders per pilot |S_t|",
    panels: [
      { yField: "p_res", yLabel: "collision resolution probability", yDomain: [0, 1] },
    ],
    requiredProtocols: null,
    boundOverlay: true,
  },
  "fig2b-res-vs-dist": {
    id: "fig2b-res-vs-dist",
    family: "dist_perf",
    xField: "bin_center",
    xLabel: "distance to BS [m]",
    panels: [{ yField: "p_res", yLabel: "per-attempt resolution probability" }],
    requiredProtocols: ["sucre", "acbpc"],
    boundOverlay: false,
  },
  "fig3-dist-performance": {
    id: "fig3-dist-performance",
    family: "dist_perf",
    xField: "bin_center",
    xLabel: "distance to BS [m]",
    panels: [
      { yField: "avg_attempts", yLabel: "average access attempts" },
      { yField: "fail_prob", yLabel: "probability of failed access", yDomain: [0, 1] },
    ],
    requiredProtocols: ["sucre", "acbpc"],
    boundOverlay: false,
  },
  "fig4-power-energy": {
    id: "fig4-power-energy",
    family: "dist_perf",
    xField: "bin_center",
    xLabel: "distance to BS [m]",
    panels: [
      { yField: "avg_power_norm", yLabel: "normalized transmit power" },
      { yField: "avg_energy_bw", yLabel: "average energy x bandwidth" },
    ],
    requiredProtocols: ["sucre", "acbpc"],
    boundOverlay: false,
  },
};

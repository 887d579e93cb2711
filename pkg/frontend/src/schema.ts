/** CSV families produced by the simulator CLI, with their exact headers. */

import Papa from "papaparse";

export type Family = "attempts_vs_k0" | "res_vs_st" | "dist_perf" | "bound";

export const FAMILY_FILES: Record<Family, string> = {
  attempts_vs_k0: "attempts_vs_k0.csv",
  res_vs_st: "res_vs_st.csv",
  dist_perf: "dist_perf.csv",
  bound: "bound.csv",
};

export const FAMILY_COLUMNS: Record<Family, readonly string[]> = {
  attempts_vs_k0: [
    "protocol",
    "interference",
    "K0",
    "avg_attempts_all",
    "avg_attempts_success",
    "fail_prob",
    "avg_contenders",
  ],
  res_vs_st: ["protocol", "interference", "st", "p_res", "n_samples", "bound"],
  dist_perf: [
    "protocol",
    "interference",
    "bin_lo_m",
    "bin_hi_m",
    "avg_attempts",
    "fail_prob",
    "p_res",
    "avg_power_norm",
    "avg_energy_bw",
  ],
  bound: ["n", "p_res_bound"],
};

export class SchemaError extends Error {}

export interface Row {
  protocol: string;
  interference: boolean;
  [column: string]: string | number | boolean;
}

/** Parse one family CSV. Numeric columns become numbers and `interference`
 * becomes a boolean; a missing declared column or an empty file is an error.
 * Non-finite numeric cells are kept as NaN and skipped at render time. */
export function parseFamilyCsv(family: Family, text: string, fileName: string): Row[] {
  const parsed = Papa.parse<Record<string, string>>(text, {
    header: true,
    skipEmptyLines: "greedy",
  });
  const fields = (parsed.meta.fields ?? []).filter((f) => f !== "");
  if (fields.length === 0) {
    throw new SchemaError(`${fileName}: empty CSV`);
  }
  for (const col of FAMILY_COLUMNS[family]) {
    if (!fields.includes(col)) {
      throw new SchemaError(`${fileName}: missing column ${col}`);
    }
  }
  if (parsed.data.length === 0) {
    throw new SchemaError(`${fileName}: no data rows`);
  }
  return parsed.data.map((raw) => {
    const row: Row = {
      protocol: raw.protocol ?? "",
      interference: raw.interference === "true",
    };
    for (const col of FAMILY_COLUMNS[family]) {
      if (col === "protocol" || col === "interference") continue;
      row[col] = Number(raw[col]);
    }
    return row;
  });
}

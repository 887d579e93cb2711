import { describe, expect, it } from "vitest";

import { parseFamilyCsv, SchemaError } from "../src/schema.js";

const HEADER = "protocol,interference,st,p_res,n_samples,bound";

describe("parseFamilyCsv", () => {
  it("parses a valid res_vs_st file", () => {
    const rows = parseFamilyCsv(
      "res_vs_st",
      `${HEADER}\nsucre,true,2,0.55,1000,0.5\n`,
      "res_vs_st.csv",
    );
    expect(rows).toHaveLength(1);
    expect(rows[0]).toMatchObject({ protocol: "sucre", interference: true, st: 2, p_res: 0.55 });
  });

  it("names the missing column", () => {
    const bad = "protocol,interference,st,p_res,n_samples\nsucre,true,2,0.5,10\n";
    expect(() => parseFamilyCsv("res_vs_st", bad, "res_vs_st.csv")).toThrow(
      /res_vs_st\.csv: missing column bound/,
    );
  });

  it("rejects an empty file", () => {
    expect(() => parseFamilyCsv("res_vs_st", "", "res_vs_st.csv")).toThrow(SchemaError);
  });

  it("rejects a header-only file", () => {
    expect(() => parseFamilyCsv("res_vs_st", `${HEADER}\n`, "res_vs_st.csv")).toThrow(
      /no data rows/,
    );
  });

  it("parses interference as a flag", () => {
    const rows = parseFamilyCsv(
      "res_vs_st",
      `${HEADER}\nacbpc,false,3,0.4,10,0.444\n`,
      "f.csv",
    );
    expect(rows[0].interference).toBe(false);
  });

  it("keeps non-numeric cells as NaN instead of failing", () => {
    const rows = parseFamilyCsv(
      "res_vs_st",
      `${HEADER}\nacbpc,true,3,nan,10,0.444\n`,
      "f.csv",
    );
    expect(Number.isNaN(rows[0].p_res as number)).toBe(true);
  });

  it("covers the bound family", () => {
    const rows = parseFamilyCsv("bound", "n,p_res_bound\n1,1\n2,0.5\n", "bound.csv");
    expect(rows.map((r) => r.p_res_bound)).toEqual([1, 0.5]);
  });
});

/** Deterministic SVG rendering: a pure function of the parsed rows.
 * No timestamps, no randomness; identical inputs give identical bytes. */

import { line as d3line, scaleLinear } from "d3";

import type { FigureSpec, PanelSpec } from "./figures.js";
import { SchemaError, type Row } from "./schema.js";

const WIDTH = 760;
const PANEL_H = 300;
const PANEL_GAP = 46;
const MARGIN = { top: 36, right: 196, bottom: 52, left: 68 };

const PROTOCOL_COLOR: Record<string, string> = {
  sucre: "#1f77b4",
  acbpc: "#d62728",
  baseline: "#555555",
};
const BOUND_COLOR = "#222222";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** Fixed-rounding coordinate/tick formatter so output bytes are stable. */
function fmt(v: number): string {
  return String(Math.round(v * 1e4) / 1e4);
}

function seriesKey(r: Row): string {
  return `${r.protocol}:${r.interference ? "intf" : "no-intf"}`;
}

function seriesColor(protocol: string): string {
  return PROTOCOL_COLOR[protocol] ?? "#777777";
}

interface Pt {
  x: number;
  y: number;
}

function xValue(spec: FigureSpec, r: Row): number {
  if (spec.xField === "bin_center") {
    return ((r.bin_lo_m as number) + (r.bin_hi_m as number)) / 2;
  }
  return r[spec.xField] as number;
}

function groupSeries(spec: FigureSpec, rows: Row[]): Map<string, Row[]> {
  const groups = new Map<string, Row[]>();
  for (const r of rows) {
    const key = seriesKey(r);
    const got = groups.get(key);
    if (got) got.push(r);
    else groups.set(key, [r]);
  }
  if (spec.requiredProtocols) {
    for (const p of spec.requiredProtocols) {
      if (![...groups.values()].some((g) => g[0].protocol === p)) {
        throw new SchemaError(`${spec.id}: missing series for protocol ${p}`);
      }
    }
  }
  return new Map([...groups.entries()].sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0)));
}

function panelPoints(spec: FigureSpec, panel: PanelSpec, rows: Row[]): Pt[] {
  return rows
    .map((r) => ({ x: xValue(spec, r), y: r[panel.yField] as number }))
    .filter((p) => Number.isFinite(p.x) && Number.isFinite(p.y))
    .sort((a, b) => a.x - b.x);
}

function pathFor(pts: Pt[], sx: (v: number) => number, sy: (v: number) => number): string {
  const gen = d3line<Pt>()
    .x((p) => Math.round(sx(p.x) * 100) / 100)
    .y((p) => Math.round(sy(p.y) * 100) / 100);
  return gen(pts) ?? "";
}

export function render(spec: FigureSpec, rows: Row[]): string {
  const groups = groupSeries(spec, rows);
  const keys = [...groups.keys()];

  const allX = rows.map((r) => xValue(spec, r)).filter(Number.isFinite);
  if (allX.length === 0) {
    throw new SchemaError(`${spec.id}: no finite x values`);
  }
  const sx = scaleLinear()
    .domain([Math.min(...allX), Math.max(...allX)])
    .range([MARGIN.left, WIDTH - MARGIN.right]);

  const height = MARGIN.top + spec.panels.length * PANEL_H
    + (spec.panels.length - 1) * PANEL_GAP + MARGIN.bottom;

  const out: string[] = [];
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${height}" ` +
    `viewBox="0 0 ${WIDTH} ${height}" font-family="Helvetica, Arial, sans-serif" font-size="12">`,
  );
  out.push(`<rect width="${WIDTH}" height="${height}" fill="#ffffff"/>`);
  out.push(
    `<text x="${MARGIN.left}" y="20" font-size="14" fill="#000000">${esc(spec.id)}</text>`,
  );

  spec.panels.forEach((panel, pi) => {
    const top = MARGIN.top + pi * (PANEL_H + PANEL_GAP);
    const bottom = top + PANEL_H;

    const perSeries = new Map<string, Pt[]>();
    for (const key of keys) {
      const pts = panelPoints(spec, panel, groups.get(key)!);
      if (pts.length === 0) {
        throw new SchemaError(`${spec.id}: series ${key} has no finite ${panel.yField} values`);
      }
      perSeries.set(key, pts);
    }

    let sy;
    if (panel.yDomain) {
      sy = scaleLinear().domain(panel.yDomain).range([bottom, top]);
    } else {
      const ys = [...perSeries.values()].flat().map((p) => p.y);
      sy = scaleLinear().domain([0, Math.max(...ys) * 1.05]).nice().range([bottom, top]);
    }

    out.push(`<g class="panel">`);
    for (const t of sy.ticks(5)) {
      const y = fmt(sy(t));
      out.push(
        `<line x1="${MARGIN.left}" x2="${WIDTH - MARGIN.right}" y1="${y}" y2="${y}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
      );
      out.push(
        `<text x="${MARGIN.left - 8}" y="${fmt(sy(t) + 4)}" text-anchor="end" ` +
        `fill="#333333">${fmt(t)}</text>`,
      );
    }
    for (const t of sx.ticks(6)) {
      const x = fmt(sx(t));
      out.push(
        `<line x1="${x}" x2="${x}" y1="${bottom}" y2="${bottom + 5}" ` +
        `stroke="#333333" stroke-width="1"/>`,
      );
      out.push(
        `<text x="${x}" y="${bottom + 20}" text-anchor="middle" fill="#333333">${fmt(t)}</text>`,
      );
    }
    out.push(
      `<line x1="${MARGIN.left}" x2="${WIDTH - MARGIN.right}" y1="${bottom}" y2="${bottom}" ` +
      `stroke="#333333" stroke-width="1"/>`,
    );
    out.push(
      `<line x1="${MARGIN.left}" x2="${MARGIN.left}" y1="${top}" y2="${bottom}" ` +
      `stroke="#333333" stroke-width="1"/>`,
    );
    out.push(
      `<text transform="rotate(-90)" x="${-(top + PANEL_H / 2)}" y="${MARGIN.left - 44}" ` +
      `text-anchor="middle" fill="#000000">${esc(panel.yLabel)}</text>`,
    );
    if (pi === spec.panels.length - 1) {
      out.push(
        `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${bottom + 40}" ` +
        `text-anchor="middle" fill="#000000">${esc(spec.xLabel)}</text>`,
      );
    }

    if (spec.boundOverlay) {
      const byX = new Map<number, number>();
      for (const r of rows) {
        const x = xValue(spec, r);
        const b = r.bound as number;
        if (Number.isFinite(x) && Number.isFinite(b)) byX.set(x, b);
      }
      const pts = [...byX.entries()].map(([x, y]) => ({ x, y })).sort((a, b) => a.x - b.x);
      if (pts.length === 0) {
        throw new SchemaError(`${spec.id}: bound column has no finite values`);
      }
      out.push(
        `<path class="bound" d="${pathFor(pts, sx, sy)}" fill="none" ` +
        `stroke="${BOUND_COLOR}" stroke-width="1.5" stroke-dasharray="2 3"/>`,
      );
    }

    for (const key of keys) {
      const pts = perSeries.get(key)!;
      const g = groups.get(key)!;
      const color = seriesColor(g[0].protocol);
      const dash = g[0].interference ? "" : ` stroke-dasharray="6 4"`;
      out.push(
        `<path class="series" data-series="${esc(key)}" d="${pathFor(pts, sx, sy)}" ` +
        `fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
      );
      for (const p of pts) {
        out.push(
          `<circle cx="${fmt(sx(p.x))}" cy="${fmt(sy(p.y))}" r="2.5" fill="${color}"/>`,
        );
      }
    }
    out.push(`</g>`);
  });

  const legendX = WIDTH - MARGIN.right + 14;
  let legendY = MARGIN.top + 8;
  const legend: Array<{ label: string; color: string; dash: string }> = keys.map((key) => {
    const g = groups.get(key)!;
    return {
      label: key,
      color: seriesColor(g[0].protocol),
      dash: g[0].interference ? "" : ` stroke-dasharray="6 4"`,
    };
  });
  if (spec.boundOverlay) {
    legend.push({ label: "analytic bound", color: BOUND_COLOR, dash: ` stroke-dasharray="2 3"` });
  }
  for (const item of legend) {
    out.push(
      `<line x1="${legendX}" x2="${legendX + 26}" y1="${legendY}" y2="${legendY}" ` +
      `stroke="${item.color}" stroke-width="1.8"${item.dash}/>`,
    );
    out.push(
      `<text x="${legendX + 32}" y="${legendY + 4}" fill="#000000">${esc(item.label)}</text>`,
    );
    legendY += 18;
  }

  out.push(`</svg>`);
  return out.join("\n") + "\n";
}

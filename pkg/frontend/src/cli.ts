#!/usr/bin/env node
/** plot <figure-id> --in <dir> --out <file> */

import * as fs from "node:fs";
import * as path from "node:path";
import { pathToFileURL } from "node:url";
import { parseArgs } from "node:util";

import { FIGURES } from "./figures.js";
import { render } from "./render.js";
import { FAMILY_FILES, parseFamilyCsv } from "./schema.js";

export function main(argv: readonly string[]): number {
  try {
    const { values, positionals } = parseArgs({
      args: [...argv],
      options: { in: { type: "string" }, out: { type: "string" } },
      allowPositionals: true,
    });
    if (positionals.length !== 1 || !values.in || !values.out) {
      throw new Error("usage: plot <figure-id> --in <dir> --out <file>");
    }
    const spec = FIGURES[positionals[0]];
    if (!spec) {
      throw new Error(
        `unknown figure id ${positionals[0]}; known: ${Object.keys(FIGURES).join(", ")}`,
      );
    }
    const fileName = FAMILY_FILES[spec.family];
    const csvPath = path.join(values.in, fileName);
    let text: string;
    try {
      text = fs.readFileSync(csvPath, "utf8");
    } catch {
      throw new Error(`cannot read ${csvPath}`);
    }
    const svg = render(spec, parseFamilyCsv(spec.family, text, fileName));
    fs.writeFileSync(values.out, svg);
    process.stdout.write(`${values.out}\n`);
    return 0;
  } catch (err) {
    const msg = err instanceof Error ? err.message : String(err);
    process.stderr.write(`error: ${msg}\n`);
    return 1;
  }
}

let isMain = false;
try {
  isMain =
    !!process.argv[1] &&
    import.meta.url === pathToFileURL(fs.realpathSync(process.argv[1])).href;
} catch {
  isMain = false;
}
if (isMain) {
  process.exit(main(process.argv.slice(2)));
}

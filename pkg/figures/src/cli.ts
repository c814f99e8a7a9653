#!/usr/bin/env node
/**
 * plot <kind> --in <files...> --out <svg>
 *
 * kinds: distribution, steady-overlay, sweep, ts-vs-kappa.
 * Inputs are the documented CSV/JSON outputs of the simulation toolkit;
 * nothing is recomputed here.
 */

import { writeFileSync } from "node:fs";

import { renderFigure } from "./plots.js";

export function main(argv: string[]): number {
  try {
    const { kind, inputs, out } = parseArgs(argv);
    const svg = renderFigure(kind, inputs);
    writeFileSync(out, svg);
    console.log(`wrote ${out} (${kind}, ${inputs.length} input${inputs.length === 1 ? "" : "s"})`);
    return 0;
  } catch (err) {
    console.error(`plot: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

function parseArgs(argv: string[]): { kind: string; inputs: string[]; out: string } {
  if (argv.length === 0) throw new Error("usage: plot <kind> --in <files...> --out <file.svg>");
  const kind = argv[0];
  const inputs: string[] = [];
  let out = "";
  let mode: "in" | "out" | null = null;
  for (const a of argv.slice(1)) {
    if (a === "--in") mode = "in";
    else if (a === "--out") mode = "out";
    else if (mode === "in") inputs.push(a);
    else if (mode === "out") out = a;
    else throw new Error(`unexpected argument '${a}'`);
  }
  if (!out) throw new Error("missing --out <file.svg>");
  if (inputs.length === 0) throw new Error("missing --in <files...>");
  return { kind, inputs, out };
}

if (process.argv[1] && import.meta.url.endsWith(process.argv[1].split("/").pop()!)) {
  process.exit(main(process.argv.slice(2)));
}

import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import test from "node:test";

import {
  HISTOGRAM_COLUMNS,
  parseCsv,
  readHistogram,
  readMeMarginalAsTeDensity,
  readSweepSummary,
  requireColumns,
  serializeCsv,
} from "../src/schema.js";

const here = dirname(fileURLToPath(import.meta.url));
const samples = join(here, "..", "..", "samples");

test("CSV parse/serialize round-trips the shipped histogram byte-for-byte", () => {
  const text = readFileSync(join(samples, "fig1_histogram.csv"), "utf8");
  const table = parseCsv(text);
  assert.deepEqual(table.columns, HISTOGRAM_COLUMNS);
  assert.equal(serializeCsv(table), text);
});

test("CSV parse/serialize round-trips the marginal and coefficients files", () => {
  for (const name of ["me_marginal.csv", "fp_coefficients.csv", "detuning_sweep.csv"]) {
    const text = readFileSync(join(samples, name), "utf8");
    assert.equal(serializeCsv(parseCsv(text)), text, name);
  }
});

test("missing column is reported by name", () => {
  const table = parseCsv("a,b\n1,2\n");
  assert.throws(() => requireColumns(table, ["a", "speed"], "test.csv"), /column 'speed'/);
});

test("non-numeric cell is reported with row and column", () => {
  assert.throws(() => parseCsv("a,b\n1,fast\n"), /row 2, column 'b'/);
});

test("ragged row is rejected", () => {
  assert.throws(() => parseCsv("a,b\n1\n"), /expected 2 fields/);
});

test("histogram reader exposes edges and density", () => {
  const h = readHistogram(join(samples, "fig1_histogram.csv"));
  assert.equal(h.left.length, h.density.length);
  let mass = 0;
  for (let i = 0; i < h.density.length; i++) {
    assert.ok(h.right[i] > h.left[i]);
    mass += h.density[i] * (h.right[i] - h.left[i]);
  }
  assert.ok(Math.abs(mass - 1.0) < 1e-9, `mass = ${mass}`);
});

test("marginal over X converts to a Te density with the 2*Te Jacobian", () => {
  const d = readMeMarginalAsTeDensity(join(samples, "me_marginal.csv"));
  assert.equal(d.te.length, d.density.length);
  // integrate with the trapezoid rule over Te: still normalized
  let mass = 0;
  for (let i = 1; i < d.te.length; i++) {
    mass += 0.5 * (d.density[i] + d.density[i - 1]) * (d.te[i] - d.te[i - 1]);
  }
  assert.ok(Math.abs(mass - 1.0) < 0.02, `mass = ${mass}`);
});

test("sweep summary validates required fields", () => {
  const p = readSweepSummary(join(samples, "ts_sweep_point_0.json"));
  assert.ok(p.fpTs > 0 && p.mcSe >= 0 && p.paramsHash.length === 64);
});

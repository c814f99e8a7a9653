/**
 * Parsers and validators for the simulation toolkit's CSV/JSON outputs.
 *
 * These scripts are strictly read-only consumers: every quantity is taken
 * from the files as written by the primary pipelines, nothing is
 * recomputed.  Schema violations fail loudly naming the offending column.
 */

import { readFileSync } from "node:fs";

export interface Table {
  columns: string[];
  data: Map<string, number[]>;
  rows: number;
}

export function parseCsv(text: string): Table {
  const lines = text.trim().split(/\r?\n/);
  if (lines.length < 1) throw new Error("empty CSV");
  const columns = lines[0].split(",").map((s) => s.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new Error(`row ${i + 1}: expected ${columns.length} fields, got ${parts.length}`);
    }
    parts.forEach((v, j) => {
      const x = Number(v);
      if (!Number.isFinite(x)) {
        throw new Error(`row ${i + 1}, column '${columns[j]}': not a number: '${v}'`);
      }
      data.get(columns[j])!.push(x);
    });
  }
  return { columns, data, rows: lines.length - 1 };
}

export function serializeCsv(table: Table): string {
  const cols = table.columns.map((c) => table.data.get(c)!);
  const lines = [table.columns.join(",")];
  for (let i = 0; i < table.rows; i++) {
    lines.push(cols.map((col) => formatNumber(col[i])).join(","));
  }
  return lines.join("\n") + "\n";
}

/**
 * Shortest round-trip decimal in the producer's format: integral floats
 * keep a trailing ".0", scientific notation kicks in below 1e-4 or at
 * 1e16 with a sign and two-digit exponent.  This keeps a parse/serialize
 * cycle byte-identical to the files the toolkit writes.
 */
export function formatNumber(x: number): string {
  if (Number.isInteger(x) && Math.abs(x) < 1e16) return x.toFixed(1);
  const s = x.toExponential(); // shortest mantissa
  const [mant, expStr] = s.split("e");
  const exp = parseInt(expStr, 10);
  if (exp >= 16 || exp < -4) {
    const sign = exp < 0 ? "-" : "+";
    return `${mant}e${sign}${Math.abs(exp).toString().padStart(2, "0")}`;
  }
  const neg = mant.startsWith("-");
  const digits = mant.replace("-", "").replace(".", "");
  let out: string;
  if (exp >= 0) {
    out =
      digits.length <= exp + 1
        ? digits.padEnd(exp + 1, "0") + ".0"
        : digits.slice(0, exp + 1) + "." + digits.slice(exp + 1);
  } else {
    out = "0." + "0".repeat(-exp - 1) + digits;
  }
  return (neg ? "-" : "") + out;
}

export function requireColumns(table: Table, required: string[], context: string): void {
  for (const col of required) {
    if (!table.data.has(col)) {
      throw new Error(`${context}: missing required column '${col}' (found: ${table.columns.join(", ")})`);
    }
  }
}

export function readTable(path: string, required: string[]): Table {
  const table = parseCsv(readFileSync(path, "utf8"));
  requireColumns(table, required, path);
  return table;
}

// --- concrete file schemas --------------------------------------------------

export const HISTOGRAM_COLUMNS = ["te_left_K", "te_right_K", "density"];
export const ME_MARGINAL_COLUMNS = ["X_K2", "F", "rho00", "rho11", "Re_rho01", "Im_rho01"];
export const FP_TE_COLUMNS = ["te_K", "density"];
export const FP_COEFF_COLUMNS = ["X_K2", "b", "D", "j1", "j2", "delta1", "delta2", "F_s"];
export const SWEEP_COLUMNS = ["omega_ratio", "mean_te_K", "std_te_K", "se_te_K"];

export interface HistogramData {
  left: number[];
  right: number[];
  density: number[];
}

export function readHistogram(path: string): HistogramData {
  const t = readTable(path, HISTOGRAM_COLUMNS);
  return {
    left: t.data.get("te_left_K")!,
    right: t.data.get("te_right_K")!,
    density: t.data.get("density")!,
  };
}

export interface Density {
  /** electron temperature, K */
  te: number[];
  /** probability density in Te */
  density: number[];
  label: string;
}

/** Density over Te from a marginal stored over X = Te^2: f(Te) = F(X) * 2 Te. */
export function readMeMarginalAsTeDensity(path: string): Density {
  const t = readTable(path, ME_MARGINAL_COLUMNS);
  const x = t.data.get("X_K2")!;
  const f = t.data.get("F")!;
  const te = x.map(Math.sqrt);
  const density = f.map((v, i) => v * 2.0 * te[i]);
  return { te, density, label: "master equation" };
}

export function readFpTeDensity(path: string): Density {
  const t = readTable(path, FP_TE_COLUMNS);
  return { te: t.data.get("te_K")!, density: t.data.get("density")!, label: "reduced equation" };
}

/** fp_coefficients.csv carries the stationary density over X. */
export function readFpCoefficientsAsTeDensity(path: string): Density {
  const t = readTable(path, FP_COEFF_COLUMNS);
  const x = t.data.get("X_K2")!;
  const fs = t.data.get("F_s")!;
  const te = x.map(Math.sqrt);
  return {
    te,
    density: fs.map((v, i) => v * 2.0 * te[i]),
    label: "reduced equation",
  };
}

export interface SweepPoint {
  kappa: number;
  g2: number;
  mcMean: number;
  mcSe: number;
  fpTs: number;
  tsClosed: number;
  paramsHash: string;
}

export function readSweepSummary(path: string): SweepPoint {
  const raw = JSON.parse(readFileSync(path, "utf8"));
  const required = [
    "kappa", "g2", "mc_mean_te_K", "mc_se_te_K", "fp_ts_K", "ts_closed_K", "params_sha256",
  ];
  for (const key of required) {
    if (!(key in raw)) throw new Error(`${path}: missing field '${key}'`);
  }
  return {
    kappa: raw.kappa,
    g2: raw.g2,
    mcMean: raw.mc_mean_te_K,
    mcSe: raw.mc_se_te_K,
    fpTs: raw.fp_ts_K,
    tsClosed: raw.ts_closed_K,
    paramsHash: raw.params_sha256,
  };
}

export interface DetuningSweep {
  ratio: number[];
  mean: number[];
  std: number[];
  se: number[];
}

export function readDetuningSweep(path: string): DetuningSweep {
  const t = readTable(path, SWEEP_COLUMNS);
  return {
    ratio: t.data.get("omega_ratio")!,
    mean: t.data.get("mean_te_K")!,
    std: t.data.get("std_te_K")!,
    se: t.data.get("se_te_K")!,
  };
}

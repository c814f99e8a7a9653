/**
 * Figure kinds over the toolkit's documented outputs.
 *
 * distribution / steady-overlay : histogram bars of Te plus overlaid
 *     line densities (master-equation marginal, reduced-equation
 *     stationary density) on a shared Te axis;
 * sweep          : mean and standard deviation of Te against the
 *     drive/qubit frequency ratio;
 * ts-vs-kappa    : stationary-temperature points with error bars against
 *     the reduced-equation curve (closed form dashed).
 */

import { readFileSync } from "node:fs";

import {
  Density,
  HistogramData,
  SweepPoint,
  readDetuningSweep,
  readFpCoefficientsAsTeDensity,
  readFpTeDensity,
  readHistogram,
  readMeMarginalAsTeDensity,
  readSweepSummary,
} from "./schema.js";
import { SvgCanvas, defaultFrame, extent } from "./svg.js";

const MC_COLOR = "#4878cf";
const ME_COLOR = "#d65f5f";
const FP_COLOR = "#2f2f2f";

/** Dispatch a density CSV to its reader by header shape. */
export function readOverlay(path: string): Density {
  if (path.endsWith(".json")) throw new Error(`overlay must be a CSV density: ${path}`);
  const head = readFileSync(path, "utf8").split(/\r?\n/, 1)[0];
  if (head.includes("X_K2") && head.includes("F_s")) return readFpCoefficientsAsTeDensity(path);
  if (head.includes("X_K2")) return readMeMarginalAsTeDensity(path);
  if (head.includes("te_K")) return readFpTeDensity(path);
  throw new Error(`${path}: unrecognized overlay schema (header: ${head.trim()})`);
}

export function plotDistribution(
  histogram: HistogramData,
  overlays: Density[],
): string {
  const teAll = [...histogram.left, ...histogram.right];
  for (const o of overlays) teAll.push(...o.te);
  const yAll = [...histogram.density];
  for (const o of overlays) yAll.push(...o.density);
  const frame = defaultFrame(extent(teAll), { min: 0, max: extent(yAll).max });
  const svg = new SvgCanvas(frame);
  for (let i = 0; i < histogram.density.length; i++) {
    svg.rect(histogram.left[i], histogram.right[i], 0, histogram.density[i], MC_COLOR, 0.7);
  }
  const colors = [ME_COLOR, FP_COLOR, "#6acc65", "#956cb4"];
  overlays.forEach((o, i) => svg.polyline(o.te, o.density, colors[i % colors.length], 2));
  svg.axes("Te (K)", "density (1/K)");
  svg.legend([
    { label: "trajectories", color: MC_COLOR, marker: true },
    ...overlays.map((o, i) => ({ label: o.label, color: colors[i % colors.length] })),
  ]);
  return svg.render();
}

export function plotTsVsKappa(points: SweepPoint[]): string {
  if (points.length < 2) throw new Error("ts-vs-kappa needs at least 2 sweep points");
  const hash = points[0].paramsHash;
  const g2 = points[0].g2;
  for (const p of points) {
    if (p.paramsHash !== hash || p.g2 !== g2) {
      throw new Error(
        `inconsistent sweep: parameters differ between points ` +
        `(g2 ${g2} vs ${p.g2}, hash ${hash.slice(0, 8)} vs ${p.paramsHash.slice(0, 8)})`
      );
    }
  }
  const sorted = [...points].sort((a, b) => a.kappa - b.kappa);
  const ks = sorted.map((p) => p.kappa);
  const ys = [
    ...sorted.map((p) => p.mcMean + p.mcSe),
    ...sorted.map((p) => p.mcMean - p.mcSe),
    ...sorted.map((p) => p.fpTs),
    ...sorted.map((p) => p.tsClosed),
  ];
  const frame = defaultFrame(extent(ks), extent(ys, 0.1));
  const svg = new SvgCanvas(frame);
  svg.polyline(ks, sorted.map((p) => p.fpTs), FP_COLOR, 2);
  svg.polyline(ks, sorted.map((p) => p.tsClosed), ME_COLOR, 1.5, "6 4");
  sorted.forEach((p) => {
    svg.errorBar(p.kappa, p.mcMean, p.mcSe, MC_COLOR);
    svg.circle(p.kappa, p.mcMean, 3, MC_COLOR);
  });
  svg.axes("drive strength kappa", "stationary temperature T_S (K)");
  svg.legend([
    { label: "trajectory mean", color: MC_COLOR, marker: true },
    { label: "reduced equation", color: FP_COLOR },
    { label: "closed form", color: ME_COLOR, dash: "6 4" },
  ]);
  return svg.render();
}

export function plotDetuningSweep(path: string): string {
  const sweep = readDetuningSweep(path);
  const ys = [
    ...sweep.mean.map((m, i) => m + sweep.std[i]),
    ...sweep.mean.map((m, i) => m - sweep.std[i]),
  ];
  const frame = defaultFrame(extent(sweep.ratio), extent(ys, 0.1));
  const svg = new SvgCanvas(frame);
  svg.polyline(sweep.ratio, sweep.mean, MC_COLOR, 2);
  sweep.ratio.forEach((r, i) => {
    svg.errorBar(r, sweep.mean[i], sweep.std[i], MC_COLOR);
    svg.circle(r, sweep.mean[i], 3, MC_COLOR);
  });
  svg.axes("drive/qubit frequency ratio", "Te after drive (K)");
  svg.legend([{ label: "mean +- std", color: MC_COLOR, marker: true }]);
  return svg.render();
}

export function renderFigure(kind: string, inputs: string[]): string {
  switch (kind) {
    case "distribution": {
      if (inputs.length < 1) throw new Error("distribution needs a histogram CSV");
      const hist = readHistogram(inputs[0]);
      const overlays = inputs.slice(1).map(readOverlay);
      return plotDistribution(hist, overlays);
    }
    case "steady-overlay": {
      if (inputs.length < 2) {
        throw new Error("steady-overlay needs a histogram CSV and at least one density CSV");
      }
      const hist = readHistogram(inputs[0]);
      return plotDistribution(hist, inputs.slice(1).map(readOverlay));
    }
    case "sweep": {
      if (inputs.length !== 1) throw new Error("sweep takes exactly one detuning CSV");
      return plotDetuningSweep(inputs[0]);
    }
    case "ts-vs-kappa": {
      return plotTsVsKappa(inputs.map(readSweepSummary));
    }
    default:
      throw new Error(`unknown figure kind '${kind}' (expected distribution, steady-overlay, sweep, ts-vs-kappa)`);
  }
}

/**
 * Minimal deterministic SVG builder: axes, tick labels, bars, polylines,
 * error bars, legends.  Output bytes depend only on the input data (fixed
 * number formatting, no ids, no timestamps).
 */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[], pad = 0.05): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (!Number.isFinite(min) || !Number.isFinite(max)) throw new Error("empty extent");
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

const fmt = (x: number): string => {
  const s = x.toPrecision(8);
  return s.includes(".") ? s.replace(/\.?0+$/, "").replace(/\.?0+e/, "e") : s;
};

/** Human tick label: trimmed fixed/scientific. */
export function tickLabel(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 0.001 && a < 10000) {
    return String(Number(x.toPrecision(4)));
  }
  return x.toExponential(2);
}

export function niceTicks(lo: number, hi: number, n = 6): number[] {
  const span = hi - lo;
  const step0 = span / Math.max(n - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  let step = mag;
  for (const m of [1, 2, 2.5, 5, 10]) {
    if (mag * m >= step0) {
      step = mag * m;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let t = start; t <= hi + 1e-12 * span; t += step) {
    ticks.push(Math.abs(t) < 1e-12 * span ? 0 : t);
  }
  return ticks;
}

export interface PlotFrame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
  x: Extent;
  y: Extent;
}

export class SvgCanvas {
  private parts: string[] = [];
  readonly frame: PlotFrame;

  constructor(frame: PlotFrame) {
    this.frame = frame;
  }

  px(x: number): number {
    const f = this.frame;
    return f.left + ((x - f.x.min) / (f.x.max - f.x.min)) * (f.width - f.left - f.right);
  }

  py(y: number): number {
    const f = this.frame;
    return f.height - f.bottom - ((y - f.y.min) / (f.y.max - f.y.min)) * (f.height - f.top - f.bottom);
  }

  add(tag: string): void {
    this.parts.push(tag);
  }

  rect(x0: number, x1: number, y0: number, y1: number, fill: string, opacity = 1.0): void {
    const xa = this.px(x0);
    const xb = this.px(x1);
    const ya = this.py(y1);
    const yb = this.py(y0);
    this.add(
      `<rect x="${fmt(xa)}" y="${fmt(ya)}" width="${fmt(Math.max(xb - xa, 0.1))}" ` +
      `height="${fmt(Math.max(yb - ya, 0))}" fill="${fill}" fill-opacity="${fmt(opacity)}"/>`
    );
  }

  polyline(xs: number[], ys: number[], stroke: string, width = 1.5, dash?: string): void {
    const pts = xs.map((x, i) => `${fmt(this.px(x))},${fmt(this.py(ys[i]))}`).join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`);
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.add(`<circle cx="${fmt(this.px(x))}" cy="${fmt(this.py(y))}" r="${r}" fill="${fill}"/>`);
  }

  errorBar(x: number, y: number, dy: number, stroke: string): void {
    const xa = this.px(x);
    const yl = this.py(y - dy);
    const yh = this.py(y + dy);
    this.add(`<line x1="${fmt(xa)}" y1="${fmt(yl)}" x2="${fmt(xa)}" y2="${fmt(yh)}" stroke="${stroke}" stroke-width="1"/>`);
    for (const yy of [yl, yh]) {
      this.add(`<line x1="${fmt(xa - 3)}" y1="${fmt(yy)}" x2="${fmt(xa + 3)}" y2="${fmt(yy)}" stroke="${stroke}" stroke-width="1"/>`);
    }
  }

  text(xPix: number, yPix: number, s: string, anchor = "middle", size = 11): void {
    this.add(
      `<text x="${fmt(xPix)}" y="${fmt(yPix)}" text-anchor="${anchor}" ` +
      `font-family="sans-serif" font-size="${size}">${escapeXml(s)}</text>`
    );
  }

  axes(xLabel: string, yLabel: string): void {
    const f = this.frame;
    const x0 = f.left;
    const x1 = f.width - f.right;
    const y0 = f.height - f.bottom;
    const y1 = f.top;
    this.add(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black" stroke-width="1"/>`);
    this.add(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black" stroke-width="1"/>`);
    for (const t of niceTicks(f.x.min, f.x.max)) {
      const xp = this.px(t);
      this.add(`<line x1="${fmt(xp)}" y1="${y0}" x2="${fmt(xp)}" y2="${y0 + 4}" stroke="black" stroke-width="1"/>`);
      this.text(xp, y0 + 16, tickLabel(t));
    }
    for (const t of niceTicks(f.y.min, f.y.max)) {
      const yp = this.py(t);
      this.add(`<line x1="${x0 - 4}" y1="${fmt(yp)}" x2="${x0}" y2="${fmt(yp)}" stroke="black" stroke-width="1"/>`);
      this.text(x0 - 7, yp + 3, tickLabel(t), "end", 10);
    }
    this.text((x0 + x1) / 2, f.height - 8, xLabel);
    this.add(
      `<text x="14" y="${(y0 + y1) / 2}" text-anchor="middle" font-family="sans-serif" ` +
      `font-size="11" transform="rotate(-90 14 ${(y0 + y1) / 2})">${escapeXml(yLabel)}</text>`
    );
  }

  legend(entries: Array<{ label: string; color: string; dash?: string; marker?: boolean }>): void {
    const f = this.frame;
    let y = f.top + 14;
    const x = f.width - f.right - 150;
    for (const e of entries) {
      if (e.marker) {
        this.add(`<circle cx="${x + 10}" cy="${y - 3}" r="3" fill="${e.color}"/>`);
      } else {
        const dashAttr = e.dash ? ` stroke-dasharray="${e.dash}"` : "";
        this.add(`<line x1="${x}" y1="${y - 3}" x2="${x + 20}" y2="${y - 3}" stroke="${e.color}" stroke-width="2"${dashAttr}/>`);
      }
      this.text(x + 26, y, e.label, "start", 10);
      y += 15;
    }
  }

  render(): string {
    const f = this.frame;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${f.width}" height="${f.height}" ` +
      `viewBox="0 0 ${f.width} ${f.height}">\n<rect width="${f.width}" height="${f.height}" fill="white"/>\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function defaultFrame(x: Extent, y: Extent): PlotFrame {
  return { width: 640, height: 420, left: 64, right: 20, top: 16, bottom: 44, x, y };
}

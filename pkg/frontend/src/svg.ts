/**
 * Minimal deterministic SVG line plots: fixed canvas, fixed precision,
 * no timestamps or environment-dependent content anywhere in the output.
 */

const WIDTH = 640;
const HEIGHT = 420;
const MARGIN = { left: 64, right: 20, top: 34, bottom: 46 };

function fmt(x: number): string {
  if (!Number.isFinite(x)) return "0";
  return Number(x.toPrecision(8)).toString();
}

function niceTicks(lo: number, hi: number, n = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(v);
  }
  return ticks;
}

export interface Series {
  label: string;
  points: Array<[number, number]>;
}

export interface PlotOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  logX?: boolean;
  reference?: number;
}

const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

export function renderLinePlot(seriesList: Series[], opts: PlotOptions): string {
  const pts = seriesList.flatMap((s) => s.points).filter(([x, y]) =>
    Number.isFinite(x) && Number.isFinite(y) && (!opts.logX || x > 0),
  );
  if (pts.length === 0) {
    throw new Error("no finite data points to plot");
  }
  const xs = pts.map(([x]) => (opts.logX ? Math.log10(x) : x));
  const ys = pts.map(([, y]) => y);
  let xLo = Math.min(...xs);
  let xHi = Math.max(...xs);
  let yLo = Math.min(...ys, opts.reference ?? Infinity);
  let yHi = Math.max(...ys, opts.reference ?? -Infinity);
  if (xHi === xLo) {
    xLo -= 0.5;
    xHi += 0.5;
  }
  if (yHi === yLo) {
    yLo -= 0.5;
    yHi += 0.5;
  }
  const yPad = 0.06 * (yHi - yLo);
  yLo -= yPad;
  yHi += yPad;
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const px = (x: number) =>
    MARGIN.left + ((opts.logX ? Math.log10(x) : x) - xLo) / (xHi - xLo) * plotW;
  const py = (y: number) => MARGIN.top + (yHi - y) / (yHi - yLo) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="20" text-anchor="middle" font-family="monospace" font-size="14">${escapeXml(opts.title)}</text>`,
  );
  // axes frame
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`,
  );
  // y ticks
  for (const t of niceTicks(yLo, yHi)) {
    const y = py(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 6}" y="${fmt(y + 4)}" text-anchor="end" font-family="monospace" font-size="10">${fmt(t)}</text>`,
    );
  }
  // x ticks
  const xTicks = opts.logX
    ? niceTicks(xLo, xHi, 5).map((t) => Math.pow(10, t))
    : niceTicks(xLo, xHi, 6);
  for (const t of xTicks) {
    const x = px(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${MARGIN.top + plotH}" stroke="#ddd" stroke-width="0.5"/>`,
    );
    parts.push(
      `<text x="${fmt(x)}" y="${HEIGHT - MARGIN.bottom + 16}" text-anchor="middle" font-family="monospace" font-size="10">${fmt(t)}</text>`,
    );
  }
  parts.push(
    `<text x="${WIDTH / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-family="monospace" font-size="12">${escapeXml(opts.xLabel)}</text>`,
  );
  parts.push(
    `<text x="16" y="${HEIGHT / 2}" text-anchor="middle" font-family="monospace" font-size="12" transform="rotate(-90 16 ${HEIGHT / 2})">${escapeXml(opts.yLabel)}</text>`,
  );
  if (opts.reference !== undefined && Number.isFinite(opts.reference)) {
    const y = py(opts.reference);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${MARGIN.left + plotW}" y2="${fmt(y)}" stroke="#d62728" stroke-width="1" stroke-dasharray="6,4"/>`,
    );
  }
  seriesList.forEach((series, idx) => {
    const color = COLORS[idx % COLORS.length];
    const path = series.points
      .filter(([x, y]) => Number.isFinite(x) && Number.isFinite(y) && (!opts.logX || x > 0))
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(px(x))},${fmt(py(y))}`)
      .join("");
    parts.push(`<path d="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const [x, y] of series.points) {
      if (!Number.isFinite(x) || !Number.isFinite(y) || (opts.logX && x <= 0)) continue;
      parts.push(
        `<circle cx="${fmt(px(x))}" cy="${fmt(py(y))}" r="2.5" fill="${color}"/>`,
      );
    }
    if (seriesList.length > 1) {
      parts.push(
        `<text x="${MARGIN.left + plotW - 8}" y="${MARGIN.top + 16 + 14 * idx}" text-anchor="end" font-family="monospace" font-size="11" fill="${color}">${escapeXml(series.label)}</text>`,
      );
    }
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function escapeXml(s: string): string {
  return s
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

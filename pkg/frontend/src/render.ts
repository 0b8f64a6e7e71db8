import { readFileSync, writeFileSync, mkdirSync } from "node:fs";
import { dirname, resolve } from "node:path";

import { parseCsv, numericColumn, requireColumn, Table } from "./csv.js";
import { FigureSpec } from "./spec.js";
import { renderLinePlot, Series } from "./svg.js";

function applyWhere(table: Table, fig: FigureSpec, path: string): Table {
  if (!fig.where) return table;
  requireColumn(table, fig.where.column, path);
  const rows = table.rows.filter((r) => r[fig.where!.column] === fig.where!.equals);
  if (rows.length === 0) {
    throw new Error(
      `${path}: filter ${fig.where.column} == "${fig.where.equals}" keeps no rows`,
    );
  }
  return { columns: table.columns, rows };
}

export function renderFigure(fig: FigureSpec, baseDir: string): string {
  const inputPath = resolve(baseDir, fig.input);
  let text: string;
  try {
    text = readFileSync(inputPath, "utf8");
  } catch {
    throw new Error(`input CSV not found: ${inputPath}`);
  }
  let table = parseCsv(text, fig.input);
  table = applyWhere(table, fig, fig.input);
  const xs = numericColumn(table, fig.xColumn, fig.input);
  let ys = numericColumn(table, fig.yColumn, fig.input);
  let yLabel = fig.yColumn;
  if (fig.transform === "ratio-to-constant") {
    const c = fig.ratioConstant!;
    if (c === 0) throw new Error(`${fig.input}: ratioConstant must be nonzero`);
    ys = ys.map((y) => y / c);
    yLabel = `${fig.yColumn} / ${c}`;
  }
  let reference = fig.referenceValue;
  if (fig.referenceColumn !== undefined) {
    const refCol = numericColumn(table, fig.referenceColumn, fig.input);
    reference = refCol[0];
  }
  const series: Series[] = [
    {
      label: fig.yColumn,
      points: xs.map((x, i) => [x, ys[i]] as [number, number]),
    },
  ];
  const svg = renderLinePlot(series, {
    title: fig.title ?? `${fig.yColumn} vs ${fig.xColumn}`,
    xLabel: fig.xColumn + (fig.transform === "log-x" ? " (log scale)" : ""),
    yLabel,
    logX: fig.transform === "log-x",
    reference,
  });
  const outPath = resolve(baseDir, fig.output);
  mkdirSync(dirname(outPath), { recursive: true });
  writeFileSync(outPath, svg);
  return outPath;
}

/**
 * Figure specifications: what to read, which columns to plot, how to dress it.
 * Display only — the single allowed "math" is the declared column transform.
 */

export type Transform = "identity" | "ratio-to-constant" | "log-x";

export interface FigureSpec {
  /** CSV produced by the primary suite. */
  input: string;
  xColumn: string;
  yColumn: string;
  transform: Transform;
  /** Horizontal reference line (e.g. 1.0 for ratio plots, 0 for residuals). */
  referenceValue?: number;
  /** Take the reference line from this column's first value instead. */
  referenceColumn?: string;
  /** Constant divisor for the ratio-to-constant transform. */
  ratioConstant?: number;
  /** Optional row filter: keep rows where column equals the given string. */
  where?: { column: string; equals: string };
  title?: string;
  output: string;
}

export interface SpecFile {
  figures: FigureSpec[];
}

const TRANSFORMS: Transform[] = ["identity", "ratio-to-constant", "log-x"];

export function parseSpec(raw: string, path: string): SpecFile {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch (e) {
    throw new Error(`spec ${path} is not valid JSON: ${(e as Error).message}`);
  }
  const obj = data as Partial<SpecFile>;
  if (!obj || !Array.isArray(obj.figures) || obj.figures.length === 0) {
    throw new Error(`spec ${path}: expected a nonempty "figures" array`);
  }
  for (const [i, fig] of obj.figures.entries()) {
    for (const key of ["input", "xColumn", "yColumn", "transform", "output"] as const) {
      if (fig[key] === undefined || fig[key] === null || fig[key] === "") {
        throw new Error(`spec ${path}: figure ${i} is missing "${key}"`);
      }
    }
    if (!TRANSFORMS.includes(fig.transform as Transform)) {
      throw new Error(
        `spec ${path}: figure ${i} has unknown transform "${fig.transform}"`,
      );
    }
    if (fig.transform === "ratio-to-constant" && fig.ratioConstant === undefined) {
      throw new Error(
        `spec ${path}: figure ${i} uses ratio-to-constant without "ratioConstant"`,
      );
    }
  }
  return obj as SpecFile;
}

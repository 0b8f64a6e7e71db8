#!/usr/bin/env node
/**
 * plots render --spec <file> [--base-dir <dir>]
 *
 * Reads the figure spec (JSON), renders each figure to a deterministic SVG.
 * Paths inside the spec resolve relative to --base-dir (default: the spec
 * file's directory).
 */

import { readFileSync } from "node:fs";
import { dirname, resolve } from "node:path";
import process from "node:process";

import { parseSpec } from "./spec.js";
import { renderFigure } from "./render.js";

function fail(msg: string): never {
  console.error(`error: ${msg}`);
  process.exit(2);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    console.error(`error: unknown command "${command ?? ""}" (expected: render)`);
    return 2;
  }
  let specPath: string | undefined;
  let baseDir: string | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) fail(`flag ${flag} needs a value`);
    if (flag === "--spec") specPath = value;
    else if (flag === "--base-dir") baseDir = value;
    else fail(`unknown flag ${flag}`);
  }
  if (!specPath) fail("--spec <file> is required");
  let raw: string;
  try {
    raw = readFileSync(specPath, "utf8");
  } catch {
    fail(`spec file not found: ${specPath}`);
  }
  const spec = parseSpec(raw, specPath);
  const base = baseDir ?? dirname(resolve(specPath));
  for (const fig of spec.figures) {
    const out = renderFigure(fig, base);
    console.log(`wrote ${out}`);
  }
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${resolve(process.argv[1])}`).href;
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    process.exit(1);
  }
}

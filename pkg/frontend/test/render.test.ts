import { mkdtempSync, readFileSync, writeFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterEach, beforeEach, describe, expect, it } from "vitest";

import { parseSpec } from "../src/spec.js";
import { renderFigure } from "../src/render.js";
import { main } from "../src/cli.js";

let dir: string;

beforeEach(() => {
  dir = mkdtempSync(join(tmpdir(), "plots-"));
});

afterEach(() => {
  rmSync(dir, { recursive: true, force: true });
});

const PREDICTION_CSV = `B,exactCount,mainTerm,secondaryTerm,ratio
625,37.98,33.71,nan,1.1266
1250,82.79,74.67,nan,1.1087
2500,180.22,163.86,nan,1.0999
5000,392.43,356.76,nan,1.1000
10000,838.24,771.58,nan,1.0864
20000,1795.86,1659.29,nan,1.0823
`;

const SALIE_CSV = `c1,c2,c3,X,real,imag,slope,eta_real,eta_imag
1,0,0,1000,810.2,0.0,0.8102,0.81057,0
1,0,0,10000,8104.9,0.0,0.81049,0.81057,0
1,0,0,100000,81055.1,0.0,0.81055,0.81057,0
1,1,0,1000,3.4,0.0,0.0034,nan,nan
1,1,0,10000,5.5,0.0,0.00055,nan,nan
`;

const RESIDUAL_CSV = `Q,n,residual
4,-2,1.2e-16
4,-1,-3e-17
4,1,5e-17
4,2,-8e-17
`;

function writeInputs() {
  writeFileSync(join(dir, "prediction.csv"), PREDICTION_CSV);
  writeFileSync(join(dir, "salie_avg.csv"), SALIE_CSV);
  writeFileSync(join(dir, "delta_residuals.csv"), RESIDUAL_CSV);
}

function referenceSpec() {
  return {
    figures: [
      {
        input: "prediction.csv",
        xColumn: "B",
        yColumn: "ratio",
        transform: "log-x",
        referenceValue: 1.0,
        title: "count over predicted main term",
        output: "figs/prediction_ratio.svg",
      },
      {
        input: "salie_avg.csv",
        xColumn: "X",
        yColumn: "slope",
        transform: "log-x",
        referenceColumn: "eta_real",
        where: { column: "c2", equals: "0" },
        title: "normalized q-average vs its linear density",
        output: "figs/salie_convergence.svg",
      },
      {
        input: "delta_residuals.csv",
        xColumn: "n",
        yColumn: "residual",
        transform: "identity",
        referenceValue: 0.0,
        title: "delta identity residuals",
        output: "figs/delta_residuals.svg",
      },
    ],
  };
}

describe("spec parsing", () => {
  it("rejects missing keys and bad transforms", () => {
    expect(() => parseSpec("{}", "s")).toThrow(/figures/);
    expect(() =>
      parseSpec(JSON.stringify({ figures: [{ input: "a.csv" }] }), "s"),
    ).toThrow(/missing/);
    expect(() =>
      parseSpec(
        JSON.stringify({
          figures: [
            {
              input: "a.csv",
              xColumn: "x",
              yColumn: "y",
              transform: "cubist",
              output: "o.svg",
            },
          ],
        }),
        "s",
      ),
    ).toThrow(/transform/);
  });
});

describe("rendering", () => {
  it("produces the three reference figures", () => {
    writeInputs();
    const spec = referenceSpec();
    for (const fig of spec.figures) {
      const out = renderFigure(fig as never, dir);
      const svg = readFileSync(out, "utf8");
      expect(svg.startsWith("<svg")).toBe(true);
      expect(svg).toContain("</svg>");
      expect(svg).toContain("stroke-dasharray"); // reference line present
    }
  });

  it("is byte-deterministic across repeated runs", () => {
    writeInputs();
    const fig = referenceSpec().figures[0];
    const out1 = readFileSync(renderFigure(fig as never, dir), "utf8");
    const out2 = readFileSync(renderFigure(fig as never, dir), "utf8");
    expect(out1).toBe(out2);
    expect(out1).not.toMatch(/\d{4}-\d{2}-\d{2}/); // no dates anywhere
  });

  it("fails loudly on a missing column", () => {
    writeInputs();
    const fig = { ...referenceSpec().figures[0], yColumn: "nope" };
    expect(() => renderFigure(fig as never, dir)).toThrow(/missing column "nope"/);
  });

  it("fails loudly on an empty CSV and writes no image", () => {
    writeFileSync(join(dir, "empty.csv"), "\n");
    const fig = {
      input: "empty.csv",
      xColumn: "x",
      yColumn: "y",
      transform: "identity",
      output: "figs/empty.svg",
    };
    expect(() => renderFigure(fig as never, dir)).toThrow(/empty/);
    expect(() => readFileSync(join(dir, "figs/empty.svg"))).toThrow();
  });

  it("applies the ratio-to-constant transform", () => {
    writeInputs();
    const fig = {
      input: "prediction.csv",
      xColumn: "B",
      yColumn: "exactCount",
      transform: "ratio-to-constant",
      ratioConstant: 2.0,
      output: "figs/halved.svg",
    };
    const svg = readFileSync(renderFigure(fig as never, dir), "utf8");
    expect(svg).toContain("exactCount / 2");
  });
});

describe("cli", () => {
  it("renders from a spec file and rejects unknown commands", () => {
    writeInputs();
    const specPath = join(dir, "figures.json");
    writeFileSync(specPath, JSON.stringify(referenceSpec()));
    expect(main(["render", "--spec", specPath])).toBe(0);
    expect(readFileSync(join(dir, "figs/prediction_ratio.svg"), "utf8")).toContain("<svg");
    expect(main(["frobnicate"])).toBe(2);
  });
});

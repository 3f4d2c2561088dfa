import { describe, expect, it } from "vitest";

import {
  METRICS_HEADER,
  SchemaError,
  parseManifest,
  parseMetricsCsv,
} from "../src/schema.js";
import { makeConfig, metricsCsvText } from "./fixtures.js";

const goodCsv = metricsCsvText({
  config: makeConfig(),
  covered: [8, 150, 300, 901],
});

describe("metrics CSV parsing", () => {
  it("round-trips the simulator header and numeric rows", () => {
    const rows = parseMetricsCsv(goodCsv);
    expect(rows).toHaveLength(4);
    expect(rows[0]).toMatchObject({ iter: 0, robotIters: 0, coveredCells: 8 });
    expect(rows[3]!.robotIters).toBe(12);
    expect(rows[3]!.coveredCells).toBe(901);
    expect(rows[1]!.coverageM3).toBe(150 * 0.1 ** 3);
  });

  it("rejects a renamed column and says which header it wanted", () => {
    const bad = goodCsv.replace("covered_cells", "covered");
    expect(() => parseMetricsCsv(bad, "run.csv")).toThrowError(SchemaError);
    expect(() => parseMetricsCsv(bad, "run.csv"))
      .toThrowError(/covered_cells/);
    expect(() => parseMetricsCsv(bad)).toThrowError(/unexpected header/);
  });

  it("rejects reordered columns even when the set matches", () => {
    const shuffled = [...METRICS_HEADER].reverse().join(",") + "\n" +
      goodCsv.split("\n").slice(1).join("\n");
    expect(() => parseMetricsCsv(shuffled)).toThrowError(SchemaError);
  });

  it("rejects a short row", () => {
    const lines = goodCsv.trimEnd().split("\n");
    lines[2] = lines[2]!.split(",").slice(0, 10).join(",");
    expect(() => parseMetricsCsv(lines.join("\n"), "x.csv"))
      .toThrowError(/row 2 has 10 fields/);
  });

  it("rejects non-numeric and empty cells, naming the column", () => {
    const nonNumeric = goodCsv.replace("300", "lots");
    expect(() => parseMetricsCsv(nonNumeric)).toThrowError(/covered_cells/);
    const lines = goodCsv.trimEnd().split("\n");
    const cells = lines[1]!.split(",");
    cells[3] = "";
    lines[1] = cells.join(",");
    expect(() => parseMetricsCsv(lines.join("\n")))
      .toThrowError(/coverage_m3/);
  });
});

function manifestText(mutate: (m: Record<string, unknown>) => void = () => {}) {
  const manifest: Record<string, unknown> = {
    schema: "volex-run/1",
    run_id: "abc123",
    config: makeConfig(),
    environment_hash: "f".repeat(64),
    explorable_cells: 1000,
    metrics_csv: "run.csv",
    result: {
      completed: true,
      completion_robot_iterations: 28,
      iterations: 7,
      final_covered_cells: 905,
    },
  };
  mutate(manifest);
  return JSON.stringify(manifest);
}

describe("manifest parsing", () => {
  it("accepts the simulator's shape", () => {
    const m = parseManifest(manifestText());
    expect(m.run_id).toBe("abc123");
    expect(m.explorable_cells).toBe(1000);
    expect(m.config.robot_count).toBe(4);
  });

  it("rejects a wrong schema tag, quoting the expected one", () => {
    const text = manifestText((m) => { m.schema = "volex-run/2"; });
    expect(() => parseManifest(text, "m.json"))
      .toThrowError(/volex-run\/1/);
  });

  it("rejects non-JSON input", () => {
    expect(() => parseManifest("{nope", "m.json")).toThrowError(/not JSON/);
  });

  it.each(["run_id", "config", "explorable_cells", "metrics_csv", "result"])(
    "rejects a manifest missing %s", (field) => {
      const text = manifestText((m) => { delete m[field]; });
      expect(() => parseManifest(text)).toThrowError(SchemaError);
    });

  it("rejects a config missing its grouping fields", () => {
    const text = manifestText((m) => {
      delete (m.config as Record<string, unknown>).coordinator;
    });
    expect(() => parseManifest(text)).toThrowError(/coordinator/);
  });
});

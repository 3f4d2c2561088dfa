// schema.ts — the file formats the simulator writes, validated strictly.
//
// Everything downstream (grouping, tables, plots) recomputes its statistics
// from the raw CSV rows; the manifest only supplies the resolved
// configuration and the explorable-cell count.

import Papa from "papaparse";

export const METRICS_HEADER = [
  "iter",
  "robot_iters",
  "covered_cells",
  "coverage_m3",
  "objective_value",
  "online_bound",
  "oblivious_bound",
  "online_ratio",
  "oblivious_ratio",
  "best_ratio",
  "plan_wall_ms",
] as const;

export const MANIFEST_SCHEMA = "volex-run/1";

/** Raised when a CSV or manifest does not match the simulator's contract. */
export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

/** Raised when the caller asks for something the inputs cannot support. */
export class UsageError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "UsageError";
  }
}

export interface MetricsRow {
  iter: number;
  robotIters: number;
  coveredCells: number;
  coverageM3: number;
  objectiveValue: number;
  onlineBound: number;
  obliviousBound: number;
  onlineRatio: number;
  obliviousRatio: number;
  bestRatio: number;
  planWallMs: number;
}

export interface RunConfig {
  extent: [number, number, number];
  resolution: number;
  env_kind: string;
  env_path: string;
  robot_count: number;
  master_seed: number;
  coordinator: string;
  completion_fraction: number;
  bounds_mode: string;
  objective: { weighting: string; env_mode: string; ray_sum_mode: boolean };
  [key: string]: unknown;
}

export interface RunManifest {
  schema: string;
  run_id: string;
  config: RunConfig;
  environment_hash: string;
  explorable_cells: number;
  metrics_csv: string;
  result: {
    completed: boolean;
    completion_robot_iterations: number | null;
    iterations: number;
    final_covered_cells: number;
  };
}

export function parseMetricsCsv(text: string, source = "<csv>"): MetricsRow[] {
  const parsed = Papa.parse<string[]>(text.trim(), { skipEmptyLines: true });
  if (parsed.errors.length > 0) {
    throw new SchemaError(`${source}: ${parsed.errors[0]!.message}`);
  }
  const [header, ...lines] = parsed.data;
  if (!header || header.join(",") !== METRICS_HEADER.join(",")) {
    throw new SchemaError(
      `${source}: unexpected header [${(header ?? []).join(",")}], ` +
        `expected [${METRICS_HEADER.join(",")}]`,
    );
  }
  return lines.map((cells, i) => {
    if (cells.length !== METRICS_HEADER.length) {
      throw new SchemaError(
        `${source}: row ${i + 1} has ${cells.length} fields`,
      );
    }
    const nums = cells.map((cell, j) => {
      const value = Number(cell);
      if (cell === "" || Number.isNaN(value)) {
        throw new SchemaError(
          `${source}: row ${i + 1} field ${METRICS_HEADER[j]}: ${cell!}`,
        );
      }
      return value;
    });
    return {
      iter: nums[0]!,
      robotIters: nums[1]!,
      coveredCells: nums[2]!,
      coverageM3: nums[3]!,
      objectiveValue: nums[4]!,
      onlineBound: nums[5]!,
      obliviousBound: nums[6]!,
      onlineRatio: nums[7]!,
      obliviousRatio: nums[8]!,
      bestRatio: nums[9]!,
      planWallMs: nums[10]!,
    };
  });
}

function expect(cond: boolean, source: string, what: string): void {
  if (!cond) throw new SchemaError(`${source}: ${what}`);
}

export function parseManifest(text: string, source = "<manifest>"): RunManifest {
  let data: unknown;
  try {
    data = JSON.parse(text);
  } catch (err) {
    throw new SchemaError(`${source}: not JSON (${(err as Error).message})`);
  }
  const m = data as Partial<RunManifest>;
  expect(m.schema === MANIFEST_SCHEMA, source,
    `schema tag ${String(m.schema)}, expected ${MANIFEST_SCHEMA}`);
  expect(typeof m.run_id === "string", source, "missing run_id");
  expect(typeof m.config === "object" && m.config !== null, source,
    "missing config");
  expect(typeof m.explorable_cells === "number", source,
    "missing explorable_cells");
  expect(typeof m.metrics_csv === "string", source, "missing metrics_csv");
  expect(typeof m.result === "object" && m.result !== null, source,
    "missing result");
  const config = m.config as RunConfig;
  expect(typeof config.robot_count === "number", source,
    "config missing robot_count");
  expect(typeof config.coordinator === "string", source,
    "config missing coordinator");
  expect(typeof config.resolution === "number", source,
    "config missing resolution");
  expect(typeof config.completion_fraction === "number", source,
    "config missing completion_fraction");
  expect(typeof config.objective === "object" && config.objective !== null,
    source, "config missing objective");
  return m as RunManifest;
}

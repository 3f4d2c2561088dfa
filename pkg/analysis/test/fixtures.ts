// Synthetic runs for the test suite: a config template that mirrors what
// the simulator resolves, a metrics-CSV builder, and a writer that drops
// (manifest, csv) pairs into a temp directory the way a sweep would.

import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { METRICS_HEADER, RunConfig, RunManifest } from "../src/schema.js";

export function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "volex-analysis-"));
}

type Overrides = Record<string, unknown> & {
  planner?: Record<string, unknown>;
  objective?: Record<string, unknown>;
};

export function makeConfig(overrides: Overrides = {}): RunConfig {
  const { planner = {}, objective = {}, ...rest } = overrides;
  return {
    extent: [4.0, 4.0, 2.0],
    resolution: 0.1,
    env_kind: "boxes",
    env_path: "",
    box_count: 8,
    box_size_range: [0.3, 0.8],
    occupancy_prior: 0.125,
    robot_count: 4,
    start: [],
    perturbation_radius: 0.5,
    master_seed: 0,
    coordinator: "sequential",
    planner: {
      horizon: 10,
      mcts_samples: 200,
      exploration_weight: 550.0,
      rsp_rounds: 3,
      include_lateral: false,
      threads: 1,
      ...planner,
    },
    objective: {
      weighting: "scaled-entropy",
      env_mode: "optimistic",
      mc_samples: 64,
      mc_seed: 0,
      discount: 0.7,
      ray_sum_mode: false,
      ...objective,
    },
    camera: {
      max_range: 2.4,
      resolution: [12, 19],
      fov_deg: [34.6, 43.6],
    },
    dist_factor: 500.0,
    view_threshold: 900.0,
    view_samples: 64,
    max_iterations: 400,
    completion_fraction: 0.9,
    bounds_mode: "mcts",
    zero_timing: true,
    ...rest,
  } as RunConfig;
}

export interface RunSpec {
  config: RunConfig;
  /** covered_cells per iteration, index = iter (0 is the bootstrap row). */
  covered: number[];
  /** best_ratio per iteration; defaults to a planner-flavored ramp. */
  ratios?: number[];
  explorable?: number;
}

export function metricsCsvText(spec: RunSpec): string {
  const robots = spec.config.robot_count;
  const volume = spec.config.resolution ** 3;
  const lines = [METRICS_HEADER.join(",")];
  spec.covered.forEach((cells, iter) => {
    const ratio = iter === 0 ? 0 : spec.ratios?.[iter] ?? 0.5 + 0.01 * iter;
    const objective = iter === 0 ? 0 : Math.max(0, 800 - 30 * iter);
    const online = iter === 0 ? 0 : objective + 200;
    const oblivious = iter === 0 ? 0 : objective + 350;
    lines.push([
      iter,
      iter * robots,
      cells,
      cells * volume,
      objective,
      online,
      oblivious,
      iter === 0 ? 0 : ratio,
      iter === 0 ? 0 : ratio * 0.9,
      iter === 0 ? 0 : ratio,
      0.0,
    ].join(","));
  });
  return lines.join("\n") + "\n";
}

/** Writes `${name}.csv` + `${name}.json`; returns the manifest path. The
 * result block is filled with decoy values on purpose: the analysis side
 * must recompute completion from the CSV, never trust the manifest. */
export function writeRun(dir: string, name: string, spec: RunSpec): string {
  const csvName = `${name}.csv`;
  writeFileSync(join(dir, csvName), metricsCsvText(spec));
  const manifest: RunManifest = {
    schema: "volex-run/1",
    run_id: `fixture-${name}`,
    config: spec.config,
    environment_hash: "0".repeat(64),
    explorable_cells: spec.explorable ?? 1000,
    metrics_csv: csvName,
    result: {
      completed: false,           // decoy
      completion_robot_iterations: 7777, // decoy
      iterations: spec.covered.length - 1,
      final_covered_cells: spec.covered[spec.covered.length - 1]!,
    },
  };
  const manifestPath = join(dir, `${name}.json`);
  writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + "\n");
  return manifestPath;
}

/** The three-group fixture the acceptance checks run against: same world,
 * three configurations (sequential, myopic, rsp+ray-sum), three seeds each,
 * every trial reaching the 90% threshold at a known row. The rsp trials
 * carry two absorbing rows past completion to exercise truncation. */
export function threeGroupFixture(dir: string): {
  paths: string[];
  byGroup: Record<"sequential" | "myopic" | "rsp", string[]>;
} {
  const curves: Record<string, number[][]> = {
    sequential: [
      [8, 150, 300, 450, 600, 720, 830, 905],
      [8, 140, 280, 430, 570, 700, 820, 890, 930],
      [8, 160, 320, 470, 620, 740, 850, 910],
    ],
    myopic: [
      [8, 100, 200, 300, 400, 500, 600, 700, 800, 860, 910],
      [8, 90, 190, 290, 390, 490, 590, 690, 790, 870, 905],
      [8, 110, 210, 310, 410, 510, 610, 710, 810, 880, 920],
    ],
    rsp: [
      [8, 130, 260, 390, 520, 640, 760, 850, 902, 902, 902],
      [8, 120, 250, 370, 500, 620, 730, 840, 895, 915, 915, 915],
      [8, 135, 270, 400, 530, 650, 770, 860, 908, 908, 908],
    ],
  };
  const byGroup: Record<"sequential" | "myopic" | "rsp", string[]> = {
    sequential: [], myopic: [], rsp: [],
  };
  const paths: string[] = [];
  for (const planner of ["sequential", "myopic", "rsp"] as const) {
    curves[planner]!.forEach((covered, seed) => {
      const config = makeConfig({
        coordinator: planner,
        master_seed: seed,
        objective: planner === "rsp" ? { ray_sum_mode: true } : {},
      });
      const ratios = covered.map(
        (_, i) => 0.4 + 0.03 * i + 0.005 * seed +
          (planner === "sequential" ? 0.1 : planner === "rsp" ? 0.05 : 0));
      const path = writeRun(dir, `${planner}-s${seed}`,
        { config, covered, ratios });
      byGroup[planner].push(path);
      paths.push(path);
    });
  }
  return { paths, byGroup };
}

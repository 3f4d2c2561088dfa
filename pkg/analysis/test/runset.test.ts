import { describe, expect, it } from "vitest";

import { groupKey, groupRuns, loadRun, loadRuns, trialCompletion }
  from "../src/runset.js";
import { makeConfig, tempDir, threeGroupFixture, writeRun }
  from "./fixtures.js";

describe("loading", () => {
  it("resolves the metrics csv relative to the manifest", () => {
    const dir = tempDir();
    const path = writeRun(dir, "a", {
      config: makeConfig(),
      covered: [8, 500, 901],
    });
    const run = loadRun(path);
    expect(run.rows).toHaveLength(3);
    expect(run.manifest.metrics_csv).toBe("a.csv"); // stayed relative
    expect(run.source).toBe(path);
  });
});

describe("grouping", () => {
  it("splits on config, ignores the master seed", () => {
    const dir = tempDir();
    const paths = [0, 1, 2].flatMap((seed) => [
      writeRun(dir, `seq-${seed}`, {
        config: makeConfig({ master_seed: seed }),
        covered: [8, 901],
      }),
      writeRun(dir, `myo-${seed}`, {
        config: makeConfig({ master_seed: seed, coordinator: "myopic" }),
        covered: [8, 901],
      }),
    ]);
    const groups = groupRuns(loadRuns(paths));
    expect(groups).toHaveLength(2);
    expect(groups.map((g) => g.runs.length)).toEqual([3, 3]);
    expect(groups.map((g) => g.planner)).toEqual(["myopic", "sequential"]);
  });

  it("keeps configs apart that differ outside the label fields", () => {
    const dir = tempDir();
    const paths = [
      writeRun(dir, "a", { config: makeConfig(), covered: [8, 901] }),
      writeRun(dir, "b", {
        config: makeConfig({ view_threshold: 300.0 }),
        covered: [8, 901],
      }),
    ];
    const groups = groupRuns(loadRuns(paths));
    expect(groups).toHaveLength(2);
    // Same headline facts, so the second label gets a disambiguator.
    expect(groups[0]!.label).not.toBe(groups[1]!.label);
    expect(groups.some((g) => g.label.endsWith("#2"))).toBe(true);
  });

  it("labels groups with environment, team size, planner, objective", () => {
    const dir = tempDir();
    const path = writeRun(dir, "a", {
      config: makeConfig({ objective: { ray_sum_mode: true } }),
      covered: [8, 901],
    });
    const [group] = groupRuns([loadRun(path)]);
    expect(group!.label).toBe(
      "boxes 4x4x2m @0.1 | 4 robots | sequential | " +
        "scaled-entropy/optimistic/ray-sum");
  });

  it("labels file-backed worlds by their path", () => {
    const dir = tempDir();
    const path = writeRun(dir, "a", {
      config: makeConfig({
        env_kind: "file",
        env_path: "warehouse.vox",
        extent: [2.4, 2.4, 0.9],
      }),
      covered: [8, 901],
    });
    const [group] = groupRuns([loadRun(path)]);
    expect(group!.environment).toBe("warehouse.vox 2.4x2.4x0.9m @0.1");
  });

  it("group key is stable under key ordering", () => {
    const config = makeConfig();
    const reordered = Object.fromEntries(
      Object.entries(config).reverse()) as typeof config;
    const manifest = (c: typeof config) => ({
      schema: "volex-run/1",
      run_id: "x",
      config: c,
      environment_hash: "",
      explorable_cells: 1,
      metrics_csv: "x.csv",
      result: {
        completed: true,
        completion_robot_iterations: null,
        iterations: 1,
        final_covered_cells: 1,
      },
    });
    expect(groupKey(manifest(config))).toBe(groupKey(manifest(reordered)));
  });
});

describe("trial completion", () => {
  it("is recomputed from the CSV, not read from the manifest", () => {
    // writeRun plants decoy values in result.completion_robot_iterations;
    // the first covered row at or over 90% of 1000 explorable cells is
    // iter 2 here, i.e. 8 robot-iterations.
    const dir = tempDir();
    const run = loadRun(writeRun(dir, "a", {
      config: makeConfig(),
      covered: [8, 450, 900, 930],
    }));
    expect(run.manifest.result.completion_robot_iterations).toBe(7777);
    expect(trialCompletion(run)).toBe(8);
  });

  it("is null when the budget runs out first", () => {
    const dir = tempDir();
    const run = loadRun(writeRun(dir, "a", {
      config: makeConfig(),
      covered: [8, 450, 600, 899],
    }));
    expect(trialCompletion(run)).toBeNull();
  });

  it("honors per-run completion fractions", () => {
    const dir = tempDir();
    const run = loadRun(writeRun(dir, "a", {
      config: makeConfig({ completion_fraction: 0.5 }),
      covered: [8, 450, 600, 899],
    }));
    expect(trialCompletion(run)).toBe(8); // 500-cell threshold, iter 2
  });
});

describe("three-group fixture sanity", () => {
  it("produces exactly three groups of three trials", () => {
    const dir = tempDir();
    const { paths } = threeGroupFixture(dir);
    const groups = groupRuns(loadRuns(paths));
    expect(groups).toHaveLength(3);
    expect(groups.map((g) => g.runs.length)).toEqual([3, 3, 3]);
    expect(groups.map((g) => g.planner).sort()).toEqual(
      ["myopic", "rsp", "sequential"]);
  });
});

// runset.ts — load (manifest, metrics) pairs and group them into trial sets.
//
// A group is "the same experiment, different master seed": the grouping key
// is the full resolved config with the seed removed, so the invariant that
// all runs in a group agree on everything else holds by construction.

import { readFileSync } from "node:fs";
import { dirname, isAbsolute, join } from "node:path";

import {
  MetricsRow,
  RunManifest,
  parseManifest,
  parseMetricsCsv,
} from "./schema.js";

export interface Run {
  manifest: RunManifest;
  rows: MetricsRow[];
  source: string;
}

export interface RunGroup {
  key: string;
  /** "<environment> | <robots> robots | <planner> | <objective>" */
  label: string;
  environment: string;
  robotCount: number;
  planner: string;
  objective: string;
  completionFraction: number;
  cellVolume: number;
  runs: Run[];
}

export type RunSet = RunGroup[];

export function loadRun(manifestPath: string): Run {
  const manifest = parseManifest(
    readFileSync(manifestPath, "utf8"), manifestPath);
  const csvPath = isAbsolute(manifest.metrics_csv)
    ? manifest.metrics_csv
    : join(dirname(manifestPath), manifest.metrics_csv);
  const rows = parseMetricsCsv(readFileSync(csvPath, "utf8"), csvPath);
  return { manifest, rows, source: manifestPath };
}

export function loadRuns(manifestPaths: string[]): Run[] {
  return manifestPaths.map(loadRun);
}

function canonical(value: unknown): string {
  if (Array.isArray(value)) {
    return `[${value.map(canonical).join(",")}]`;
  }
  if (typeof value === "object" && value !== null) {
    const entries = Object.entries(value as Record<string, unknown>)
      .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
      .map(([k, v]) => `${JSON.stringify(k)}:${canonical(v)}`);
    return `{${entries.join(",")}}`;
  }
  return JSON.stringify(value);
}

export function groupKey(manifest: RunManifest): string {
  const { master_seed: _seed, ...rest } = manifest.config;
  return canonical(rest);
}

function environmentLabel(run: Run): string {
  const c = run.manifest.config;
  const extent = (c.extent as number[]).join("x");
  const base = c.env_kind === "file" ? c.env_path : c.env_kind;
  return `${base} ${extent}m @${c.resolution}`;
}

function objectiveLabel(run: Run): string {
  const o = run.manifest.config.objective;
  const core = `${o.weighting}/${o.env_mode}`;
  return o.ray_sum_mode ? `${core}/ray-sum` : core;
}

export function groupRuns(runs: Run[]): RunSet {
  const groups = new Map<string, RunGroup>();
  for (const run of runs) {
    const key = groupKey(run.manifest);
    let group = groups.get(key);
    if (!group) {
      const c = run.manifest.config;
      group = {
        key,
        label: "",
        environment: environmentLabel(run),
        robotCount: c.robot_count,
        planner: c.coordinator,
        objective: objectiveLabel(run),
        completionFraction: c.completion_fraction,
        cellVolume: c.resolution ** 3,
        runs: [],
      };
      groups.set(key, group);
    }
    group.runs.push(run);
  }
  const list = [...groups.values()];
  // Short display labels; disambiguate if two distinct configs collide.
  const seen = new Map<string, number>();
  for (const group of list) {
    const base = `${group.environment} | ${group.robotCount} robots | ` +
      `${group.planner} | ${group.objective}`;
    const n = seen.get(base) ?? 0;
    seen.set(base, n + 1);
    group.label = n === 0 ? base : `${base} #${n + 1}`;
  }
  list.sort((a, b) => (a.label < b.label ? -1 : a.label > b.label ? 1 : 0));
  return list;
}

/** Per-trial completion: first robot-iteration whose covered-cell count
 * reaches the trial's completion fraction of its explorable volume, or
 * null when the budget ran out first. Recomputed from the CSV, never read
 * from the manifest result block. */
export function trialCompletion(run: Run): number | null {
  const threshold =
    run.manifest.config.completion_fraction * run.manifest.explorable_cells;
  for (const row of run.rows) {
    if (row.coveredCells >= threshold) return row.robotIters;
  }
  return null;
}

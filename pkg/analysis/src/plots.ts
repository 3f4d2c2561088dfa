// plots.ts — the two figures: coverage curves per group and
// suboptimality-ratio curves per planner. Both write an SVG and return
// the aggregated series they drew, so tests (and tables) can check the
// numbers without scraping the image.

import { writeFileSync } from "node:fs";

import { RunGroup, RunSet, trialCompletion } from "./runset.js";
import { SeriesPoint, XY, aggregateSeries, mean } from "./stats.js";
import { ChartSeries, ReferenceLine, lineChart } from "./svg.js";
import { SchemaError, UsageError } from "./schema.js";

export interface PlotResult {
  path: string;
  series: Array<{ label: string; points: SeriesPoint[] }>;
  svg: string;
}

function requireRuns(runset: RunSet, what: string): void {
  if (runset.length === 0 || runset.every((g) => g.runs.length === 0)) {
    throw new UsageError(`${what}: no runs to plot`);
  }
}

function coverageTrials(group: RunGroup): XY[][] {
  return group.runs.map((run) =>
    run.rows.map((row) => ({ x: row.robotIters, y: row.coverageM3 })));
}

/** Mean environment coverage vs robot-iterations, one curve per group,
 * shaded standard error over trial means, plus dashed lines at the maximum
 * explorable volume and at 90% of it. */
export function plotCoverage(runset: RunSet, outPath: string): PlotResult {
  requireRuns(runset, "plot_coverage");
  const series: ChartSeries[] = runset.map((group) => ({
    label: group.label,
    points: aggregateSeries(coverageTrials(group)),
  }));

  // Generated worlds differ per seed, so each group's ceiling is the mean
  // explorable volume of its trials; equal ceilings collapse to one pair
  // of lines and only distinct ones need naming.
  const ceilings = new Map<string, { volume: number; environment: string }>();
  for (const group of runset) {
    const volume = mean(group.runs.map(
      (run) => run.manifest.explorable_cells * group.cellVolume));
    ceilings.set(volume.toPrecision(6), { volume, environment: group.environment });
  }
  const referenceLines: ReferenceLine[] = [];
  for (const { volume, environment } of ceilings.values()) {
    const tag = ceilings.size > 1 ? ` (${environment})` : "";
    referenceLines.push(
      { y: volume, label: `max${tag}` },
      { y: 0.9 * volume, label: `90%${tag}` },
    );
  }

  const svg = lineChart({
    title: "Environment coverage",
    xLabel: "robot-iterations",
    yLabel: "coverage (m^3)",
    series,
    referenceLines,
  });
  writeFileSync(outPath, svg);
  return { path: outPath, series, svg };
}

/** Mean best suboptimality ratio vs robot-iterations, one curve per
 * planner. Each trial contributes data up to its completion time only, and
 * the bootstrap row has no plan, so it is skipped. */
export function plotBounds(runset: RunSet, outPath: string): PlotResult {
  requireRuns(runset, "plot_bounds");
  if (runset.every((g) =>
    g.runs.every((r) => r.manifest.config.bounds_mode === "none"))) {
    throw new SchemaError(
      "plot_bounds: no bound columns populated in any run " +
        "(all were recorded with bounds_mode \"none\")");
  }

  const byPlanner = new Map<string, XY[][]>();
  for (const group of runset) {
    const trials = group.runs.map((run) => {
      // A CLI run stops at completion, but a hand-driven series may carry
      // absorbing rows past it; those say nothing about planning quality.
      const done = trialCompletion(run);
      return run.rows
        .filter((row) => row.iter > 0
          && (done === null || row.robotIters <= done))
        .map((row) => ({ x: row.robotIters, y: row.bestRatio }));
    });
    const bucket = byPlanner.get(group.planner);
    if (bucket) bucket.push(...trials);
    else byPlanner.set(group.planner, trials);
  }

  const series: ChartSeries[] = [...byPlanner.entries()]
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([planner, trials]) => ({
      label: planner,
      points: aggregateSeries(trials),
    }));

  const svg = lineChart({
    title: "Certified fraction of optimal",
    xLabel: "robot-iterations",
    yLabel: "best bound ratio",
    series,
    referenceLines: [{ y: 1.0, label: "optimal" }],
  });
  writeFileSync(outPath, svg);
  return { path: outPath, series, svg };
}

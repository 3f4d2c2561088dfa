// table.ts — completion-time summary: how many robot-iterations until each
// configuration first reached its completion threshold, averaged over
// trials, with a ratio column against a baseline group.

import { RunSet, trialCompletion } from "./runset.js";
import { UsageError } from "./schema.js";
import { mean, stderr } from "./stats.js";

export interface CompletionRow {
  label: string;
  trials: number;
  completedTrials: number;
  /** Mean robot-iterations to completion; null when any trial ran out of
   * budget (an unfinished trial has no finite completion time to average). */
  meanRobotIters: number | null;
  stderrRobotIters: number | null;
  /** This row's mean over the baseline row's mean; 1.00 for the baseline. */
  ratio: number | null;
}

export interface CompletionTable {
  rows: CompletionRow[];
  baseline: string;
  text: string;
  csv: string;
}

export interface TableOptions {
  /** Label (or unique label substring) of the group to take ratios
   * against; defaults to the first group. */
  baseline?: string;
}

function findBaseline(rows: CompletionRow[], wanted?: string): CompletionRow {
  if (wanted === undefined) return rows[0]!;
  const hits = rows.filter((r) => r.label.includes(wanted));
  if (hits.length !== 1) {
    throw new UsageError(
      `baseline "${wanted}" matches ${hits.length} groups, expected 1`);
  }
  return hits[0]!;
}

function fmtMean(row: CompletionRow): string {
  if (row.meanRobotIters === null) return ">budget";
  return `${row.meanRobotIters.toFixed(1)} ± ${
    row.stderrRobotIters!.toFixed(1)}`;
}

export function completionTable(
  runset: RunSet, options: TableOptions = {}): CompletionTable {
  if (runset.length === 0) {
    throw new UsageError("completion_table: no runs");
  }
  const rows: CompletionRow[] = runset.map((group) => {
    const completions = group.runs.map(trialCompletion);
    const finished = completions.filter((c): c is number => c !== null);
    const allDone = finished.length === group.runs.length;
    return {
      label: group.label,
      trials: group.runs.length,
      completedTrials: finished.length,
      meanRobotIters: allDone ? mean(finished) : null,
      stderrRobotIters: allDone ? stderr(finished) : null,
      ratio: null,
    };
  });

  const baseline = findBaseline(rows, options.baseline);
  for (const row of rows) {
    if (row.meanRobotIters !== null && baseline.meanRobotIters !== null) {
      row.ratio = row.meanRobotIters / baseline.meanRobotIters;
    }
  }

  const header = ["group", "trials", "completion (robot-iters)", "ratio"];
  const cells = rows.map((row) => [
    row.label,
    `${row.completedTrials}/${row.trials}`,
    fmtMean(row),
    row.ratio === null ? "-" : row.ratio.toFixed(2),
  ]);
  const widths = header.map((h, i) =>
    Math.max(h.length, ...cells.map((r) => r[i]!.length)));
  const line = (parts: string[]) =>
    parts.map((p, i) => p.padEnd(widths[i]!)).join("  ").trimEnd();
  const text = [
    line(header),
    line(widths.map((w) => "-".repeat(w))),
    ...cells.map(line),
    `ratios are relative to: ${baseline.label}`,
  ].join("\n");

  const csv = [
    "group,trials,completed,mean_robot_iters,stderr_robot_iters,ratio",
    ...rows.map((row) => [
      JSON.stringify(row.label),
      row.trials,
      row.completedTrials,
      row.meanRobotIters === null ? ">budget" : row.meanRobotIters,
      row.stderrRobotIters === null ? "" : row.stderrRobotIters,
      row.ratio === null ? "" : row.ratio,
    ].join(",")),
  ].join("\n") + "\n";

  return { rows, baseline: baseline.label, text, csv };
}

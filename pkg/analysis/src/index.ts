export {
  METRICS_HEADER,
  MANIFEST_SCHEMA,
  SchemaError,
  UsageError,
  parseManifest,
  parseMetricsCsv,
} from "./schema.js";
export type { MetricsRow, RunConfig, RunManifest } from "./schema.js";
export {
  groupKey,
  groupRuns,
  loadRun,
  loadRuns,
  trialCompletion,
} from "./runset.js";
export type { Run, RunGroup, RunSet } from "./runset.js";
export { aggregateSeries, mean, sampleStd, stderr } from "./stats.js";
export type { SeriesPoint, XY } from "./stats.js";
export { lineChart, niceTicks } from "./svg.js";
export type { ChartOptions, ChartSeries, ReferenceLine } from "./svg.js";
export { plotBounds, plotCoverage } from "./plots.js";
export type { PlotResult } from "./plots.js";
export { completionTable } from "./table.js";
export type { CompletionRow, CompletionTable, TableOptions } from "./table.js";
export { main } from "./cli.js";

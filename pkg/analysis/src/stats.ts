// stats.ts — the few aggregates every figure shares.
//
// Standard error here is always over trial means: each trial contributes
// one number per x, and the band half-width is std(trials, ddof=1)/sqrt(n).

export function mean(xs: number[]): number {
  let total = 0;
  for (const x of xs) total += x;
  return total / xs.length;
}

export function sampleStd(xs: number[]): number {
  if (xs.length < 2) return 0;
  const m = mean(xs);
  let ss = 0;
  for (const x of xs) ss += (x - m) * (x - m);
  return Math.sqrt(ss / (xs.length - 1));
}

export function stderr(xs: number[]): number {
  if (xs.length < 2) return 0;
  return sampleStd(xs) / Math.sqrt(xs.length);
}

export interface SeriesPoint {
  x: number;
  mean: number;
  stderr: number;
  n: number;
}

export interface XY {
  x: number;
  y: number;
}

/** Pointwise aggregation of trial curves: at every x any trial visited,
 * average the trials that have a value there. Trials of different lengths
 * simply stop contributing past their last row. */
export function aggregateSeries(trials: XY[][]): SeriesPoint[] {
  const byX = new Map<number, number[]>();
  for (const trial of trials) {
    for (const { x, y } of trial) {
      const bucket = byX.get(x);
      if (bucket) bucket.push(y);
      else byX.set(x, [y]);
    }
  }
  return [...byX.entries()]
    .sort(([a], [b]) => a - b)
    .map(([x, ys]) => ({ x, mean: mean(ys), stderr: stderr(ys), n: ys.length }));
}

/**
 * Grouping and seed aggregation for convergence curves.
 *
 * Rows are grouped by (game, algo); seeds are aligned on the first seed's
 * checkpoint episodes, matching other seeds' checkpoints by nearest
 * episode count within 5%.  Larger misalignment is an error rather than a
 * silent interpolation.
 */

import { RunRow } from "./csv.js";

export interface BandPoint {
  episodes: number;
  mean: number;
  half: number; // confidence half-width across seeds
  seeds: number;
}

export interface Curve {
  algo: string;
  points: BandPoint[];
}

export interface FigureData {
  game: string;
  curves: Curve[];
}

export class AlignmentError extends Error {}

/** z-quantile of the standard normal for central `level` coverage. */
export function zValue(level: number): number {
  if (!(level > 0 && level < 1)) {
    throw new RangeError(`confidence level must lie in (0,1), got ${level}`);
  }
  if (Math.abs(level - 0.95) < 1e-12) {
    return 1.96; // the conventional two-sided constant
  }
  return normalQuantile(0.5 + level / 2);
}

/** Acklam's rational approximation of the normal inverse CDF. */
function normalQuantile(p: number): number {
  const a = [-3.969683028665376e1, 2.209460984245205e2, -2.759285104469687e2,
    1.38357751867269e2, -3.066479806614716e1, 2.506628277459239];
  const b = [-5.447609879822406e1, 1.615858368580409e2, -1.556989798598866e2,
    6.680131188771972e1, -1.328068155288572e1];
  const c = [-7.784894002430293e-3, -3.223964580411365e-1, -2.400758277161838,
    -2.549732539343734, 4.374664141464968, 2.938163982698783];
  const d = [7.784695709041462e-3, 3.224671290700398e-1, 2.445134137142996,
    3.754408661907416];
  const pl = 0.02425;
  if (p < pl) {
    const q = Math.sqrt(-2 * Math.log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
      ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  if (p > 1 - pl) {
    return -normalQuantile(1 - p);
  }
  const q = p - 0.5;
  const r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
    (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

/** Sample standard deviation (n-1 denominator); zero for a single value. */
export function sampleStd(values: number[]): number {
  if (values.length < 2) return 0;
  const mean = values.reduce((s, v) => s + v, 0) / values.length;
  const ss = values.reduce((s, v) => s + (v - mean) * (v - mean), 0);
  return Math.sqrt(ss / (values.length - 1));
}

export function confidenceHalfWidth(values: number[], level = 0.95): number {
  return (zValue(level) * sampleStd(values)) / Math.sqrt(values.length);
}

export function groupFigures(rows: RunRow[], level = 0.95): FigureData[] {
  const byGame = new Map<string, Map<string, Map<number, RunRow[]>>>();
  for (const row of rows) {
    let algos = byGame.get(row.game);
    if (!algos) byGame.set(row.game, (algos = new Map()));
    let seeds = algos.get(row.algo);
    if (!seeds) algos.set(row.algo, (seeds = new Map()));
    let list = seeds.get(row.seed);
    if (!list) seeds.set(row.seed, (list = []));
    list.push(row);
  }
  const figures: FigureData[] = [];
  for (const [game, algos] of [...byGame.entries()].sort()) {
    const curves: Curve[] = [];
    for (const [algo, seeds] of [...algos.entries()].sort()) {
      curves.push({ algo, points: alignSeeds(game, algo, seeds, level) });
    }
    figures.push({ game, curves });
  }
  return figures;
}

function alignSeeds(
  game: string,
  algo: string,
  seeds: Map<number, RunRow[]>,
  level: number,
): BandPoint[] {
  const seedIds = [...seeds.keys()].sort((a, b) => a - b);
  if (seedIds.length === 0) {
    throw new AlignmentError(`${game}/${algo}: empty group`);
  }
  const perSeed = seedIds.map((id) =>
    [...seeds.get(id)!].sort((a, b) => a.episodes - b.episodes),
  );
  const reference = perSeed[0];
  const points: BandPoint[] = [];
  for (const ref of reference) {
    const values: number[] = [];
    for (let s = 0; s < perSeed.length; s++) {
      const rows = perSeed[s];
      let best: RunRow | null = null;
      let bestGap = Infinity;
      for (const row of rows) {
        const gap = Math.abs(row.episodes - ref.episodes);
        if (gap < bestGap) {
          best = row;
          bestGap = gap;
        }
      }
      if (!best || bestGap > 0.05 * ref.episodes) {
        throw new AlignmentError(
          `${game}/${algo}: seed ${seedIds[s]} has no checkpoint within 5% of ` +
            `${ref.episodes} episodes`,
        );
      }
      values.push(best.exploitability);
    }
    points.push({
      episodes: ref.episodes,
      mean: values.reduce((a, v) => a + v, 0) / values.length,
      half: confidenceHalfWidth(values, level),
      seeds: values.length,
    });
  }
  return points;
}

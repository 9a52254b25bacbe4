/**
 * Backend-independent chart geometry for convergence figures.
 *
 * One figure per game: x is the number of sampled episodes (linear),
 * y is exploitability on a log scale with a shaded confidence band per
 * algorithm.  Produces a flat shape list the SVG and PNG backends render
 * identically.
 */

import { FigureData } from "./stats.js";

export type Shape =
  | { kind: "rect"; x: number; y: number; w: number; h: number; color: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number }
  | { kind: "polyline"; points: [number, number][]; color: string; width: number }
  | { kind: "polygon"; points: [number, number][]; color: string; opacity: number }
  | { kind: "text"; x: number; y: number; text: string; color: string; size: number; anchor: "start" | "middle" | "end" };

export interface Chart {
  width: number;
  height: number;
  shapes: Shape[];
}

const PALETTE = ["#4363d8", "#e6194b", "#3cb44b", "#9a6324", "#911eb4", "#f58231", "#469990"];
const W = 640;
const H = 400;
const ML = 70;
const MR = 20;
const MT = 40;
const MB = 55;

export function buildChart(figure: FigureData, confidence = 0.95): Chart {
  const shapes: Shape[] = [];
  const pw = W - ML - MR;
  const ph = H - MT - MB;
  shapes.push({ kind: "rect", x: 0, y: 0, w: W, h: H, color: "#ffffff" });

  const allPoints = figure.curves.flatMap((c) => c.points);
  if (allPoints.length === 0) {
    throw new Error(`figure ${figure.game} has no data points`);
  }
  const xMax = Math.max(...allPoints.map((p) => p.episodes));
  const xMin = 0;
  // Log-y needs strictly positive bounds; clamp exact zeros one decade
  // below the smallest positive value in the figure.
  const positives = allPoints
    .flatMap((p) => [p.mean - p.half, p.mean, p.mean + p.half])
    .filter((v) => v > 0);
  if (positives.length === 0) {
    throw new Error(`figure ${figure.game} has no positive exploitability values`);
  }
  const floor = Math.min(...positives) / 10;
  const yLo = Math.pow(10, Math.floor(Math.log10(floor)));
  const yHi = Math.pow(10, Math.ceil(Math.log10(Math.max(...positives))));

  const xOf = (e: number) => ML + ((e - xMin) / (xMax - xMin || 1)) * pw;
  // Non-positive values (possible for band lower edges) sit on the axis floor.
  const yOf = (v: number) => {
    const clamped = Math.max(v, yLo);
    return MT + ph - ((Math.log10(clamped) - Math.log10(yLo)) / (Math.log10(yHi) - Math.log10(yLo))) * ph;
  };

  // log-y grid and tick labels at powers of ten
  for (let d = Math.round(Math.log10(yLo)); d <= Math.round(Math.log10(yHi)); d++) {
    const y = yOf(Math.pow(10, d));
    shapes.push({ kind: "line", x1: ML, y1: y, x2: ML + pw, y2: y, color: "#e8e8e8", width: 0.6 });
    shapes.push({ kind: "text", x: ML - 6, y: y + 3, text: `1e${d}`, color: "#555555", size: 9, anchor: "end" });
  }
  // x ticks
  for (const frac of [0, 0.25, 0.5, 0.75, 1]) {
    const e = xMin + frac * (xMax - xMin);
    const x = xOf(e);
    shapes.push({ kind: "line", x1: x, y1: MT + ph, x2: x, y2: MT + ph + 4, color: "#333333", width: 0.8 });
    shapes.push({ kind: "text", x, y: MT + ph + 16, text: compactNumber(e), color: "#555555", size: 9, anchor: "middle" });
  }

  figure.curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts = [...curve.points].sort((a, b) => a.episodes - b.episodes);
    const upper: [number, number][] = pts.map((p) => [xOf(p.episodes), yOf(p.mean + p.half)]);
    const lower: [number, number][] = pts.map((p) => [xOf(p.episodes), yOf(Math.max(p.mean - p.half, floor))]);
    if (pts.length > 1) {
      shapes.push({ kind: "polygon", points: [...upper, ...lower.reverse()], color, opacity: 0.18 });
    }
    shapes.push({
      kind: "polyline",
      points: pts.map((p) => [xOf(p.episodes), yOf(p.mean)]),
      color,
      width: 1.6,
    });
  });

  // axes
  shapes.push({ kind: "line", x1: ML, y1: MT, x2: ML, y2: MT + ph, color: "#333333", width: 1 });
  shapes.push({ kind: "line", x1: ML, y1: MT + ph, x2: ML + pw, y2: MT + ph, color: "#333333", width: 1 });
  shapes.push({ kind: "text", x: ML + pw / 2, y: H - 14, text: "episodes", color: "#333333", size: 11, anchor: "middle" });
  shapes.push({ kind: "text", x: ML, y: MT - 22, text: figure.game, color: "#111111", size: 13, anchor: "start" });
  shapes.push({
    kind: "text", x: ML, y: MT - 8,
    text: `exploitability (log scale), ${Math.round(confidence * 100)}% band over seeds`,
    color: "#666666", size: 9, anchor: "start",
  });

  // legend
  figure.curves.forEach((curve, i) => {
    const color = PALETTE[i % PALETTE.length];
    const y = MT + 12 + i * 14;
    const x = ML + pw - 150;
    shapes.push({ kind: "line", x1: x, y1: y, x2: x + 18, y2: y, color, width: 2 });
    shapes.push({ kind: "text", x: x + 24, y: y + 3, text: curve.algo, color: "#333333", size: 9, anchor: "start" });
  });

  return { width: W, height: H, shapes };
}

function compactNumber(v: number): string {
  if (v >= 1_000_000) return `${trim(v / 1_000_000)}m`;
  if (v >= 1_000) return `${trim(v / 1_000)}k`;
  return `${Math.round(v)}`;
}

function trim(v: number): string {
  const s = v.toFixed(1);
  return s.endsWith(".0") ? s.slice(0, -2) : s;
}

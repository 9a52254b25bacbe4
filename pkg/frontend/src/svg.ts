/** SVG rendering of the backend-independent chart shapes. */

import { Chart, Shape } from "./chart.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function shapeToSvg(shape: Shape): string {
  switch (shape.kind) {
    case "rect":
      return `<rect x="${fmt(shape.x)}" y="${fmt(shape.y)}" width="${fmt(shape.w)}" height="${fmt(shape.h)}" fill="${shape.color}"/>`;
    case "line":
      return `<line x1="${fmt(shape.x1)}" y1="${fmt(shape.y1)}" x2="${fmt(shape.x2)}" y2="${fmt(shape.y2)}" stroke="${shape.color}" stroke-width="${shape.width}"/>`;
    case "polyline": {
      const pts = shape.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      return `<polyline fill="none" stroke="${shape.color}" stroke-width="${shape.width}" points="${pts}"/>`;
    }
    case "polygon": {
      const pts = shape.points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
      return `<polygon fill="${shape.color}" fill-opacity="${shape.opacity}" points="${pts}"/>`;
    }
    case "text":
      return `<text x="${fmt(shape.x)}" y="${fmt(shape.y)}" font-size="${shape.size}" fill="${shape.color}" text-anchor="${shape.anchor}" font-family="Helvetica, Arial, sans-serif">${esc(shape.text)}</text>`;
  }
}

export function chartToSvg(chart: Chart): string {
  const body = chart.shapes.map(shapeToSvg).join("\n");
  return `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${chart.width} ${chart.height}">\n${body}\n</svg>\n`;
}

/**
 * PNG rendering without native image dependencies: the chart shapes are
 * rasterized into an RGBA buffer (scanline polygon fill, 1px lines drawn
 * as thin quads, a classic 5x7 bitmap font for labels) and encoded as a
 * single-IDAT PNG via node's zlib.
 */

import { deflateSync } from "node:zlib";

import { Chart, Shape } from "./chart.js";

const SCALE = 2; // supersample factor baked into the raster for crisper output

class Raster {
  readonly w: number;
  readonly h: number;
  readonly data: Uint8ClampedArray;

  constructor(w: number, h: number) {
    this.w = w;
    this.h = h;
    this.data = new Uint8ClampedArray(w * h * 4).fill(255);
  }

  blend(x: number, y: number, rgb: [number, number, number], alpha: number): void {
    if (x < 0 || y < 0 || x >= this.w || y >= this.h || alpha <= 0) return;
    const i = (y * this.w + x) * 4;
    const inv = 1 - alpha;
    this.data[i] = rgb[0] * alpha + this.data[i] * inv;
    this.data[i + 1] = rgb[1] * alpha + this.data[i + 1] * inv;
    this.data[i + 2] = rgb[2] * alpha + this.data[i + 2] * inv;
    this.data[i + 3] = 255;
  }

  fillPolygon(points: [number, number][], rgb: [number, number, number], alpha: number): void {
    if (points.length < 3) return;
    const ys = points.map((p) => p[1]);
    const y0 = Math.max(0, Math.floor(Math.min(...ys)));
    const y1 = Math.min(this.h - 1, Math.ceil(Math.max(...ys)));
    for (let y = y0; y <= y1; y++) {
      const yc = y + 0.5;
      const xs: number[] = [];
      for (let i = 0; i < points.length; i++) {
        const [ax, ay] = points[i];
        const [bx, by] = points[(i + 1) % points.length];
        if ((ay <= yc && by > yc) || (by <= yc && ay > yc)) {
          xs.push(ax + ((yc - ay) / (by - ay)) * (bx - ax));
        }
      }
      xs.sort((a, b) => a - b);
      for (let k = 0; k + 1 < xs.length; k += 2) {
        const xa = Math.max(0, Math.round(xs[k]));
        const xb = Math.min(this.w - 1, Math.round(xs[k + 1]) - 1);
        for (let x = xa; x <= xb; x++) this.blend(x, y, rgb, alpha);
      }
    }
  }

  line(x1: number, y1: number, x2: number, y2: number,
       rgb: [number, number, number], width: number): void {
    const dx = x2 - x1;
    const dy = y2 - y1;
    const len = Math.hypot(dx, dy);
    if (len === 0) {
      this.blend(Math.round(x1), Math.round(y1), rgb, 1);
      return;
    }
    const nx = (-dy / len) * (width / 2);
    const ny = (dx / len) * (width / 2);
    this.fillPolygon(
      [[x1 + nx, y1 + ny], [x2 + nx, y2 + ny], [x2 - nx, y2 - ny], [x1 - nx, y1 - ny]],
      rgb, 1);
  }
}

// Classic 5x7 glyphs, one byte per column, bit 0 = top row.
const FONT: Record<string, number[]> = {
  " ": [0x00, 0x00, 0x00, 0x00, 0x00], ".": [0x00, 0x60, 0x60, 0x00, 0x00],
  ",": [0x00, 0x50, 0x30, 0x00, 0x00], ":": [0x00, 0x36, 0x36, 0x00, 0x00],
  "-": [0x08, 0x08, 0x08, 0x08, 0x08], "+": [0x08, 0x08, 0x3e, 0x08, 0x08],
  "_": [0x40, 0x40, 0x40, 0x40, 0x40], "(": [0x00, 0x1c, 0x22, 0x41, 0x00],
  ")": [0x00, 0x41, 0x22, 0x1c, 0x00], "/": [0x20, 0x10, 0x08, 0x04, 0x02],
  "%": [0x23, 0x13, 0x08, 0x64, 0x62], "=": [0x14, 0x14, 0x14, 0x14, 0x14],
  "0": [0x3e, 0x51, 0x49, 0x45, 0x3e], "1": [0x00, 0x42, 0x7f, 0x40, 0x00],
  "2": [0x42, 0x61, 0x51, 0x49, 0x46], "3": [0x21, 0x41, 0x45, 0x4b, 0x31],
  "4": [0x18, 0x14, 0x12, 0x7f, 0x10], "5": [0x27, 0x45, 0x45, 0x45, 0x39],
  "6": [0x3c, 0x4a, 0x49, 0x49, 0x30], "7": [0x01, 0x71, 0x09, 0x05, 0x03],
  "8": [0x36, 0x49, 0x49, 0x49, 0x36], "9": [0x06, 0x49, 0x49, 0x29, 0x1e],
  a: [0x20, 0x54, 0x54, 0x54, 0x78], b: [0x7f, 0x48, 0x44, 0x44, 0x38],
  c: [0x38, 0x44, 0x44, 0x44, 0x20], d: [0x38, 0x44, 0x44, 0x48, 0x7f],
  e: [0x38, 0x54, 0x54, 0x54, 0x18], f: [0x08, 0x7e, 0x09, 0x01, 0x02],
  g: [0x0c, 0x52, 0x52, 0x52, 0x3e], h: [0x7f, 0x08, 0x04, 0x04, 0x78],
  i: [0x00, 0x44, 0x7d, 0x40, 0x00], j: [0x20, 0x40, 0x44, 0x3d, 0x00],
  k: [0x7f, 0x10, 0x28, 0x44, 0x00], l: [0x00, 0x41, 0x7f, 0x40, 0x00],
  m: [0x7c, 0x04, 0x18, 0x04, 0x78], n: [0x7c, 0x08, 0x04, 0x04, 0x78],
  o: [0x38, 0x44, 0x44, 0x44, 0x38], p: [0x7c, 0x14, 0x14, 0x14, 0x08],
  q: [0x08, 0x14, 0x14, 0x18, 0x7c], r: [0x7c, 0x08, 0x04, 0x04, 0x08],
  s: [0x48, 0x54, 0x54, 0x54, 0x20], t: [0x04, 0x3f, 0x44, 0x40, 0x20],
  u: [0x3c, 0x40, 0x40, 0x20, 0x7c], v: [0x1c, 0x20, 0x40, 0x20, 0x1c],
  w: [0x3c, 0x40, 0x30, 0x40, 0x3c], x: [0x44, 0x28, 0x10, 0x28, 0x44],
  y: [0x0c, 0x50, 0x50, 0x50, 0x3c], z: [0x44, 0x64, 0x54, 0x4c, 0x44],
};

function drawText(raster: Raster, shape: Extract<Shape, { kind: "text" }>): void {
  const rgb = hexToRgb(shape.color);
  const px = Math.max(1, Math.round((shape.size * SCALE) / 8));
  const text = shape.text.toLowerCase();
  const advance = 6 * px;
  const total = text.length * advance;
  let x0 = shape.x * SCALE;
  if (shape.anchor === "middle") x0 -= total / 2;
  if (shape.anchor === "end") x0 -= total;
  const y0 = shape.y * SCALE - 7 * px; // baseline at y
  for (const ch of text) {
    const glyph = FONT[ch] ?? FONT["."];
    for (let col = 0; col < 5; col++) {
      for (let bit = 0; bit < 7; bit++) {
        if (glyph[col] & (1 << bit)) {
          for (let sx = 0; sx < px; sx++) {
            for (let sy = 0; sy < px; sy++) {
              raster.blend(Math.round(x0 + col * px + sx),
                           Math.round(y0 + bit * px + sy), rgb, 1);
            }
          }
        }
      }
    }
    x0 += advance;
  }
}

function hexToRgb(color: string): [number, number, number] {
  const hex = color.replace("#", "");
  return [
    parseInt(hex.slice(0, 2), 16),
    parseInt(hex.slice(2, 4), 16),
    parseInt(hex.slice(4, 6), 16),
  ];
}

export function chartToPng(chart: Chart): Buffer {
  const raster = new Raster(chart.width * SCALE, chart.height * SCALE);
  for (const shape of chart.shapes) {
    switch (shape.kind) {
      case "rect":
        raster.fillPolygon(
          scalePts([[shape.x, shape.y], [shape.x + shape.w, shape.y],
                    [shape.x + shape.w, shape.y + shape.h], [shape.x, shape.y + shape.h]]),
          hexToRgb(shape.color), 1);
        break;
      case "line":
        raster.line(shape.x1 * SCALE, shape.y1 * SCALE, shape.x2 * SCALE, shape.y2 * SCALE,
                    hexToRgb(shape.color), Math.max(1, shape.width * SCALE));
        break;
      case "polyline":
        for (let i = 0; i + 1 < shape.points.length; i++) {
          raster.line(shape.points[i][0] * SCALE, shape.points[i][1] * SCALE,
                      shape.points[i + 1][0] * SCALE, shape.points[i + 1][1] * SCALE,
                      hexToRgb(shape.color), Math.max(1, shape.width * SCALE));
        }
        break;
      case "polygon":
        raster.fillPolygon(scalePts(shape.points), hexToRgb(shape.color), shape.opacity);
        break;
      case "text":
        drawText(raster, shape);
        break;
    }
  }
  return encodePng(raster);
}

function scalePts(points: [number, number][]): [number, number][] {
  return points.map(([x, y]) => [x * SCALE, y * SCALE]);
}

// ---------------------------------------------------------------------------
// Minimal PNG encoding: 8-bit RGBA, filter 0, one IDAT chunk.
// ---------------------------------------------------------------------------

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Buffer): number {
  let c = 0xffffffff;
  for (const byte of buf) {
    c = CRC_TABLE[(c ^ byte) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, data: Buffer): Buffer {
  const head = Buffer.alloc(4);
  head.writeUInt32BE(data.length);
  const body = Buffer.concat([Buffer.from(type, "ascii"), data]);
  const crc = Buffer.alloc(4);
  crc.writeUInt32BE(crc32(body));
  return Buffer.concat([head, body, crc]);
}

function encodePng(raster: Raster): Buffer {
  const { w, h, data } = raster;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(w, 0);
  ihdr.writeUInt32BE(h, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 6; // RGBA
  const raw = Buffer.alloc(h * (1 + w * 4));
  for (let y = 0; y < h; y++) {
    raw[y * (1 + w * 4)] = 0; // filter: none
    raw.set(data.subarray(y * w * 4, (y + 1) * w * 4), y * (1 + w * 4) + 1);
  }
  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", deflateSync(raw)),
    chunk("IEND", Buffer.alloc(0)),
  ]);
}

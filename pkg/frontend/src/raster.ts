/** Pixel buffer plus the drawing primitives the figure scripts share. */
import {
  AXIS_COLOR,
  BACKGROUND,
  GRID_COLOR,
  HEIGHT,
  MARGIN,
  Rgb,
  TEXT_SCALE,
  TICK_LENGTH,
  WIDTH,
} from "./theme";
import { GLYPH_HEIGHT, GLYPH_WIDTH, glyphFor } from "./font";

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width = WIDTH, height = HEIGHT) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 3);
    this.fill(BACKGROUND);
  }

  fill(color: Rgb): void {
    for (let p = 0; p < this.pixels.length; p += 3) {
      this.pixels[p] = color.r;
      this.pixels[p + 1] = color.g;
      this.pixels[p + 2] = color.b;
    }
  }

  set(x: number, y: number, color: Rgb): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) {
      return;
    }
    const p = (yi * this.width + xi) * 3;
    this.pixels[p] = color.r;
    this.pixels[p + 1] = color.g;
    this.pixels[p + 2] = color.b;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Rgb): void {
    for (let y = Math.round(y0); y < Math.round(y0 + h); y++) {
      for (let x = Math.round(x0); x < Math.round(x0 + w); x++) {
        this.set(x, y, color);
      }
    }
  }

  /** Bresenham line with an optional on/off dash pattern in pixels. */
  line(x0: number, y0: number, x1: number, y1: number, color: Rgb, dash: number[] | null = null): void {
    let x = Math.round(x0);
    let y = Math.round(y0);
    const xe = Math.round(x1);
    const ye = Math.round(y1);
    const dx = Math.abs(xe - x);
    const dy = -Math.abs(ye - y);
    const sx = x < xe ? 1 : -1;
    const sy = y < ye ? 1 : -1;
    let err = dx + dy;
    let travelled = 0;
    const period = dash ? dash.reduce((a, b) => a + b, 0) : 0;
    for (;;) {
      let on = true;
      if (dash) {
        const t = travelled % period;
        let acc = 0;
        for (let s = 0; s < dash.length; s++) {
          acc += dash[s];
          if (t < acc) {
            on = s % 2 === 0;
            break;
          }
        }
      }
      if (on) {
        // thicken slightly for visibility
        this.set(x, y, color);
        this.set(x + 1, y, color);
        this.set(x, y + 1, color);
      }
      if (x === xe && y === ye) {
        break;
      }
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y += sy;
      }
      travelled += 1;
    }
  }

  text(x: number, y: number, s: string, color: Rgb, scale = TEXT_SCALE): void {
    let cx = Math.round(x);
    for (const ch of s) {
      const glyph = glyphFor(ch);
      for (let gy = 0; gy < GLYPH_HEIGHT; gy++) {
        for (let gx = 0; gx < GLYPH_WIDTH; gx++) {
          if (glyph[gy][gx] === "#") {
            this.fillRect(cx + gx * scale, y + gy * scale, scale, scale, color);
          }
        }
      }
      cx += (GLYPH_WIDTH + 1) * scale;
    }
  }

  textWidth(s: string, scale = TEXT_SCALE): number {
    return s.length * (GLYPH_WIDTH + 1) * scale - scale;
  }
}

export interface Scale {
  (value: number): number;
}

/** Map a data interval onto a pixel interval (pixel order may be reversed). */
export function linearScale(d0: number, d1: number, p0: number, p1: number): Scale {
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  return (v: number) => p0 + ((v - d0) / span) * (p1 - p0);
}

export function logScale(d0: number, d1: number, p0: number, p1: number): Scale {
  const inner = linearScale(Math.log10(d0), Math.log10(d1), p0, p1);
  return (v: number) => inner(Math.log10(v));
}

/** Round ticks for a linear axis: about n "nice" values covering [lo, hi]. */
export function linearTicks(lo: number, hi: number, n = 6): number[] {
  if (hi <= lo) {
    return [lo];
  }
  const rawStep = (hi - lo) / n;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Powers of ten spanning [lo, hi] for a log axis. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); Math.pow(10, e) <= hi * (1 + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) {
    ticks.push(lo, hi);
  }
  return ticks;
}

export function formatTick(v: number): string {
  if (v === 0) {
    return "0";
  }
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) {
    const e = Math.floor(Math.log10(abs));
    const mant = v / Math.pow(10, e);
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${Number(mant.toFixed(2))}X`;
    return `${m}1E${e}`;
  }
  return `${Number(v.toPrecision(4))}`;
}

export interface Frame {
  raster: Raster;
  x0: number;
  x1: number;
  y0: number;
  y1: number;
}

/** Reserve the plot area inside the margins and draw its border. */
export function newFrame(raster: Raster): Frame {
  const x0 = MARGIN.left;
  const x1 = raster.width - MARGIN.right;
  const y0 = MARGIN.top;
  const y1 = raster.height - MARGIN.bottom;
  raster.line(x0, y0, x1, y0, AXIS_COLOR);
  raster.line(x0, y1, x1, y1, AXIS_COLOR);
  raster.line(x0, y0, x0, y1, AXIS_COLOR);
  raster.line(x1, y0, x1, y1, AXIS_COLOR);
  return { raster, x0, x1, y0, y1 };
}

export function drawXAxis(frame: Frame, ticks: number[], scale: Scale, grid = true): void {
  const r = frame.raster;
  for (const t of ticks) {
    const px = scale(t);
    if (px < frame.x0 - 0.5 || px > frame.x1 + 0.5) {
      continue;
    }
    if (grid) {
      r.line(px, frame.y0 + 1, px, frame.y1 - 1, GRID_COLOR);
    }
    r.line(px, frame.y1, px, frame.y1 + TICK_LENGTH, AXIS_COLOR);
    const label = formatTick(t);
    r.text(px - r.textWidth(label) / 2, frame.y1 + TICK_LENGTH + 4, label, AXIS_COLOR);
  }
}

export function drawYAxis(frame: Frame, ticks: number[], scale: Scale, grid = true): void {
  const r = frame.raster;
  for (const t of ticks) {
    const py = scale(t);
    if (py < frame.y0 - 0.5 || py > frame.y1 + 0.5) {
      continue;
    }
    if (grid) {
      r.line(frame.x0 + 1, py, frame.x1 - 1, py, GRID_COLOR);
    }
    r.line(frame.x0 - TICK_LENGTH, py, frame.x0, py, AXIS_COLOR);
    const label = formatTick(t);
    r.text(frame.x0 - TICK_LENGTH - 6 - r.textWidth(label), py - 7, label, AXIS_COLOR);
  }
}

export function drawTitle(frame: Frame, title: string): void {
  const r = frame.raster;
  const cx = (frame.x0 + frame.x1) / 2;
  r.text(cx - r.textWidth(title) / 2, 14, title, AXIS_COLOR);
}

export function drawXLabel(frame: Frame, label: string): void {
  const r = frame.raster;
  const cx = (frame.x0 + frame.x1) / 2;
  r.text(cx - r.textWidth(label) / 2, r.height - 22, label, AXIS_COLOR);
}

/** Shared style constants so every figure renders identically. */

export interface Rgb {
  r: number;
  g: number;
  b: number;
}

export const WIDTH = 800;
export const HEIGHT = 600;
export const DPI = 96;

export const MARGIN = { left: 80, right: 30, top: 50, bottom: 60 };

export const BACKGROUND: Rgb = { r: 255, g: 255, b: 255 };
export const AXIS_COLOR: Rgb = { r: 40, g: 40, b: 40 };
export const GRID_COLOR: Rgb = { r: 220, g: 220, b: 220 };
export const GUIDE_COLOR: Rgb = { r: 130, g: 130, b: 130 };

/** Per-series palette, indexed in input order (scheme order of the CLI). */
export const SERIES_COLORS: Rgb[] = [
  { r: 31, g: 119, b: 180 },
  { r: 214, g: 39, b: 40 },
  { r: 44, g: 160, b: 44 },
  { r: 255, g: 127, b: 14 },
  { r: 148, g: 103, b: 189 },
  { r: 140, g: 86, b: 75 },
];

/** Dash patterns cycle with the series index: solid, dashed, dotted. */
export const DASH_PATTERNS: Array<number[] | null> = [
  null,
  [6, 4],
  [2, 3],
];

export const TICK_LENGTH = 5;
export const TEXT_SCALE = 2; // bitmap font pixels per glyph pixel

/** Five-stop heatmap colormap, interpolated linearly (dark to bright). */
export const HEAT_STOPS: Rgb[] = [
  { r: 68, g: 1, b: 84 },
  { r: 59, g: 82, b: 139 },
  { r: 33, g: 145, b: 140 },
  { r: 94, g: 201, b: 98 },
  { r: 253, g: 231, b: 37 },
];

export function heatColor(t: number): Rgb {
  const clamped = Math.min(1, Math.max(0, t));
  const pos = clamped * (HEAT_STOPS.length - 1);
  const lo = Math.min(HEAT_STOPS.length - 2, Math.floor(pos));
  const frac = pos - lo;
  const a = HEAT_STOPS[lo];
  const b = HEAT_STOPS[lo + 1];
  return {
    r: Math.round(a.r + frac * (b.r - a.r)),
    g: Math.round(a.g + frac * (b.g - a.g)),
    b: Math.round(a.b + frac * (b.b - a.b)),
  };
}

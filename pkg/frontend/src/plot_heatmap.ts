/**
 * Cell-mean surface over the (spatial cell, random element) grid as a heatmap.
 *
 * Usage:
 *   node dist/src/plot_heatmap.js --input field.csv [--input field2.csv ...]
 *       --output fig.png [--component 0] [--title TEXT] [--meta fig.json]
 *
 * Reads the k=0 rows of field CSVs (one panel per input, side by side) and
 * shares a single color scale across all panels so schemes stay comparable.
 */
import {
  parseCommon,
  runCommand,
  seriesExtrema,
  SeriesMeta,
  UsageError,
  writeOutputs,
} from "./cli_common";
import { FieldGrid, readFieldMeans } from "./csv";
import { formatTick, Raster } from "./raster";
import { AXIS_COLOR, heatColor, HEIGHT, MARGIN, WIDTH } from "./theme";

function drawPanel(
  raster: Raster,
  grid: FieldGrid,
  px0: number,
  px1: number,
  py0: number,
  py1: number,
  lo: number,
  hi: number,
): void {
  const span = hi - lo === 0 ? 1 : hi - lo;
  const cw = (px1 - px0) / grid.nX;
  const ch = (py1 - py0) / grid.nXi;
  for (let i = 0; i < grid.nX; i++) {
    for (let j = 0; j < grid.nXi; j++) {
      const t = (grid.values[i][j] - lo) / span;
      // j=0 is the leftmost random element; draw it at the bottom
      raster.fillRect(
        px0 + i * cw,
        py1 - (j + 1) * ch,
        Math.ceil(cw),
        Math.ceil(ch),
        heatColor(t),
      );
    }
  }
  raster.line(px0, py0, px1, py0, AXIS_COLOR);
  raster.line(px0, py1, px1, py1, AXIS_COLOR);
  raster.line(px0, py0, px0, py1, AXIS_COLOR);
  raster.line(px1, py0, px1, py1, AXIS_COLOR);
}

function drawColorbar(raster: Raster, x: number, y0: number, y1: number, lo: number, hi: number): void {
  for (let y = y0; y <= y1; y++) {
    const t = (y1 - y) / (y1 - y0);
    raster.fillRect(x, y, 16, 1, heatColor(t));
  }
  raster.line(x, y0, x + 16, y0, AXIS_COLOR);
  raster.line(x, y1, x + 16, y1, AXIS_COLOR);
  raster.text(x - 10, y0 - 18, formatTick(hi), AXIS_COLOR);
  raster.text(x - 10, y1 + 6, formatTick(lo), AXIS_COLOR);
}

function main(argv: string[]): void {
  const opts = parseCommon(argv, { component: {} });
  const componentFlag = (opts.extra.component as string | undefined) ?? "0";
  const component = Number(componentFlag);
  if (!Number.isInteger(component) || component < 0) {
    throw new UsageError(`--component must be a non-negative integer, got "${componentFlag}"`);
  }

  const grids = opts.inputs.map((path) => readFieldMeans(path, component));

  let lo = Infinity;
  let hi = -Infinity;
  for (const g of grids) {
    for (const row of g.values) {
      lo = Math.min(lo, ...row);
      hi = Math.max(hi, ...row);
    }
  }

  const raster = new Raster(WIDTH, HEIGHT);
  const gap = 20;
  const barWidth = 70;
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right - barWidth;
  const y0 = MARGIN.top;
  const y1 = HEIGHT - MARGIN.bottom;
  const panelWidth = (x1 - x0 - gap * (grids.length - 1)) / grids.length;

  const meta: SeriesMeta[] = [];
  grids.forEach((g, idx) => {
    const px0 = x0 + idx * (panelWidth + gap);
    drawPanel(raster, g, px0, px0 + panelWidth, y0, y1, lo, hi);
    raster.text(px0, y1 + 10, `PANEL ${idx}`, AXIS_COLOR);
    meta.push(seriesExtrema(opts.inputs[idx], g.values.flat()));
  });
  drawColorbar(raster, x1 + 24, y0, y1, lo, hi);
  raster.text(x0, 14, opts.title ?? `CELL MEANS, COMPONENT ${component}`, AXIS_COLOR);
  raster.text(x0, HEIGHT - 22, "X CELL (HORIZONTAL) VS RANDOM ELEMENT (VERTICAL)", AXIS_COLOR);

  writeOutputs(opts, raster, meta);
}

runCommand(() => main(process.argv.slice(2)));

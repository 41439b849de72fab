/**
 * Log-log error-vs-resolution figure from one or more convergence CSVs.
 *
 * Usage:
 *   node dist/src/plot_convergence.js --input conv.csv [--input conv2.csv ...]
 *       --output fig.png [--column l1_mean] [--slope 1 --slope 3]
 *       [--title TEXT] [--meta fig.json]
 *
 * Each --slope S adds a dashed O(N^-S) guide line anchored at the first
 * point of the first series.
 */
import {
  parseCommon,
  runCommand,
  seriesExtrema,
  SeriesMeta,
  UsageError,
  writeOutputs,
} from "./cli_common";
import { readConvergence } from "./csv";
import {
  drawTitle,
  drawXAxis,
  drawXLabel,
  drawYAxis,
  logScale,
  logTicks,
  newFrame,
  Raster,
} from "./raster";
import { AXIS_COLOR, DASH_PATTERNS, GUIDE_COLOR, SERIES_COLORS } from "./theme";

function main(argv: string[]): void {
  const opts = parseCommon(argv, { column: {}, slope: { multiple: true } });
  const columnName = (opts.extra.column as string | undefined) ?? "l1_mean";
  const slopeFlags = (opts.extra.slope as string[] | undefined) ?? [];
  const slopes = slopeFlags.map((s) => {
    const v = Number(s);
    if (!Number.isFinite(v) || v <= 0) {
      throw new UsageError(`--slope must be a positive number, got "${s}"`);
    }
    return v;
  });

  const series = opts.inputs.map((path) => readConvergence(path, columnName));

  let nLo = Infinity;
  let nHi = -Infinity;
  let eLo = Infinity;
  let eHi = -Infinity;
  for (const s of series) {
    nLo = Math.min(nLo, ...s.resolution);
    nHi = Math.max(nHi, ...s.resolution);
    eLo = Math.min(eLo, ...s.error);
    eHi = Math.max(eHi, ...s.error);
  }
  // guide lines extend the range downward
  for (const slope of slopes) {
    const anchor = series[0];
    eLo = Math.min(eLo, anchor.error[0] * Math.pow(anchor.resolution[0] / nHi, slope));
  }
  eLo /= 1.5;
  eHi *= 1.5;

  const raster = new Raster();
  const frame = newFrame(raster);
  const sx = logScale(nLo, nHi, frame.x0, frame.x1);
  const sy = logScale(eLo, eHi, frame.y1, frame.y0);
  drawXAxis(frame, logTicks(nLo, nHi), sx);
  drawYAxis(frame, logTicks(eLo, eHi), sy);
  drawTitle(frame, opts.title ?? `L1 error (${columnName}) vs resolution`);
  drawXLabel(frame, "cells");

  for (const slope of slopes) {
    const anchor = series[0];
    const y0 = anchor.error[0];
    const y1 = y0 * Math.pow(anchor.resolution[0] / nHi, slope);
    raster.line(sx(anchor.resolution[0]), sy(y0), sx(nHi), sy(y1), GUIDE_COLOR, [6, 4]);
    raster.text(sx(nHi) - 90, sy(y1) - 18, `ORDER ${slope}`, GUIDE_COLOR);
  }

  const meta: SeriesMeta[] = [];
  series.forEach((s, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const dash = DASH_PATTERNS[idx % DASH_PATTERNS.length];
    for (let i = 1; i < s.resolution.length; i++) {
      raster.line(
        sx(s.resolution[i - 1]),
        sy(s.error[i - 1]),
        sx(s.resolution[i]),
        sy(s.error[i]),
        color,
        dash,
      );
    }
    for (let i = 0; i < s.resolution.length; i++) {
      raster.fillRect(sx(s.resolution[i]) - 2, sy(s.error[i]) - 2, 5, 5, color);
    }
    raster.text(frame.x0 + 10, frame.y0 + 8 + 18 * idx, `SERIES ${idx}`, color);
    meta.push(seriesExtrema(opts.inputs[idx], s.error));
  });
  raster.text(12, frame.y0 - 30, "ERROR", AXIS_COLOR);

  writeOutputs(opts, raster, meta);
}

runCommand(() => main(process.argv.slice(2)));

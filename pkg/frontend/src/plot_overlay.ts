/**
 * Overlaid line plot of one moments column from several runs.
 *
 * Usage:
 *   node dist/src/plot_overlay.js --input moments.csv [--input moments2.csv ...]
 *       --output fig.png [--column mean_0] [--title TEXT] [--meta fig.json]
 *
 * The first series is drawn solid, later ones dashed, so e.g. a limited and
 * an unlimited scheme can be compared in one frame.
 */
import {
  parseCommon,
  runCommand,
  seriesExtrema,
  SeriesMeta,
  writeOutputs,
} from "./cli_common";
import { readMoments } from "./csv";
import {
  drawTitle,
  drawXAxis,
  drawXLabel,
  drawYAxis,
  linearScale,
  linearTicks,
  newFrame,
  Raster,
} from "./raster";
import { DASH_PATTERNS, SERIES_COLORS } from "./theme";

function main(argv: string[]): void {
  const opts = parseCommon(argv, { column: {} });
  const columnName = (opts.extra.column as string | undefined) ?? "mean_0";

  const series = opts.inputs.map((path) => readMoments(path, columnName));

  let xLo = Infinity;
  let xHi = -Infinity;
  let yLo = Infinity;
  let yHi = -Infinity;
  for (const s of series) {
    xLo = Math.min(xLo, ...s.x);
    xHi = Math.max(xHi, ...s.x);
    yLo = Math.min(yLo, ...s.values);
    yHi = Math.max(yHi, ...s.values);
  }
  const pad = (yHi - yLo || Math.abs(yHi) || 1) * 0.08;
  yLo -= pad;
  yHi += pad;

  const raster = new Raster();
  const frame = newFrame(raster);
  const sx = linearScale(xLo, xHi, frame.x0, frame.x1);
  const sy = linearScale(yLo, yHi, frame.y1, frame.y0);
  drawXAxis(frame, linearTicks(xLo, xHi), sx);
  drawYAxis(frame, linearTicks(yLo, yHi), sy);
  drawTitle(frame, opts.title ?? columnName);
  drawXLabel(frame, "x");

  const meta: SeriesMeta[] = [];
  series.forEach((s, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const dash = DASH_PATTERNS[idx % DASH_PATTERNS.length];
    for (let i = 1; i < s.x.length; i++) {
      raster.line(sx(s.x[i - 1]), sy(s.values[i - 1]), sx(s.x[i]), sy(s.values[i]), color, dash);
    }
    raster.text(frame.x0 + 10, frame.y0 + 8 + 18 * idx, `SERIES ${idx}`, color);
    meta.push(seriesExtrema(opts.inputs[idx], s.values));
  });

  writeOutputs(opts, raster, meta);
}

runCommand(() => main(process.argv.slice(2)));

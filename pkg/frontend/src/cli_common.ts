/** Flag parsing and exit-code policy shared by the three figure commands. */
import * as fs from "node:fs";
import { parseArgs } from "node:util";

import { SchemaError } from "./csv";
import { encodePng } from "./png";
import { Raster } from "./raster";

export class UsageError extends Error {}

export interface CommonOptions {
  inputs: string[];
  output: string;
  meta?: string;
  title?: string;
  extra: Record<string, string | string[] | undefined>;
}

/**
 * Parse the shared flags plus any command-specific string flags.
 *
 * --input is repeatable (one series per file), --output is the image path,
 * --meta optionally records plotted extrema as JSON for verification.
 */
export function parseCommon(
  argv: string[],
  extraFlags: Record<string, { multiple?: boolean }> = {},
): CommonOptions {
  const options: Record<string, { type: "string"; multiple?: boolean }> = {
    input: { type: "string", multiple: true },
    output: { type: "string" },
    meta: { type: "string" },
    title: { type: "string" },
  };
  for (const [name, conf] of Object.entries(extraFlags)) {
    options[name] = conf.multiple ? { type: "string", multiple: true } : { type: "string" };
  }
  let values: Record<string, string | string[] | undefined>;
  try {
    ({ values } = parseArgs({ args: argv, options, allowPositionals: false }));
  } catch (err) {
    throw new UsageError((err as Error).message);
  }
  const inputs = (values.input as string[] | undefined) ?? [];
  const output = values.output as string | undefined;
  if (inputs.length === 0) {
    throw new UsageError("at least one --input is required");
  }
  if (!output) {
    throw new UsageError("--output is required");
  }
  return {
    inputs,
    output,
    meta: values.meta as string | undefined,
    title: values.title as string | undefined,
    extra: values,
  };
}

export interface SeriesMeta {
  input: string;
  min: number;
  max: number;
}

export function seriesExtrema(input: string, values: number[]): SeriesMeta {
  return { input, min: Math.min(...values), max: Math.max(...values) };
}

export function writeOutputs(opts: CommonOptions, raster: Raster, series: SeriesMeta[]): void {
  fs.writeFileSync(opts.output, encodePng(raster.width, raster.height, raster.pixels));
  if (opts.meta) {
    fs.writeFileSync(opts.meta, JSON.stringify({ output: opts.output, series }, null, 2) + "\n");
  }
}

/** Run a command body and translate failures into the documented exit codes. */
export function runCommand(body: () => void): void {
  try {
    body();
  } catch (err) {
    if (err instanceof UsageError || err instanceof SchemaError) {
      process.stderr.write(`error: ${(err as Error).message}\n`);
      process.exitCode = 2;
      return;
    }
    if (err instanceof Error && "code" in err) {
      // fs errors (missing input, unwritable output) carry a code property
      process.stderr.write(`error: ${err.message}\n`);
      process.exitCode = 4;
      return;
    }
    throw err;
  }
}

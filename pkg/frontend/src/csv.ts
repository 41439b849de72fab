/** Readers for the solver CLI's CSV outputs. No numerics are recomputed here. */
import * as fs from "node:fs";

/** Raised when an input file parses but does not match the expected schema. */
export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  rows: number[][];
}

function parseNumber(token: string, line: number, column: string): number {
  if (token === "") {
    return NaN; // blank cells are legal (first eoc entry of a convergence table)
  }
  const value = Number(token);
  if (Number.isNaN(value)) {
    throw new SchemaError(`line ${line}: column ${column} has non-numeric value "${token}"`);
  }
  return value;
}

/** Parse a comma-separated file with a header row and purely numeric body. */
export function readTable(path: string): Table {
  const text = fs.readFileSync(path, "utf8");
  const lines = text.split("\n").filter((ln) => ln.trim() !== "");
  if (lines.length < 1) {
    throw new SchemaError(`${path}: empty file`);
  }
  const columns = lines[0].split(",").map((c) => c.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const tokens = lines[i].split(",");
    if (tokens.length !== columns.length) {
      throw new SchemaError(
        `${path}: line ${i + 1} has ${tokens.length} fields, header has ${columns.length}`,
      );
    }
    rows.push(tokens.map((t, j) => parseNumber(t.trim(), i + 1, columns[j])));
  }
  return { columns, rows };
}

export function column(table: Table, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`missing column "${name}" (have: ${table.columns.join(", ")})`);
  }
  return table.rows.map((r) => r[idx]);
}

export interface ConvergenceSeries {
  resolution: number[];
  error: number[];
}

/** Read a convergence table: resolution plus one l1 column (mean by default). */
export function readConvergence(path: string, errorColumn = "l1_mean"): ConvergenceSeries {
  const table = readTable(path);
  const resolution = column(table, "resolution");
  const error = column(table, errorColumn);
  if (resolution.length < 2) {
    throw new SchemaError(`${path}: need at least two resolutions, got ${resolution.length}`);
  }
  for (let i = 0; i < resolution.length; i++) {
    if (!(resolution[i] > 0) || !(error[i] > 0)) {
      throw new SchemaError(`${path}: row ${i + 1} is not positive, cannot plot on log axes`);
    }
  }
  return { resolution, error };
}

export interface MomentSeries {
  x: number[];
  values: number[];
}

/** Read one column of a moments table against its x coordinates. */
export function readMoments(path: string, columnName: string): MomentSeries {
  const table = readTable(path);
  const x = column(table, "x");
  const values = column(table, columnName);
  if (x.length < 2) {
    throw new SchemaError(`${path}: need at least two cells, got ${x.length}`);
  }
  for (const v of [...x, ...values]) {
    if (!Number.isFinite(v)) {
      throw new SchemaError(`${path}: non-finite entry`);
    }
  }
  return { x, values };
}

export interface FieldGrid {
  nX: number;
  nXi: number;
  /** values[i][j]: cell mean in spatial cell i, random element j. */
  values: number[][];
}

/**
 * Extract the cell-mean surface for one component from a field table.
 *
 * Keeps only the k=0 rows (the mean mode of each cell) and requires them to
 * fill a full rectangular (i, j) grid.
 */
export function readFieldMeans(path: string, component = 0): FieldGrid {
  const table = readTable(path);
  for (const name of ["k", "i", "j", "component", "value"]) {
    column(table, name); // presence check
  }
  const k = column(table, "k");
  const ii = column(table, "i");
  const jj = column(table, "j");
  const comp = column(table, "component");
  const value = column(table, "value");

  const cells = new Map<string, number>();
  let nX = 0;
  let nXi = 0;
  for (let r = 0; r < k.length; r++) {
    if (k[r] !== 0 || comp[r] !== component) {
      continue;
    }
    const key = `${ii[r]},${jj[r]}`;
    if (cells.has(key)) {
      throw new SchemaError(`${path}: duplicate cell (${key}) for component ${component}`);
    }
    cells.set(key, value[r]);
    nX = Math.max(nX, ii[r] + 1);
    nXi = Math.max(nXi, jj[r] + 1);
  }
  if (cells.size === 0) {
    throw new SchemaError(`${path}: no k=0 rows for component ${component}`);
  }
  if (cells.size !== nX * nXi) {
    throw new SchemaError(
      `${path}: component ${component} covers ${cells.size} cells, expected full ${nX}x${nXi} grid`,
    );
  }
  const values: number[][] = [];
  for (let i = 0; i < nX; i++) {
    const row: number[] = [];
    for (let j = 0; j < nXi; j++) {
      const v = cells.get(`${i},${j}`);
      if (v === undefined || !Number.isFinite(v)) {
        throw new SchemaError(`${path}: missing or non-finite cell (${i},${j})`);
      }
      row.push(v);
    }
    values.push(row);
  }
  return { nX, nXi, values };
}

/**
 * Solver run CSVs: one row per evaluation checkpoint.
 *
 * Expected header (exact): game,algo,seed,iteration,episodes,exploitability,wall_time_s
 */

export interface RunRow {
  game: string;
  algo: string;
  seed: number;
  iteration: number;
  episodes: number;
  exploitability: number;
  wall_time_s: number;
}

export const EXPECTED_HEADER = [
  "game",
  "algo",
  "seed",
  "iteration",
  "episodes",
  "exploitability",
  "wall_time_s",
];

export class CsvSchemaError extends Error {}

export function parseRunCsv(text: string, source = "<csv>"): RunRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new CsvSchemaError(`${source}: empty file`);
  }
  const header = lines[0].split(",");
  for (let i = 0; i < EXPECTED_HEADER.length; i++) {
    if (header[i] !== EXPECTED_HEADER[i]) {
      throw new CsvSchemaError(
        `${source}: column ${i + 1} is ${JSON.stringify(header[i] ?? "")}, expected "${EXPECTED_HEADER[i]}"`,
      );
    }
  }
  if (header.length !== EXPECTED_HEADER.length) {
    throw new CsvSchemaError(
      `${source}: unexpected extra column ${JSON.stringify(header[EXPECTED_HEADER.length])}`,
    );
  }
  const rows: RunRow[] = [];
  for (let n = 1; n < lines.length; n++) {
    const parts = lines[n].split(",");
    if (parts.length !== EXPECTED_HEADER.length) {
      throw new CsvSchemaError(`${source}:${n + 1}: expected 7 fields, got ${parts.length}`);
    }
    const row: RunRow = {
      game: parts[0],
      algo: parts[1],
      seed: intField(parts[2], "seed", source, n),
      iteration: intField(parts[3], "iteration", source, n),
      episodes: intField(parts[4], "episodes", source, n),
      exploitability: floatField(parts[5], "exploitability", source, n),
      wall_time_s: floatField(parts[6], "wall_time_s", source, n),
    };
    if (row.exploitability < 0) {
      throw new CsvSchemaError(`${source}:${n + 1}: negative exploitability`);
    }
    rows.push(row);
  }
  return rows;
}

function intField(raw: string, name: string, source: string, line: number): number {
  const value = Number(raw);
  if (!Number.isInteger(value)) {
    throw new CsvSchemaError(`${source}:${line + 1}: ${name} must be an integer, got ${raw}`);
  }
  return value;
}

function floatField(raw: string, name: string, source: string, line: number): number {
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new CsvSchemaError(`${source}:${line + 1}: ${name} must be a number, got ${raw}`);
  }
  return value;
}

import Papa from "papaparse";

export interface Table {
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, path: string): Table {
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (result.errors.length > 0) {
    const first = result.errors[0];
    throw new Error(`${path}: CSV parse error at row ${first.row}: ${first.message}`);
  }
  const columns = result.meta.fields ?? [];
  if (columns.length === 0 || result.data.length === 0) {
    throw new Error(`${path}: CSV is empty`);
  }
  return { columns, rows: result.data };
}

export function requireColumn(table: Table, name: string, path: string): void {
  if (!table.columns.includes(name)) {
    throw new Error(
      `${path}: missing column "${name}" (have: ${table.columns.join(", ")})`,
    );
  }
}

export function numericColumn(table: Table, name: string, path: string): number[] {
  requireColumn(table, name, path);
  return table.rows.map((row, i) => {
    const v = Number(row[name]);
    if (Number.isNaN(v) && row[name] !== "nan") {
      throw new Error(`${path}: row ${i} has non-numeric "${name}" = "${row[name]}"`);
    }
    return v;
  });
}
